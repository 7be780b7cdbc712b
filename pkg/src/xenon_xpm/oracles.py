"""
Independent reference computations used by the validation suite and tests.

Nothing here shares code with the production solvers: eigenvalues come from
the characteristic polynomial in exact rational arithmetic, isolated with a
Sturm chain and bisection.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np


def characteristic_polynomial(matrix):
    """Exact coefficients of det(x I - A), highest degree first (Faddeev-LeVerrier)."""
    a = [[Fraction(float(x)) for x in row] for row in np.asarray(matrix, dtype=float)]
    n = len(a)
    coeffs = [Fraction(1)]
    m = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I
        am = [[sum(a[i][l] * m[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            am[i][i] += coeffs[-1]
        m = am
        trace = sum(sum(a[i][l] * m[l][i] for l in range(n)) for i in range(n))
        coeffs.append(-trace / k)
    return coeffs


def _derivative(p):
    n = len(p) - 1
    return [c * (n - i) for i, c in enumerate(p[:-1])]


def _remainder(num, den):
    num = list(num)
    while len(num) >= len(den) and any(num):
        factor = num[0] / den[0]
        for i in range(len(den)):
            num[i] -= factor * den[i]
        num.pop(0)
    while num and num[0] == 0:
        num.pop(0)
    return num


def sturm_chain(p):
    chain = [p, _derivative(p)]
    while True:
        r = _remainder(chain[-2], chain[-1])
        if not r:
            return chain
        chain.append([-c for c in r])


def _evaluate(p, x):
    acc = 0.0
    for c in p:
        acc = acc * x + c
    return acc


def _to_float(chain):
    # exact chain, rescaled to unit leading coefficient before rounding
    return [[float(c / abs(p[0])) for c in p] for p in chain]


def sign_changes(chain, x) -> int:
    x = float(x)
    signs = [v for v in (_evaluate(p, x) for p in chain) if v != 0]
    return sum(1 for s0, s1 in zip(signs, signs[1:]) if (s0 > 0) != (s1 > 0))


def sturm_eigenvalues(matrix, rtol: float = 1e-14):
    """
    Eigenvalues of a real symmetric matrix as the roots of its characteristic
    polynomial, each isolated by Sturm-sequence bisection.
    """
    arr = np.asarray(matrix, dtype=float)
    n = arr.shape[0]
    chain = _to_float(sturm_chain(characteristic_polynomial(arr)))
    # Gershgorin bound
    radius = float(max(abs(arr[i, i]) + sum(abs(arr[i, j]) for j in range(n) if j != i)
                       for i in range(n)))
    lo, hi = -radius - 1.0, radius + 1.0
    v_lo = sign_changes(chain, lo)
    distinct = v_lo - sign_changes(chain, hi)
    if distinct != n:
        raise ValueError(f"matrix has repeated eigenvalues ({distinct} distinct of {n})")
    width = rtol * max(radius, 1e-300)
    roots = []
    for k in range(1, n + 1):
        a, b = lo, hi
        # count of roots <= x is v_lo - V(x)
        while b - a > width:
            mid = 0.5 * (a + b)
            if mid == a or mid == b:
                break
            if v_lo - sign_changes(chain, mid) >= k:
                b = mid
            else:
                a = mid
        roots.append(0.5 * (a + b))
    return np.array(roots)
