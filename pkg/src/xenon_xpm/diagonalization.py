"""
Collective dressed-state calculation of the cross-phase shift.

The four-state Hamiltonian is written in the frame rotating with both photons
(the constant hbar*(omega_1 + omega_2) is removed from the diagonal), so the
bare energies are (delta, Delta3, Delta, 0) for the basis

    |1'> = vacuum, one atom in |h>
    |2'> = control photon, one atom in |i>
    |3'> = signal photon, one atom in |i>
    |4'> = both photons, all atoms in |g>

Everything is in rad/s.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CouplingSet
from .errors import NumericalError, StrongMixingError
from .perturbation import Scenario

INITIAL_STATE = 4
DEFAULT_OVERLAP_THRESHOLD = 0.5
MAX_SWEEPS = 100


@dataclass(frozen=True)
class DetuningFrameHamiltonian:
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix.setflags(write=False)


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray   # ascending
    eigenvectors: np.ndarray  # column k belongs to eigenvalues[k]
    sweeps: int = 0


@dataclass(frozen=True)
class NonlinearShiftResult:
    full_shift: float
    control_linear: float
    signal_linear: float
    nonlinear: float
    dressed_overlap: float
    phase: float


def collective_couplings(couplings: CouplingSet, n_atoms: float) -> CouplingSet:
    """sqrt(N) enhancement of the two |g>-|i> couplings; |i>-|h> is unchanged."""
    if n_atoms < 0:
        raise ValueError(f"atom number must be non-negative, got {n_atoms!r}")
    root = math.sqrt(n_atoms)
    return CouplingSet(g1=root * couplings.g1, g2=couplings.g2, g3=root * couplings.g3)


def build_hamiltonian(s: Scenario) -> DetuningFrameHamiltonian:
    c = collective_couplings(s.couplings, s.n_collective)
    h = np.zeros((4, 4))
    h[0, 0], h[1, 1], h[2, 2], h[3, 3] = s.small_delta, s.delta3, s.big_delta, 0.0
    h[0, 2] = h[2, 0] = c.g2
    h[1, 3] = h[3, 1] = c.g3
    h[2, 3] = h[3, 2] = c.g1
    return DetuningFrameHamiltonian(h)


def _off_norm(a):
    n = len(a)
    return math.sqrt(sum(a[p][q] ** 2 for p in range(n) for q in range(n) if p != q))


def eigensolve_symmetric(h, tol: float = 1e-14) -> EigenDecomposition:
    """
    Cyclic Jacobi eigensolver for a small real symmetric matrix.

    Rotations are applied in row order (p, q) with p < q; sweeps repeat until
    the off-diagonal Frobenius norm is at most ``tol * ||H||_F``.
    """
    arr = np.asarray(h.matrix if isinstance(h, DetuningFrameHamiltonian) else h, dtype=float)
    n = arr.shape[0]
    if arr.shape != (n, n):
        raise ValueError("matrix must be square")
    scale = float(np.linalg.norm(arr))
    if not np.allclose(arr, arr.T, rtol=0.0, atol=1e-12 * scale):
        raise ValueError("matrix is not symmetric")
    a = [[float(0.5 * (arr[i, j] + arr[j, i])) for j in range(n)] for i in range(n)]
    v = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    threshold = tol * scale

    sweeps = 0
    while _off_norm(a) > threshold:
        if sweeps >= MAX_SWEEPS:
            raise NumericalError("Jacobi iteration did not converge",
                                 {"sweeps": sweeps, "off_norm": _off_norm(a)})
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                if apq == 0.0:
                    continue
                theta = (a[q][q] - a[p][p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                a[p][p] -= t * apq
                a[q][q] += t * apq
                a[p][q] = a[q][p] = 0.0
                for r in range(n):
                    if r != p and r != q:
                        arp, arq = a[r][p], a[r][q]
                        a[r][p] = a[p][r] = arp - s * (arq + tau * arp)
                        a[r][q] = a[q][r] = arq + s * (arp - tau * arq)
                for r in range(n):
                    vrp, vrq = v[r][p], v[r][q]
                    v[r][p] = vrp - s * (vrq + tau * vrp)
                    v[r][q] = vrq + s * (vrp - tau * vrq)

    order = sorted(range(n), key=lambda k: a[k][k])
    values = np.array([a[k][k] for k in order])
    vectors = np.array([[v[r][k] for k in order] for r in range(n)])
    return EigenDecomposition(values, vectors, sweeps)


def dressed_eigenvalue(d: EigenDecomposition, bare_index: int = INITIAL_STATE,
                       threshold: float = DEFAULT_OVERLAP_THRESHOLD):
    """
    Eigenvalue whose eigenvector has the largest weight on bare state
    ``bare_index`` (1-based). Returns ``(eigenvalue, weight)``.
    """
    weights = d.eigenvectors[bare_index - 1, :] ** 2
    k = int(np.argmax(weights))
    overlap = float(weights[k])
    if overlap < threshold:
        raise StrongMixingError(
            f"bare state |{bare_index}'> is strongly mixed (max weight {overlap:.3f})",
            overlap, d.eigenvalues)
    return float(d.eigenvalues[k]), overlap


def linear_shift(detuning: float, coupling: float) -> float:
    """
    Shift of the lower-energy-state branch of [[detuning, G], [G, 0]] that
    tends to 0 as G -> 0; equals (D - sign(D) sqrt(D^2 + 4 G^2)) / 2.
    """
    if coupling == 0.0:
        return 0.0
    if detuning == 0.0:
        return -coupling
    # rationalised form avoids cancellation when G << |D|
    root = math.hypot(detuning, 2.0 * coupling)
    return -2.0 * coupling * coupling / (detuning + math.copysign(root, detuning))


def nonlinear_shift(s: Scenario, threshold: float = DEFAULT_OVERLAP_THRESHOLD) -> NonlinearShiftResult:
    decomposition = eigensolve_symmetric(build_hamiltonian(s))
    full, overlap = dressed_eigenvalue(decomposition, INITIAL_STATE, threshold)
    c = collective_couplings(s.couplings, s.n_collective)
    control = linear_shift(s.big_delta, c.g1)
    signal = linear_shift(s.delta3, c.g3)
    nonlinear = full - control - signal
    return NonlinearShiftResult(
        full_shift=full,
        control_linear=control,
        signal_linear=signal,
        nonlinear=nonlinear,
        dressed_overlap=overlap,
        phase=-nonlinear * s.interaction_time,
    )
