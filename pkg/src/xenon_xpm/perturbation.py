"""
Fourth-order perturbative estimate of the cross-phase shift.

Sign conventions: ``big_delta = omega_ig - omega_1`` (positive when the control
sits below |i>), ``small_delta = (omega_ig + omega_hi) - (omega_1 + omega_2)``
(positive below |h>). Phases are reported with the sign of ``small_delta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import CavitySystem, CouplingSet
from .errors import DomainError, NumericalError

DEFAULT_VALIDITY_THRESHOLD = 0.1


@dataclass(frozen=True)
class Scenario:
    """Full input to either calculation method at one pair of detunings.

    ``n_collective`` is the atom number used for the sqrt(N) enhancement in
    the dressed-state calculation; it defaults to ``n_eff``.
    """
    big_delta: float
    small_delta: float
    delta3: float
    couplings: CouplingSet
    n_eff: float
    n_total: float
    interaction_time: float
    n_collective: float = field(default=None)

    def __post_init__(self):
        if self.n_collective is None:
            object.__setattr__(self, "n_collective", self.n_eff)
        if self.n_eff < 0 or self.n_total < 0 or self.n_collective < 0:
            raise DomainError("atom numbers must be non-negative")
        if not self.interaction_time >= 0:
            raise DomainError("interaction time must be non-negative")


def make_scenario(system: CavitySystem, big_delta: float, small_delta: float,
                  collective_atoms: str = "reduced") -> Scenario:
    """
    Scenario for ``system`` at control detuning ``big_delta`` and two-photon
    detuning ``small_delta`` (both rad/s).

    ``collective_atoms`` picks N for the sqrt(N) couplings: ``"reduced"``
    (rho V / 3) or ``"total"`` (rho V).
    """
    if collective_atoms == "reduced":
        n_coll = system.n_eff
    elif collective_atoms == "total":
        n_coll = system.n_total
    else:
        raise DomainError(f"collective_atoms must be 'reduced' or 'total', got {collective_atoms!r}")
    # omega_2 = omega_hi + Delta - delta, so Delta3 = omega_ig - omega_2
    delta3 = system.medium.splitting + small_delta - big_delta
    return Scenario(
        big_delta=big_delta,
        small_delta=small_delta,
        delta3=delta3,
        couplings=system.couplings,
        n_eff=system.n_eff,
        n_total=system.n_total,
        interaction_time=system.mode.interaction_time,
        n_collective=n_coll,
    )


@dataclass(frozen=True)
class PerturbativeResult:
    phase: float
    n1: float
    valid: bool


def e4_shift_per_atom(g1: float, g2: float, big_delta: float, small_delta: float) -> float:
    """Fourth-order cross shift of one atom, g1^2 g2^2 / (Delta^2 delta), in rad/s."""
    if big_delta == 0 or small_delta == 0:
        raise DomainError("resonant detuning: the fourth-order shift diverges at zero detuning")
    return g1 * g1 * g2 * g2 / (big_delta * big_delta * small_delta)


def phi_uniform(s: Scenario) -> float:
    """Cross phase for a uniform field over the mode cylinder."""
    return s.n_eff * e4_shift_per_atom(s.couplings.g1, s.couplings.g2,
                                       s.big_delta, s.small_delta) * s.interaction_time


def n1_population(s: Scenario, orientation_averaged: bool = True) -> float:
    """Expected number of atoms in |i>, N g1^2 / Delta^2."""
    if s.big_delta == 0:
        raise DomainError("resonant control: first-excited-state population diverges at Delta = 0")
    n = s.n_eff if orientation_averaged else s.n_total
    return n * s.couplings.g1**2 / s.big_delta**2


def evaluate_perturbative(s: Scenario, threshold: float = DEFAULT_VALIDITY_THRESHOLD,
                          orientation_averaged: bool = True) -> PerturbativeResult:
    n1 = n1_population(s, orientation_averaged)
    return PerturbativeResult(phase=phi_uniform(s), n1=n1, valid=n1 < threshold)


def gaussian_ratio(rayleigh_range: float, length: float) -> float:
    """Closed-form phi_gaussian / phi_uniform for a TEM00 mode: 2 zR atan(L / 2 zR) / L."""
    return 2.0 * rayleigh_range * math.atan(length / (2.0 * rayleigh_range)) / length


def _gauss_legendre_2d(func, z_lo, z_hi, n):
    """Integrate func(r, z) * 2 pi r over r in [0, 6 w(z)] (supplied by func) and z."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (z_hi - z_lo)
    z = 0.5 * (z_hi + z_lo) + half * x
    total = 0.0
    for zk, wk in zip(z, w):
        r_max, integrand = func(zk)
        r = 0.5 * r_max * (x + 1.0)
        total += wk * half * 0.5 * r_max * np.dot(w, integrand(r) * 2.0 * np.pi * r)
    return total


def phi_gaussian(system: CavitySystem, s: Scenario, nodes: int = 64,
                 rtol: float = 1e-6, max_refinements: int = 4) -> float:
    """
    Cross phase from integrating the local fourth-order shift over a TEM00 mode.

    Each field has the squared envelope u(r, z) = (w0/w)^2 exp(-2 r^2 / w^2),
    normalised so that eps0 * integral(E^2) dV matches the cylinder model's
    single-photon energy. The atom density carries the 1/3 orientation factor.
    Nested Gauss-Legendre, doubling the node count until two successive
    results agree to ``rtol``.
    """
    if s.big_delta == 0 or s.small_delta == 0:
        raise DomainError("resonant detuning: the fourth-order shift diverges at zero detuning")
    const = system.const
    mode = system.mode
    w0, zr = mode.waist, mode.rayleigh_range
    L = system.cavity.mirror_spacing
    med = system.medium
    density = med.density / 3.0
    if density == 0:
        return 0.0
    u_volume = 0.5 * math.pi * w0**2 * L
    m = system.normalization_multiplier

    def peak_coupling_sq(transition_mu, omega):
        e_sq = m * const.hbar * omega / (2.0 * const.epsilon0 * u_volume)
        return (transition_mu / const.hbar) ** 2 * e_sq

    g1_sq = peak_coupling_sq(med.lower.dipole_moment, med.lower.angular_frequency)
    g2_sq = peak_coupling_sq(med.upper.dipole_moment, med.upper.angular_frequency)
    prefactor = density * s.interaction_time / (s.big_delta**2 * s.small_delta)

    def slice_at(z):
        wz_sq = w0**2 * (1.0 + (z / zr) ** 2)

        def integrand(r):
            u = (w0**2 / wz_sq) * np.exp(-2.0 * r * r / wz_sq)
            return prefactor * (g1_sq * u) * (g2_sq * u)

        return 6.0 * math.sqrt(wz_sq), integrand

    previous = _gauss_legendre_2d(slice_at, -0.5 * L, 0.5 * L, nodes)
    history = [(nodes, previous)]
    for _ in range(max_refinements):
        nodes *= 2
        current = _gauss_legendre_2d(slice_at, -0.5 * L, 0.5 * L, nodes)
        history.append((nodes, current))
        if abs(current - previous) <= rtol * abs(current):
            return current
        previous = current
    raise NumericalError("Gaussian-mode quadrature did not converge",
                         {"history": history, "rtol": rtol})
