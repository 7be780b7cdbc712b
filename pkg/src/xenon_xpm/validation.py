"""
Self-checks run by ``xenon-xpm validate``.

Each check compares a production code path against an independent route
(closed forms, exact characteristic polynomials, analytic ratios, scaling
laws) and returns a :class:`Check`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .config import Config, build_system, dataset_problems, read_dataset
from .diagonalization import (build_hamiltonian, eigensolve_symmetric, linear_shift,
                              nonlinear_shift)
from .oracles import sturm_eigenvalues
from .perturbation import gaussian_ratio, make_scenario, phi_gaussian, phi_uniform

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def check_dataset(path=None) -> Check:
    try:
        problems = dataset_problems(read_dataset(path))
    except (OSError, ValueError) as exc:
        problems = [str(exc)]
    return Check("dataset_integrity", not problems, "; ".join(problems) or "ok")


def check_eigensolver(samples=200, seed=20140101) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        a = rng.uniform(-1.0, 1.0, (4, 4))
        a = (a + a.T) * 10.0 ** rng.uniform(-6, 6)
        ref = sturm_eigenvalues(a)
        got = eigensolve_symmetric(a).eigenvalues
        worst = max(worst, float(np.max(np.abs(got - ref)) / np.max(np.abs(ref))))
    return Check("eigensolver_vs_sturm", worst <= 1e-10, f"max relative error {worst:.2e}")


def check_closed_form(samples=200, seed=7) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        detuning = rng.choice([-1.0, 1.0]) * 10.0 ** rng.uniform(3, 15)
        coupling = 10.0 ** rng.uniform(3, 15)
        d = eigensolve_symmetric(np.array([[detuning, coupling], [coupling, 0.0]]))
        k = int(np.argmax(d.eigenvectors[1, :] ** 2))
        exact = linear_shift(detuning, coupling)
        worst = max(worst, abs(d.eigenvalues[k] - exact) / abs(exact))
    return Check("linear_shift_closed_form", bool(worst <= 1e-12), f"max relative error {worst:.2e}")


def check_scaling(cfg: Config) -> Check:
    system = build_system(cfg)
    s = make_scenario(system, TWO_PI * 1e9, TWO_PI * cfg.small_delta_mhz * 1e6)
    base = phi_uniform(s)
    cases = {
        "n_eff": (replace(s, n_eff=2 * s.n_eff), 2.0),
        "time": (replace(s, interaction_time=3 * s.interaction_time), 3.0),
        "Delta": (replace(s, big_delta=2 * s.big_delta), 0.25),
        "delta": (replace(s, small_delta=4 * s.small_delta), 0.25),
        "g1": (replace(s, couplings=replace(s.couplings, g1=2 * s.couplings.g1)), 4.0),
        "g2": (replace(s, couplings=replace(s.couplings, g2=3 * s.couplings.g2)), 9.0),
    }
    worst = max(abs(phi_uniform(c) / base / ratio - 1.0) for c, ratio in cases.values())
    return Check("perturbative_scaling_laws", worst <= 1e-12, f"max deviation {worst:.2e}")


def check_gaussian_ratio(cfg: Config) -> Check:
    system = build_system(cfg)
    s = make_scenario(system, TWO_PI * 1e9, TWO_PI * cfg.small_delta_mhz * 1e6)
    if system.medium.density == 0:
        return Check("gaussian_vs_cylinder", True, "empty cavity, skipped")
    ratio = phi_gaussian(system, s) / phi_uniform(s)
    expected = gaussian_ratio(system.mode.rayleigh_range, system.cavity.mirror_spacing)
    ok = abs(ratio / expected - 1.0) <= 1e-6 and 0.9 <= ratio <= 1.0
    return Check("gaussian_vs_cylinder", bool(ok), f"ratio {ratio:.8f}, analytic {expected:.8f}")


def check_perturbative_limit(cfg: Config) -> Check:
    """
    Single atom with the configured couplings, detuned 100x beyond every
    coupling, where the two methods must coincide.
    """
    system = build_system(cfg)
    c = system.couplings
    s = make_scenario(system, 100.0 * max(c.g1, c.g3), 100.0 * c.g2)
    s = replace(s, n_eff=1.0, n_collective=1.0)
    pert = phi_uniform(s)
    diag = nonlinear_shift(s).phase
    rel = abs(diag - pert) / abs(pert)
    return Check("perturbative_limit_agreement", rel <= 0.02, f"relative difference {rel:.2e}")


def check_hamiltonian_invariants(cfg: Config) -> Check:
    system = build_system(cfg)
    s = make_scenario(system, TWO_PI * 1e9, TWO_PI * cfg.small_delta_mhz * 1e6)
    h = build_hamiltonian(s).matrix
    d = eigensolve_symmetric(h)
    trace_err = abs(d.eigenvalues.sum() - np.trace(h)) / np.abs(np.diag(h)).sum()
    v = d.eigenvectors
    ortho = float(np.max(np.abs(v.T @ v - np.eye(4))))
    recon = float(np.linalg.norm(v @ np.diag(d.eigenvalues) @ v.T - h) / np.linalg.norm(h))
    ok = trace_err <= 1e-12 and ortho <= 1e-12 and recon <= 1e-10
    return Check("hamiltonian_invariants", bool(ok),
                 f"trace {trace_err:.1e}, orthonormality {ortho:.1e}, reconstruction {recon:.1e}")


def run_all(cfg: Config, dataset=None) -> list[Check]:
    checks = [check_dataset(dataset)]
    for fn in (check_eigensolver, check_closed_form):
        checks.append(fn())
    for fn in (check_scaling, check_gaussian_ratio, check_perturbative_limit,
               check_hamiltonian_invariants):
        try:
            checks.append(fn(cfg))
        except Exception as exc:  # a crash is a failed check, not a crashed suite
            checks.append(Check(fn.__name__.removeprefix("check_"), False, repr(exc)))
    return checks
