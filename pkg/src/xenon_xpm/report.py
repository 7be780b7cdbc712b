"""Run reports shared by the CLI and the acceptance suite."""
from __future__ import annotations

import math
from dataclasses import asdict

from .config import Config, build_sweep, build_system
from .core import interaction_time
from .diagonalization import nonlinear_shift
from .errors import DomainError, XpmError
from .perturbation import evaluate_perturbative, make_scenario, phi_gaussian
from .sweep import divergence_report, find_max_phase, run_sweep

TWO_PI = 2.0 * math.pi


def derived_quantities(cfg: Config) -> dict:
    system = build_system(cfg)
    med, cav, mode = system.medium, system.cavity, system.mode
    return {
        "waist_m": mode.waist,
        "rayleigh_range_m": mode.rayleigh_range,
        "reference_wavelength_m": mode.reference_wavelength,
        "cylinder_volume_m3": mode.cylinder_volume,
        "interaction_time_s": mode.interaction_time,
        "interaction_time_field_decay_s": interaction_time(cav, "field_decay"),
        "interaction_time_energy_decay_s": interaction_time(cav, "energy_decay"),
        "dipole_lower_cm": med.lower.dipole_moment,
        "dipole_upper_cm": med.upper.dipole_moment,
        "field_control_v_per_m": system.field_control,
        "field_signal_v_per_m": system.field_signal,
        "g1_rad_s": system.couplings.g1,
        "g2_rad_s": system.couplings.g2,
        "g3_rad_s": system.couplings.g3,
        "n_total": system.n_total,
        "n_eff": system.n_eff,
    }


def derive_report(cfg: Config) -> dict:
    derived = derived_quantities(cfg)
    warnings = []
    if derived["n_eff"] == 0:
        warnings.append("density is zero: no atoms in the mode, every phase vanishes")
    return {"config": cfg.as_dict(), "derived": derived, "warnings": warnings}


def phase_report(cfg: Config, delta_over_2pi: float, gauss: bool = False) -> tuple[dict, bool]:
    """
    Both methods at one control detuning. Returns the report and whether a
    physics-domain error occurred (the report is still as complete as possible).
    """
    system = build_system(cfg)
    s = make_scenario(system, TWO_PI * delta_over_2pi, TWO_PI * cfg.small_delta_mhz * 1e6,
                      cfg.collective_atoms)
    results, warnings, failed = {"delta_hz": delta_over_2pi}, [], False
    try:
        pert = evaluate_perturbative(s, cfg.validity_threshold, cfg.orientation_in_n1)
        results.update(phi_pert_rad=pert.phase, n1=pert.n1, valid_pert=pert.valid)
        if not pert.valid:
            warnings.append(f"perturbation theory invalid: N1 = {pert.n1:.3g} "
                            f"is not below {cfg.validity_threshold}")
        if gauss:
            results["phi_gauss_rad"] = phi_gaussian(system, s)
    except DomainError as exc:
        failed = True
        warnings.append(f"perturbative: {exc}")
    try:
        diag = nonlinear_shift(s, cfg.overlap_threshold)
        results["diagonalization"] = asdict(diag)
        results["phi_diag_rad"] = diag.phase
    except XpmError as exc:
        failed = True
        warnings.append(f"diagonalization: {exc}")
    report = {"config": cfg.as_dict(), "derived": derived_quantities(cfg),
              "results": results, "warnings": warnings}
    return report, failed


def sweep_summary(cfg: Config, points) -> dict:
    summary = {}
    try:
        delta, phi = find_max_phase(points, cfg.overlap_threshold)
        summary["max_phi_diag"] = {"delta_hz": delta, "phi_rad": phi}
    except XpmError as exc:
        summary["max_phi_diag"] = {"error": str(exc)}
    summary["divergence"] = asdict(divergence_report(points))
    return summary


SENSITIVITY_VARIANTS = {
    "baseline": {},
    "energy_decay_lifetime": {"lifetime_formula": "energy_decay"},
    "normalization_x2": {"normalization_multiplier": 2.0},
    "normalization_x0.5": {"normalization_multiplier": 0.5},
    "collective_total_atoms": {"collective_atoms": "total"},
    "without_g3": {"include_g3": False},
    "sweep_from_1kHz": {"sweep_min_mhz": 1e-3},
    "negative_small_delta": {"small_delta_mhz": -10.0},
}


def convention_sensitivity(cfg: Config, variants=None) -> dict:
    """
    Maximum |phi_diag| over the configured sweep under each documented
    convention change, alongside the perturbative phase where N1 = 1.
    """
    out = {}
    for name, changes in (variants or SENSITIVITY_VARIANTS).items():
        c = cfg.replace(**changes)
        system = build_system(c)
        points = run_sweep(build_sweep(c, system))
        try:
            delta, phi = find_max_phase(points, c.overlap_threshold)
        except XpmError:
            delta = phi = None
        g1 = system.couplings.g1
        n = system.n_eff if c.orientation_in_n1 else system.n_total
        entry = {"max_phi_diag_rad": phi, "at_delta_hz": delta}
        if n > 0 and g1 > 0:
            # Delta where N1 = 1
            d1 = math.sqrt(n) * g1
            s = make_scenario(system, d1, TWO_PI * c.small_delta_mhz * 1e6, c.collective_atoms)
            entry["phi_pert_at_n1_1_rad"] = evaluate_perturbative(s).phase
            entry["delta_hz_at_n1_1"] = d1 / TWO_PI
        out[name] = entry
    return out
