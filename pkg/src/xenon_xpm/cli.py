"""
Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 physics-domain error, 4 I/O error. Human-readable text goes to stderr;
``--json`` puts a machine-readable document on stdout.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .config import build_sweep, build_system, load_config
from .errors import ConfigError, DomainError, XpmError
from .report import convention_sensitivity, derive_report, phase_report, sweep_summary
from .sweep import emit_table, run_sweep
from .validation import run_all

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3, 4


def _err(text=""):
    print(text, file=sys.stderr)


def _emit_json(obj):
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _print_derived(derived):
    rows = [
        ("beam waist", derived["waist_m"] * 1e6, "um"),
        ("Rayleigh range", derived["rayleigh_range_m"] * 1e3, "mm"),
        ("cylinder volume", derived["cylinder_volume_m3"], "m^3"),
        ("interaction time (used)", derived["interaction_time_s"] * 1e9, "ns"),
        ("  field decay 2FL/(pi c)", derived["interaction_time_field_decay_s"] * 1e9, "ns"),
        ("  energy decay FL/(pi c)", derived["interaction_time_energy_decay_s"] * 1e9, "ns"),
        ("dipole, lower transition", derived["dipole_lower_cm"], "C m"),
        ("dipole, upper transition", derived["dipole_upper_cm"], "C m"),
        ("E_avg control", derived["field_control_v_per_m"], "V/m"),
        ("E_avg signal", derived["field_signal_v_per_m"], "V/m"),
        ("g1 (control, g-i)", derived["g1_rad_s"], "rad/s"),
        ("g2 (signal, i-h)", derived["g2_rad_s"], "rad/s"),
        ("g3 (signal, g-i)", derived["g3_rad_s"], "rad/s"),
        ("atoms in cylinder", derived["n_total"], ""),
        ("N_eff (1/3 orientation)", derived["n_eff"], ""),
    ]
    for label, value, unit in rows:
        _err(f"  {label:<26s} {value:12.5g} {unit}")


def cmd_derive(cfg, args):
    report = derive_report(cfg)
    _err("Derived single-photon quantities")
    _print_derived(report["derived"])
    for w in report["warnings"]:
        _err(f"warning: {w}")
    if args.json:
        _emit_json(report)
    return EXIT_OK


def cmd_phase(cfg, args):
    if args.delta_mhz == 0:
        _err("error: resonant control (Delta = 0): the perturbative shift diverges")
        if args.json:
            _emit_json({"error": "resonance", "results": {"delta_hz": 0.0}})
        return EXIT_DOMAIN
    report, failed = phase_report(cfg, args.delta_mhz * 1e6, gauss=args.gauss)
    r = report["results"]
    _err(f"Delta/2pi = {args.delta_mhz:g} MHz, delta/2pi = {cfg.small_delta_mhz:g} MHz")
    if "phi_pert_rad" in r:
        _err(f"  perturbative phase   {r['phi_pert_rad']:.6g} rad")
        _err(f"  N1                   {r['n1']:.6g} (valid: {r['valid_pert']})")
    if "phi_gauss_rad" in r:
        _err(f"  Gaussian-mode phase  {r['phi_gauss_rad']:.6g} rad")
    if "phi_diag_rad" in r:
        _err(f"  diagonalization      {r['phi_diag_rad']:.6g} rad "
             f"(overlap {r['diagonalization']['dressed_overlap']:.4f})")
    for w in report["warnings"]:
        _err(f"warning: {w}")
    if args.json:
        _emit_json(report)
    return EXIT_DOMAIN if failed else EXIT_OK


def cmd_sweep(cfg, args):
    changes = {}
    if args.points is not None:
        changes["sweep_points"] = args.points
    if args.min_mhz is not None:
        changes["sweep_min_mhz"] = args.min_mhz
    if args.max_mhz is not None:
        changes["sweep_max_mhz"] = args.max_mhz
    if args.gauss:
        changes["sweep_gauss"] = True
    if changes:
        cfg = cfg.replace(**changes)
    points = run_sweep(build_sweep(cfg, build_system(cfg)))
    try:
        if args.out == "-":
            sys.stdout.flush()
            emit_table(points, args.format, sys.stdout.buffer)
            sys.stdout.flush()
        else:
            emit_table(points, args.format, args.out)
    except OSError as exc:
        _err(f"error: {exc}")
        return EXIT_IO
    summary = sweep_summary(cfg, points)
    best = summary["max_phi_diag"]
    if "phi_rad" in best:
        _err(f"max |phi_diag| = {abs(best['phi_rad']) * 1e3:.4g} mrad "
             f"(signed {best['phi_rad']:.6g} rad) at Delta/2pi = {best['delta_hz'] / 1e6:.6g} MHz")
    else:
        _err(f"max |phi_diag|: {best['error']}")
    div = summary["divergence"]
    if div["found"]:
        _err(f"methods agree within {div['tolerance']:.0%} for Delta/2pi >= "
             f"{div['delta_hz'] / 1e6:.6g} MHz (N1 = {div['n1']:.3g})")
    else:
        _err(f"methods never agree within {div['tolerance']:.0%} over the whole upper tail "
             f"of the grid (not found)")
    if args.sensitivity:
        _err("convention sensitivity (max |phi_diag| over the sweep, phi_pert where N1 = 1):")
        for name, v in convention_sensitivity(cfg).items():
            phi = v["max_phi_diag_rad"]
            shown = "n/a" if phi is None else f"{phi * 1e3:+.3g} mrad at {v['at_delta_hz'] / 1e6:.4g} MHz"
            pert = v.get("phi_pert_at_n1_1_rad")
            tail = "" if pert is None else f", phi_pert(N1=1) {pert * 1e3:+.3g} mrad"
            _err(f"  {name:<24s} {shown}{tail}")
    return EXIT_OK


def cmd_validate(cfg, args):
    checks = run_all(cfg, args.dataset)
    for c in checks:
        _err(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
    failed = [c.name for c in checks if not c.passed]
    if failed:
        _err(f"validation failed: {', '.join(failed)}")
    if args.json:
        _emit_json([{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks])
    return EXIT_VALIDATION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=os.environ.get("XPM_CONFIG"),
                        help="key = value config file (default: $XPM_CONFIG)")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config key; repeatable")

    parser = argparse.ArgumentParser(
        prog="xenon-xpm",
        description="Single-photon cross-phase modulation in a xenon-filled cavity.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", parents=[common], help="derived cavity and coupling quantities")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("phase", parents=[common], help="both methods at one control detuning")
    p.add_argument("--delta-mhz", type=float, required=True, help="Delta/2pi in MHz")
    p.add_argument("--gauss", action="store_true", help="also integrate over the Gaussian mode")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("sweep", parents=[common], help="detuning sweep to CSV or JSON lines")
    p.add_argument("--out", required=True, help="output path, or - for stdout")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--gauss", action="store_true")
    p.add_argument("--points", type=int)
    p.add_argument("--min-mhz", type=float)
    p.add_argument("--max-mhz", type=float)
    p.add_argument("--sensitivity", action="store_true",
                   help="also report how the maximum phase moves under each convention choice")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", parents=[common], help="run the built-in oracle checks")
    p.add_argument("--dataset", help="medium dataset to check (default: bundled xenon)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.set)
        return args.func(cfg, args)
    except ConfigError as exc:
        _err(f"configuration error: {exc}")
        return EXIT_CONFIG
    except DomainError as exc:
        _err(f"error: {exc}")
        return EXIT_DOMAIN
    except XpmError as exc:
        _err(f"error: {exc}")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
