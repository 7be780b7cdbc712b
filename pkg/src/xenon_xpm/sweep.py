"""Detuning sweeps, method comparison and table output."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, fields
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import CavitySystem
from .diagonalization import DEFAULT_OVERLAP_THRESHOLD, nonlinear_shift
from .errors import ConfigError, DomainError, EmptyResultError, XpmError
from .perturbation import (DEFAULT_VALIDITY_THRESHOLD, evaluate_perturbative,
                           make_scenario, phi_gaussian)

TWO_PI = 2.0 * math.pi
MAX_POINTS = 100_000
COLUMNS = ("delta_hz", "phi_pert_rad", "phi_gauss_rad", "phi_diag_rad",
           "n1", "valid_pert", "dressed_overlap", "error")
AGREEMENT_TOLERANCE = 0.02


@dataclass(frozen=True)
class SweepSpec:
    """Grid of control detunings Delta/2pi [Hz] at fixed two-photon detuning."""
    system: CavitySystem
    delta_over_2pi_min: float = 1e6
    delta_over_2pi_max: float = 1e10
    points: int = 200
    spacing: str = "log"
    small_delta_over_2pi: float = 10e6
    gauss: bool = False
    validity_threshold: float = DEFAULT_VALIDITY_THRESHOLD
    overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD
    orientation_in_n1: bool = True
    collective_atoms: str = "reduced"

    def validate(self):
        if self.spacing not in ("log", "linear"):
            raise ConfigError(f"spacing must be 'log' or 'linear', got {self.spacing!r}",
                              key="sweep_spacing")
        if not (isinstance(self.points, int) and 2 <= self.points <= MAX_POINTS):
            raise ConfigError(f"points must be an integer in [2, {MAX_POINTS}]",
                              key="sweep_points")
        if not self.delta_over_2pi_min < self.delta_over_2pi_max:
            raise ConfigError("sweep minimum must be below the maximum", key="sweep_min_mhz")
        if self.spacing == "log" and not self.delta_over_2pi_min > 0:
            raise ConfigError("log spacing needs a positive minimum", key="sweep_min_mhz")
        if self.small_delta_over_2pi == 0:
            raise ConfigError("two-photon detuning must be nonzero", key="small_delta_mhz")

    def grid(self) -> np.ndarray:
        lo, hi = self.delta_over_2pi_min, self.delta_over_2pi_max
        if self.spacing == "log":
            g = np.geomspace(lo, hi, self.points)
        else:
            g = np.linspace(lo, hi, self.points)
        g[0], g[-1] = lo, hi
        return g


@dataclass(frozen=True)
class PhasePoint:
    delta_hz: float
    phi_pert_rad: Optional[float]
    phi_gauss_rad: Optional[float]
    phi_diag_rad: Optional[float]
    n1: Optional[float]
    valid_pert: Optional[bool]
    dressed_overlap: Optional[float]
    error: Optional[str] = None


def evaluate_point(spec: SweepSpec, delta_over_2pi: float) -> PhasePoint:
    s = make_scenario(spec.system, TWO_PI * delta_over_2pi, TWO_PI * spec.small_delta_over_2pi,
                      spec.collective_atoms)
    errors = []
    phi_pert = n1 = valid = phi_gauss = phi_diag = overlap = None
    try:
        pert = evaluate_perturbative(s, spec.validity_threshold, spec.orientation_in_n1)
        phi_pert, n1, valid = pert.phase, pert.n1, pert.valid
        if spec.gauss:
            phi_gauss = phi_gaussian(spec.system, s)
    except DomainError:
        errors.append("resonance")
    except XpmError:
        errors.append("quadrature")
    try:
        result = nonlinear_shift(s, spec.overlap_threshold)
        phi_diag, overlap = result.phase, result.dressed_overlap
    except XpmError as exc:
        overlap = getattr(exc, "overlap", None)
        errors.append("strong_mixing" if overlap is not None else "eigensolver")
    return PhasePoint(delta_over_2pi, phi_pert, phi_gauss, phi_diag, n1, valid, overlap,
                      ";".join(errors) or None)


def run_sweep(spec: SweepSpec) -> list[PhasePoint]:
    spec.validate()
    return [evaluate_point(spec, float(d)) for d in spec.grid()]


def find_max_phase(points: Sequence[PhasePoint],
                   overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD):
    """(Delta/2pi, phi_diag) of the point with the largest |phi_diag|."""
    best = None
    for p in points:
        if p.phi_diag_rad is None or p.dressed_overlap is None:
            continue
        if p.dressed_overlap < overlap_threshold:
            continue
        if best is None or abs(p.phi_diag_rad) > abs(best.phi_diag_rad):
            best = p
    if best is None:
        raise EmptyResultError("no sweep point has a usable diagonalization phase")
    return best.delta_hz, best.phi_diag_rad


def relative_disagreement(p: PhasePoint) -> Optional[float]:
    if p.phi_pert_rad is None or p.phi_diag_rad is None or p.phi_diag_rad == 0:
        return None
    return abs(p.phi_pert_rad - p.phi_diag_rad) / abs(p.phi_diag_rad)


@dataclass(frozen=True)
class DivergenceReport:
    found: bool
    delta_hz: Optional[float]
    n1: Optional[float]
    tolerance: float
    worst_disagreement_above: Optional[float]


def divergence_report(points: Sequence[PhasePoint],
                      tolerance: float = AGREEMENT_TOLERANCE) -> DivergenceReport:
    """
    Smallest Delta above which the two methods agree to ``tolerance`` at every
    grid point. Errored points count as disagreement.
    """
    if not points:
        raise EmptyResultError("divergence report needs at least one point")
    ordered = sorted(points, key=lambda p: p.delta_hz)
    onset = None
    for p in reversed(ordered):
        rel = relative_disagreement(p)
        if rel is None or rel > tolerance:
            break
        onset = p
    worst = None
    if onset is None:
        rels = [r for r in map(relative_disagreement, ordered) if r is not None]
        worst = max(rels) if rels else None
        return DivergenceReport(False, None, None, tolerance, worst)
    return DivergenceReport(True, onset.delta_hz, onset.n1, tolerance, worst)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    return f"{value:.17g}"


def emit_table(points: Iterable[PhasePoint], fmt: str = "csv", destination=None) -> bytes:
    """
    Serialise ``points`` as CSV or JSON lines. ``destination`` may be a path,
    a binary file object, or None (bytes are only returned).
    """
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for p in points:
            writer.writerow([_fmt(getattr(p, c)) for c in COLUMNS])
    elif fmt == "jsonl":
        for p in points:
            buf.write(json.dumps({c: getattr(p, c) for c in COLUMNS}, allow_nan=False) + "\n")
    else:
        raise ConfigError(f"unknown table format {fmt!r}", key="format")
    data = buf.getvalue().encode("utf-8")
    if destination is None:
        return data
    if hasattr(destination, "write"):
        destination.write(data)
        return data
    try:
        with open(destination, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write table: {exc.strerror}", str(destination)) from exc
    return data


def _parse_field(name, text):
    if text == "":
        return None
    if name == "valid_pert":
        return text == "true"
    if name == "error":
        return text
    return float(text)


def parse_table(data, fmt: str = "csv") -> list[PhasePoint]:
    """Inverse of :func:`emit_table`."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    names = [f.name for f in fields(PhasePoint)]
    out = []
    if fmt == "csv":
        rows = list(csv.reader(io.StringIO(data)))
        if not rows or tuple(rows[0]) != COLUMNS:
            raise ValueError("missing or malformed CSV header")
        for row in rows[1:]:
            values = dict(zip(COLUMNS, row))
            out.append(PhasePoint(**{n: _parse_field(n, values[n]) for n in names}))
    elif fmt == "jsonl":
        for line in data.splitlines():
            if line.strip():
                obj = json.loads(line)
                out.append(PhasePoint(**{n: obj[n] for n in names}))
    else:
        raise ValueError(f"unknown table format {fmt!r}")
    return out
