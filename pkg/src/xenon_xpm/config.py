"""
Flat ``key = value`` configuration.

Precedence, lowest first: built-in cavity defaults, the bundled xenon
dataset, the config file, ``--set`` overrides. Units are fixed per key.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from .core import LIFETIME_FORMULAS, CavitySpec, LadderMedium, Transition, derive_system
from .errors import ConfigError
from .sweep import SweepSpec

DATASET = "xenon.conf"


def _float(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("not a finite number")
    return value


def _bool(text):
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError("expected true or false")


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text
    return parse


def _optional_float(text):
    return None if text.strip().lower() in ("", "none") else _float(text)


def _int(text):
    value = float(text)
    if value != int(value):
        raise ValueError("expected an integer")
    return int(value)


# key -> (parser, (check, message))
_positive = (lambda v: v > 0, "must be positive")
_non_negative = (lambda v: v >= 0, "must be non-negative")
_optional_nn = (lambda v: v is None or v >= 0, "must be non-negative")
_any = (lambda v: True, "")
_nonzero = (lambda v: v != 0, "must be nonzero")
_points = (lambda v: 2 <= v <= 100_000, "must be between 2 and 100000")
_unit = (lambda v: 0 < v <= 1, "must be in (0, 1]")

KEYS = {
    "lower_wavelength_nm": (_float, _positive),
    "upper_wavelength_nm": (_float, _positive),
    "lower_einstein_a": (_float, _non_negative),
    "upper_einstein_a": (_float, _non_negative),
    "lower_dipole": (_optional_float, _optional_nn),
    "upper_dipole": (_optional_float, _optional_nn),
    "density_cm3": (_float, _non_negative),
    "mirror_roc_cm": (_float, _positive),
    "mirror_spacing_mm": (_float, _positive),
    "finesse": (_float, _positive),
    "small_delta_mhz": (_float, _nonzero),
    "validity_threshold": (_float, _positive),
    "overlap_threshold": (_float, _unit),
    "lifetime_formula": (_choice(*LIFETIME_FORMULAS), _any),
    "orientation_in_n1": (_bool, _any),
    "collective_atoms": (_choice("reduced", "total"), _any),
    "include_g3": (_bool, _any),
    "per_wavelength_waist": (_bool, _any),
    "normalization_multiplier": (_float, _positive),
    "sweep_min_mhz": (_float, _positive),
    "sweep_max_mhz": (_float, _positive),
    "sweep_points": (_int, _points),
    "sweep_spacing": (_choice("log", "linear"), _any),
    "sweep_gauss": (_bool, _any),
}

CAVITY_DEFAULTS = {
    "lower_dipole": "none",
    "upper_dipole": "none",
    "mirror_roc_cm": "2.5",
    "mirror_spacing_mm": "2.5",
    "finesse": "60000",
    "small_delta_mhz": "10",
    "validity_threshold": "0.1",
    "overlap_threshold": "0.5",
    "lifetime_formula": "field_decay",
    "orientation_in_n1": "true",
    "collective_atoms": "reduced",
    "include_g3": "true",
    "per_wavelength_waist": "false",
    "normalization_multiplier": "1.0",
    "sweep_min_mhz": "1",
    "sweep_max_mhz": "10000",
    "sweep_points": "200",
    "sweep_spacing": "log",
    "sweep_gauss": "false",
}


@dataclass(frozen=True)
class Config:
    lower_wavelength_nm: float
    upper_wavelength_nm: float
    lower_einstein_a: float
    upper_einstein_a: float
    lower_dipole: Optional[float]
    upper_dipole: Optional[float]
    density_cm3: float
    mirror_roc_cm: float
    mirror_spacing_mm: float
    finesse: float
    small_delta_mhz: float
    validity_threshold: float
    overlap_threshold: float
    lifetime_formula: str
    orientation_in_n1: bool
    collective_atoms: str
    include_g3: bool
    per_wavelength_waist: bool
    normalization_multiplier: float
    sweep_min_mhz: float
    sweep_max_mhz: float
    sweep_points: int
    sweep_spacing: str
    sweep_gauss: bool

    def as_dict(self):
        return asdict(self)

    def replace(self, **changes) -> "Config":
        merged = {**self.as_dict(), **changes}
        return _resolve({k: (_render(v), None) for k, v in merged.items()})


def _render(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value) if isinstance(value, float) else str(value)


def parse_lines(text: str, source: str = "<config>") -> list[tuple[str, str, int]]:
    """``key = value`` pairs with their line numbers; ``#`` starts a comment."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}: expected 'key = value', got {raw.strip()!r}",
                              line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        out.append((key, value, lineno))
    return out


def read_dataset(path=None) -> dict[str, str]:
    """Raw key/value pairs of a medium dataset (bundled xenon by default)."""
    if path is None:
        text = resources.files("xenon_xpm").joinpath("data").joinpath(DATASET).read_text("utf-8")
        source = DATASET
    else:
        text = Path(path).read_text("utf-8")
        source = str(path)
    return {k: v for k, v, _ in parse_lines(text, source)}


def dataset_problems(raw: dict[str, str]) -> list[str]:
    """Integrity problems in a medium dataset; empty when it is usable."""
    problems = []
    required = ("lower_wavelength_nm", "lower_einstein_a", "upper_wavelength_nm",
                "upper_einstein_a", "density_cm3")
    for key in required:
        if key not in raw:
            problems.append(f"{key}: missing")
    for key, text in raw.items():
        if key not in KEYS:
            problems.append(f"{key}: unknown key")
            continue
        parser, (check, message) = KEYS[key]
        try:
            value = parser(text)
        except ValueError as exc:
            problems.append(f"{key}: {exc}")
            continue
        if not check(value):
            problems.append(f"{key}: {message}")
    return problems


def _resolve(raw: dict[str, tuple[str, Optional[int]]]) -> Config:
    values = {}
    for key, (text, lineno) in raw.items():
        if key not in KEYS:
            raise ConfigError("unknown key", key=key, line=lineno)
        parser, (check, message) = KEYS[key]
        try:
            value = parser(text)
        except ValueError as exc:
            raise ConfigError(f"cannot parse {text!r}: {exc}", key=key, line=lineno) from None
        if not check(value):
            raise ConfigError(f"{message} (got {text})", key=key, line=lineno)
        values[key] = value
    missing = set(KEYS) - set(values)
    if missing:
        raise ConfigError(f"missing keys: {', '.join(sorted(missing))}")
    cfg = Config(**values)
    if cfg.mirror_spacing_mm / 10.0 >= 2.0 * cfg.mirror_roc_cm:
        raise ConfigError("unstable resonator: spacing must be below twice the mirror ROC",
                          key="mirror_spacing_mm", line=raw["mirror_spacing_mm"][1])
    if cfg.sweep_min_mhz >= cfg.sweep_max_mhz:
        raise ConfigError("sweep minimum must be below the maximum",
                          key="sweep_min_mhz", line=raw["sweep_min_mhz"][1])
    return cfg


def load_config(path=None, overrides: Iterable[str] = ()) -> Config:
    """
    Resolve a configuration file plus ``key=value`` overrides into a
    validated :class:`Config`. ``path=None`` means defaults only.
    """
    raw = {k: (v, None) for k, v in CAVITY_DEFAULTS.items()}
    raw.update({k: (v, None) for k, v in read_dataset().items()})
    if path is not None:
        try:
            text = Path(path).read_text("utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from None
        for key, value, lineno in parse_lines(text, str(path)):
            raw[key] = (value, lineno)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        key, value = (part.strip() for part in item.split("=", 1))
        raw[key] = (value, None)
    return _resolve(raw)


def build_medium(cfg: Config) -> LadderMedium:
    return LadderMedium(
        lower=Transition(cfg.lower_wavelength_nm * 1e-9, cfg.lower_einstein_a, cfg.lower_dipole),
        upper=Transition(cfg.upper_wavelength_nm * 1e-9, cfg.upper_einstein_a, cfg.upper_dipole),
        density=cfg.density_cm3 * 1e6,
    )


def build_cavity(cfg: Config) -> CavitySpec:
    return CavitySpec(cfg.mirror_roc_cm * 1e-2, cfg.mirror_spacing_mm * 1e-3, cfg.finesse)


def build_system(cfg: Config):
    return derive_system(
        build_medium(cfg), build_cavity(cfg),
        lifetime_formula=cfg.lifetime_formula,
        normalization_multiplier=cfg.normalization_multiplier,
        per_wavelength_waist=cfg.per_wavelength_waist,
        include_g3=cfg.include_g3,
    )


def build_sweep(cfg: Config, system=None) -> SweepSpec:
    return SweepSpec(
        system=system if system is not None else build_system(cfg),
        delta_over_2pi_min=cfg.sweep_min_mhz * 1e6,
        delta_over_2pi_max=cfg.sweep_max_mhz * 1e6,
        points=cfg.sweep_points,
        spacing=cfg.sweep_spacing,
        small_delta_over_2pi=cfg.small_delta_mhz * 1e6,
        gauss=cfg.sweep_gauss,
        validity_threshold=cfg.validity_threshold,
        overlap_threshold=cfg.overlap_threshold,
        orientation_in_n1=cfg.orientation_in_n1,
        collective_atoms=cfg.collective_atoms,
    )
