"""
Physical constants, transitions, cavity geometry and single-photon quantities.

Everything here is a pure function of its inputs. Frequencies are angular
(rad/s) and all lengths are SI metres; unit conversions from the config file
happen in :mod:`xenon_xpm.config`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError

LIFETIME_FORMULAS = ("field_decay", "energy_decay")


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.054571817e-34
    epsilon0: float = 8.8541878128e-12
    c: float = 2.99792458e8

    def __post_init__(self):
        for name in ("hbar", "epsilon0", "c"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")


CODATA = PhysicalConstants()


def angular_frequency(wavelength: float, const: PhysicalConstants = CODATA) -> float:
    if not wavelength > 0:
        raise DomainError(f"wavelength must be positive, got {wavelength!r}")
    return 2.0 * math.pi * const.c / wavelength


def dipole_from_einstein_a(wavelength: float, einstein_a: float,
                           const: PhysicalConstants = CODATA) -> float:
    """
    Transition dipole moment from the spontaneous emission rate.

    mu = sqrt(3 pi eps0 hbar c^3 A / omega^3)

    Parameters
    ----------
    wavelength : float
        Vacuum wavelength [m].
    einstein_a : float
        Einstein A coefficient [1/s].

    Returns
    -------
    float
        Dipole moment [C m].
    """
    omega = angular_frequency(wavelength, const)
    if einstein_a < 0:
        raise DomainError(f"Einstein A must be non-negative, got {einstein_a!r}")
    return math.sqrt(3.0 * math.pi * const.epsilon0 * const.hbar * const.c**3
                     * einstein_a / omega**3)


def einstein_a_from_dipole(wavelength: float, dipole: float,
                           const: PhysicalConstants = CODATA) -> float:
    """Inverse of :func:`dipole_from_einstein_a`."""
    omega = angular_frequency(wavelength, const)
    if dipole < 0:
        raise DomainError(f"dipole moment must be non-negative, got {dipole!r}")
    return omega**3 * dipole**2 / (3.0 * math.pi * const.epsilon0 * const.hbar * const.c**3)


@dataclass(frozen=True)
class Transition:
    """
    One dipole transition. Give either ``einstein_a`` or ``dipole_override``;
    the other is derived.
    """
    wavelength: float
    einstein_a: float | None = None
    dipole_override: float | None = None
    const: PhysicalConstants = field(default=CODATA, repr=False)

    def __post_init__(self):
        if not self.wavelength > 0:
            raise DomainError(f"wavelength must be positive, got {self.wavelength!r}")
        if self.einstein_a is None and self.dipole_override is None:
            raise DomainError("transition needs an Einstein A coefficient or a dipole moment")
        if self.einstein_a is not None and self.einstein_a < 0:
            raise DomainError(f"Einstein A must be non-negative, got {self.einstein_a!r}")
        if self.dipole_override is not None and self.dipole_override < 0:
            raise DomainError(f"dipole moment must be non-negative, got {self.dipole_override!r}")

    @property
    def angular_frequency(self) -> float:
        return angular_frequency(self.wavelength, self.const)

    @property
    def dipole_moment(self) -> float:
        if self.dipole_override is not None:
            return self.dipole_override
        return dipole_from_einstein_a(self.wavelength, self.einstein_a, self.const)


@dataclass(frozen=True)
class LadderMedium:
    """|g> -> |i> (lower, control) and |i> -> |h> (upper, signal); density in atoms/m^3."""
    lower: Transition
    upper: Transition
    density: float

    def __post_init__(self):
        if self.density < 0:
            raise DomainError(f"density must be non-negative, got {self.density!r}")

    @property
    def splitting(self) -> float:
        """omega_ig - omega_hi [rad/s]."""
        return self.lower.angular_frequency - self.upper.angular_frequency

    @property
    def mean_wavelength(self) -> float:
        return 0.5 * (self.lower.wavelength + self.upper.wavelength)


@dataclass(frozen=True)
class CavitySpec:
    mirror_radius_of_curvature: float
    mirror_spacing: float
    finesse: float

    def __post_init__(self):
        R, L = self.mirror_radius_of_curvature, self.mirror_spacing
        if not self.finesse > 0:
            raise DomainError(f"finesse must be positive, got {self.finesse!r}")
        if not (R > 0 and 0 < L < 2 * R):
            raise DomainError(
                f"unstable resonator: need 0 < spacing < 2*ROC, got L={L!r}, R={R!r}")

    @property
    def g_parameter(self) -> float:
        return 1.0 - self.mirror_spacing / self.mirror_radius_of_curvature


@dataclass(frozen=True)
class CavityMode:
    waist: float
    rayleigh_range: float
    cylinder_volume: float
    interaction_time: float
    reference_wavelength: float


@dataclass(frozen=True)
class CouplingSet:
    """Coupling rates (|m|/hbar) in rad/s.

    g1: control on |g>-|i>, g2: signal on |i>-|h>, g3: signal on |g>-|i>.
    """
    g1: float
    g2: float
    g3: float

    def __post_init__(self):
        if min(self.g1, self.g2, self.g3) < 0:
            raise DomainError("couplings must be non-negative")


def beam_waist(spec: CavitySpec, wavelength: float) -> float:
    """
    Waist of the TEM00 mode of a symmetric two-mirror resonator.

    w0^2 = (L lam / 2 pi) sqrt((1 + g) / (1 - g)),  g = 1 - L/R
    """
    if not wavelength > 0:
        raise DomainError(f"wavelength must be positive, got {wavelength!r}")
    g = spec.g_parameter
    if abs(g) >= 1:
        raise DomainError(f"unstable resonator geometry (g = {g!r})")
    L = spec.mirror_spacing
    return math.sqrt(L * wavelength / (2.0 * math.pi) * math.sqrt((1.0 + g) / (1.0 - g)))


def interaction_time(spec: CavitySpec, formula: str = "field_decay",
                     const: PhysicalConstants = CODATA) -> float:
    """Photon storage time: 2FL/(pi c) for the field, FL/(pi c) for the energy."""
    base = spec.finesse * spec.mirror_spacing / (math.pi * const.c)
    if formula == "field_decay":
        return 2.0 * base
    if formula == "energy_decay":
        return base
    raise DomainError(f"unknown lifetime formula {formula!r}; expected one of {LIFETIME_FORMULAS}")


def mode_volume_cylinder(waist: float, spacing: float) -> float:
    if waist < 0 or spacing < 0:
        raise DomainError("waist and spacing must be non-negative")
    return math.pi * waist**2 * spacing


def single_photon_field(omega: float, volume: float, multiplier: float = 1.0,
                        const: PhysicalConstants = CODATA) -> float:
    """
    Average single-photon field amplitude, E^2 = multiplier * hbar omega / (2 eps0 V).

    ``multiplier`` scales the energy normalisation and exists for sensitivity
    studies; 1.0 is the standing-wave convention.
    """
    if not (omega > 0 and volume > 0):
        raise DomainError("angular frequency and volume must be positive")
    if not multiplier > 0:
        raise DomainError(f"normalization multiplier must be positive, got {multiplier!r}")
    return math.sqrt(multiplier * const.hbar * omega / (2.0 * const.epsilon0 * volume))


def coupling_rate(dipole: float, field_amplitude: float,
                  const: PhysicalConstants = CODATA) -> float:
    if dipole < 0 or field_amplitude < 0:
        raise DomainError("dipole and field must be non-negative")
    return dipole * field_amplitude / const.hbar


def effective_atom_number(density: float, volume: float) -> float:
    """Atoms in the mode volume, reduced by 3 for orientation averaging."""
    if density < 0 or volume < 0:
        raise DomainError("density and volume must be non-negative")
    return density * volume / 3.0


def cavity_mode(spec: CavitySpec, wavelength: float, lifetime_formula: str = "field_decay",
                const: PhysicalConstants = CODATA) -> CavityMode:
    w0 = beam_waist(spec, wavelength)
    return CavityMode(
        waist=w0,
        rayleigh_range=math.pi * w0**2 / wavelength,
        cylinder_volume=mode_volume_cylinder(w0, spec.mirror_spacing),
        interaction_time=interaction_time(spec, lifetime_formula, const),
        reference_wavelength=wavelength,
    )


@dataclass(frozen=True)
class CavitySystem:
    """A medium in a cavity plus every derived single-photon quantity."""
    medium: LadderMedium
    cavity: CavitySpec
    mode: CavityMode
    field_control: float
    field_signal: float
    couplings: CouplingSet
    n_total: float
    n_eff: float
    normalization_multiplier: float = 1.0
    const: PhysicalConstants = field(default=CODATA, repr=False)


def derive_system(medium: LadderMedium, cavity: CavitySpec, *,
                  lifetime_formula: str = "field_decay",
                  normalization_multiplier: float = 1.0,
                  per_wavelength_waist: bool = False,
                  include_g3: bool = True,
                  const: PhysicalConstants = CODATA) -> CavitySystem:
    """
    Assemble all single-photon quantities for ``medium`` inside ``cavity``.

    The shared cylinder is computed at the mean of the two wavelengths. With
    ``per_wavelength_waist`` each field's amplitude uses a volume built from
    the waist at its own wavelength instead; the atom count still uses the
    shared cylinder.
    """
    mode = cavity_mode(cavity, medium.mean_wavelength, lifetime_formula, const)
    w_c, w_s = medium.lower.angular_frequency, medium.upper.angular_frequency
    if per_wavelength_waist:
        L = cavity.mirror_spacing
        v_c = mode_volume_cylinder(beam_waist(cavity, medium.lower.wavelength), L)
        v_s = mode_volume_cylinder(beam_waist(cavity, medium.upper.wavelength), L)
    else:
        v_c = v_s = mode.cylinder_volume
    e_c = single_photon_field(w_c, v_c, normalization_multiplier, const)
    e_s = single_photon_field(w_s, v_s, normalization_multiplier, const)
    mu_lower, mu_upper = medium.lower.dipole_moment, medium.upper.dipole_moment
    couplings = CouplingSet(
        g1=coupling_rate(mu_lower, e_c, const),
        g2=coupling_rate(mu_upper, e_s, const),
        # the signal photon also drives |g>-|i>, far from resonance
        g3=coupling_rate(mu_lower, e_s, const) if include_g3 else 0.0,
    )
    n_total = medium.density * mode.cylinder_volume
    return CavitySystem(
        medium=medium,
        cavity=cavity,
        mode=mode,
        field_control=e_c,
        field_signal=e_s,
        couplings=couplings,
        n_total=n_total,
        n_eff=effective_atom_number(medium.density, mode.cylinder_volume),
        normalization_multiplier=normalization_multiplier,
        const=const,
    )
