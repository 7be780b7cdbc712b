"""Single-photon cross-phase modulation in a cavity filled with metastable xenon."""
from .core import (CODATA, CavitySpec, CavitySystem, CouplingSet, LadderMedium,
                   PhysicalConstants, Transition, derive_system)
from .diagonalization import nonlinear_shift
from .errors import (ConfigError, DomainError, EmptyResultError, NumericalError,
                     StrongMixingError, XpmError)
from .perturbation import Scenario, evaluate_perturbative, make_scenario, phi_gaussian, phi_uniform

__version__ = "0.1.0"
