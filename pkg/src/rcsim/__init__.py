"""Spin-boson simulation toolkit built around a damped collective-mode mapping.

Solvers: a master equation for the TLS plus reaction coordinate (rcme), a
secular weak-coupling reference (weak), and the numerically exact hierarchy
(heom), with non-Gaussianity and mutual-information diagnostics (measures).
"""

__version__ = "0.1.0"

from .core import MappedParams, SpinBosonParams, TimeGrid, j_rc, j_sb
from .errors import (
    CapacityError,
    ConvergenceError,
    DegeneracyError,
    IntegrationError,
    InvalidMomentsError,
    RcsimError,
    ValidationError,
)
from .mapping import map_to_rc, reconstruct_j_sb

__all__ = [
    "__version__",
    "SpinBosonParams",
    "MappedParams",
    "TimeGrid",
    "j_sb",
    "j_rc",
    "map_to_rc",
    "reconstruct_j_sb",
    "RcsimError",
    "ValidationError",
    "DegeneracyError",
    "ConvergenceError",
    "CapacityError",
    "IntegrationError",
    "InvalidMomentsError",
]
