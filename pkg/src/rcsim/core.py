"""Parameter records, spectral densities, and time grids.

All energies are expressed in units of the tunneling matrix element
(delta = 1 internally); inverse energies in its reciprocal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SpinBosonParams:
    """Physical scenario for the two-level system coupled to a Drude-Lorentz bath.

    epsilon : bias of the two-level system
    delta   : tunneling element, sets the energy scale (conventionally 1)
    alpha   : dimensionless system-bath coupling strength
    omega_c : bath cutoff frequency
    beta    : inverse temperature
    """

    epsilon: float
    delta: float = 1.0
    alpha: float = 0.0
    omega_c: float = 0.05
    beta: float = 1.0

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if not self.omega_c > 0:
            raise ValueError(f"omega_c must be positive, got {self.omega_c}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")

    @property
    def eta(self) -> float:
        """Bare TLS splitting sqrt(epsilon^2 + delta^2)."""
        return math.hypot(self.epsilon, self.delta)


@dataclass(frozen=True)
class MappedParams:
    """Reaction-coordinate representation of a spin-boson scenario.

    lam   : TLS-RC coupling strength
    Omega : RC frequency
    gamma : dimensionless residual-bath coupling
    M     : RC truncation dimension (None until chosen by convergence)
    """

    lam: float
    Omega: float
    gamma: float
    M: int | None = None

    def __post_init__(self):
        if self.Omega <= 0:
            raise ValueError(f"Omega must be positive, got {self.Omega}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        if self.M is not None and self.M < 1:
            raise ValueError(f"M must be >= 1, got {self.M}")

    def with_truncation(self, M: int) -> "MappedParams":
        return MappedParams(self.lam, self.Omega, self.gamma, M)


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing output times starting at 0."""

    points: tuple

    def __post_init__(self):
        pts = tuple(float(t) for t in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) == 0:
            raise ValueError("time grid must be nonempty")
        if pts[0] != 0.0:
            raise ValueError("time grid must start at 0")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("time grid must be strictly increasing")

    @classmethod
    def linspace(cls, t_max: float, samples: int) -> "TimeGrid":
        if t_max <= 0 or samples < 2:
            raise ValueError("need t_max > 0 and samples >= 2")
        return cls(tuple(np.linspace(0.0, t_max, samples)))

    @property
    def t_max(self) -> float:
        return self.points[-1]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points)


def j_sb(omega: float, params: SpinBosonParams) -> float:
    """Drude-Lorentz spectral density alpha*omega_c*omega / (omega^2 + omega_c^2).

    Defined on omega >= 0 only; consumers apply the odd extension themselves.
    """
    if omega < 0:
        raise ValueError(f"j_sb requires omega >= 0, got {omega}")
    return params.alpha * params.omega_c * omega / (omega**2 + params.omega_c**2)


def j_rc(omega: float, gamma: float) -> float:
    """Ohmic residual-bath spectral density gamma*omega (infinite cutoff)."""
    if omega < 0:
        raise ValueError(f"j_rc requires omega >= 0, got {omega}")
    return gamma * omega
