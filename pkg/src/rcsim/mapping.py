"""Conversion between spin-boson and reaction-coordinate parameters.

The Drude-Lorentz bath is traded for a single harmonic mode (frequency Omega,
coupling lam) damped by an Ohmic residual bath (coupling gamma) through
    omega_c = Omega / (2 pi gamma),    alpha = 2 lam^2 / (pi Omega),
valid when omega_c << Omega.
"""
from __future__ import annotations

import math

from .core import MappedParams, SpinBosonParams

MIN_RATIO = 10.0
DEFAULT_RATIO = 100.0


def map_to_rc(params: SpinBosonParams, ratio: float = DEFAULT_RATIO) -> MappedParams:
    """Build reaction-coordinate parameters with Omega = ratio * omega_c.

    ratio must be >= 10 so that the mapped spectral density actually
    reproduces the Drude-Lorentz form (omega_c << Omega).
    """
    if ratio < MIN_RATIO:
        raise ValueError(
            f"Omega/omega_c ratio {ratio} violates the mapping validity "
            f"condition omega_c << Omega (need ratio >= {MIN_RATIO})"
        )
    Omega = ratio * params.omega_c
    gamma = ratio / (2.0 * math.pi)
    lam = math.sqrt(math.pi * params.alpha * Omega / 2.0)
    return MappedParams(lam=lam, Omega=Omega, gamma=gamma)


def reconstruct_j_sb(mapped: MappedParams, omega: float) -> float:
    """Spin-boson spectral density implied by the damped-mode representation."""
    if omega < 0:
        raise ValueError(f"reconstruct_j_sb requires omega >= 0, got {omega}")
    lam, Omega, gamma = mapped.lam, mapped.Omega, mapped.gamma
    num = 4.0 * gamma * omega * Omega**2 * lam**2
    den = (Omega**2 - omega**2) ** 2 + (2.0 * math.pi * gamma * Omega * omega) ** 2
    return num / den
