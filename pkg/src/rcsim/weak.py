"""Secular Born-Markov reference solver for the bare TLS.

Jump operators live in the eigenbasis of H_S, so the fixed point is exactly
the canonical Gibbs state of H_S regardless of coupling strength.
"""
from __future__ import annotations

import math

import numpy as np

from . import evolution
from .core import SpinBosonParams, TimeGrid, j_sb
from .evolution import Superoperator, spre, spost
from .operators import eig_hermitian, pauli


def hamiltonian_tls(params: SpinBosonParams) -> np.ndarray:
    return 0.5 * params.epsilon * pauli("z") + 0.5 * params.delta * pauli("x")


def weak_rates(params: SpinBosonParams) -> tuple[float, float, float]:
    """(relaxation, excitation, pure-dephasing) golden-rule rates.

    Mixing angle theta with tan(theta) = delta/epsilon gives sin^2 =
    delta^2/eta^2, cos^2 = epsilon^2/eta^2.  The zero-frequency dephasing
    limit J(w) coth(beta w / 2) -> 2 alpha / (beta omega_c) is evaluated
    analytically from the Drude-Lorentz form.
    """
    eta = params.eta
    sin2 = (params.delta / eta) ** 2
    cos2 = (params.epsilon / eta) ** 2
    J_eta = j_sb(eta, params)
    n_eta = 1.0 / math.expm1(params.beta * eta)
    gamma_down = 2.0 * math.pi * sin2 * J_eta * (n_eta + 1.0)
    gamma_up = 2.0 * math.pi * sin2 * J_eta * n_eta
    gamma_phi = 4.0 * math.pi * cos2 * params.alpha / (params.beta * params.omega_c)
    return gamma_down, gamma_up, gamma_phi


def build_weak_generator(params: SpinBosonParams) -> Superoperator:
    """Lindblad generator (4x4 superoperator) in the site basis."""
    Hs = hamiltonian_tls(params)
    eig = eig_hermitian(Hs)
    g = eig.vectors[:, 0:1]  # ground eigenvector (ascending order)
    e = eig.vectors[:, 1:2]
    lower = g @ e.conj().T
    raise_ = e @ g.conj().T
    sz_eig = g @ g.conj().T - e @ e.conj().T

    gamma_down, gamma_up, gamma_phi = weak_rates(params)
    L = -1j * (spre(Hs) - spost(Hs))
    for rate, op in ((gamma_down, lower), (gamma_up, raise_), (gamma_phi / 2.0, sz_eig)):
        if rate == 0.0:
            continue
        opd = op.conj().T
        L += rate * (
            spre(op) @ spost(opd)
            - 0.5 * (spre(opd @ op) + spost(opd @ op))
        )
    return Superoperator(dim=2, matrix=L)


def weak_propagate(
    L: Superoperator,
    rho0: np.ndarray,
    grid: TimeGrid,
    tol: float = evolution.DEFAULT_TOL,
    method: str = "adaptive",
) -> list[np.ndarray]:
    return evolution.propagate(L, rho0, grid, tol=tol, method=method)


def weak_steady_state(L: Superoperator) -> np.ndarray:
    return evolution.steady_state(L)


def gibbs_tls(params: SpinBosonParams) -> np.ndarray:
    """Canonical Gibbs state of H_S (the dash-dot reference line)."""
    eig = eig_hermitian(hamiltonian_tls(params))
    w = np.exp(-params.beta * (eig.values - eig.values.min()))
    w /= w.sum()
    return (eig.vectors * w) @ eig.vectors.conj().T
