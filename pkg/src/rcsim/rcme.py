"""Master equation for the TLS-RC composite damped by the residual Ohmic bath.

The generator is
    d rho/dt = -i[H0, rho] - [A, [chi, rho]] + [A, {Xi, rho}],
with A = a + a^dag and the rate operators evaluated in closed form in the
eigenbasis of H0 (Lamb-shift imaginary parts dropped).  The counter term is
excluded from H0: its contribution is cancelled by the principal-value part
of the bath integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import evolution
from .core import MappedParams, SpinBosonParams, TimeGrid
from .errors import ConvergenceError
from .evolution import Superoperator, spre, spost
from .operators import EigenDecomposition, annihilator, eig_hermitian, pauli, tensor, ptrace_matrix

HERM_STRUCT_TOL = 1e-12
DEGENERACY_CUT = 1e-12


@dataclass
class RateOperators:
    """chi (Hermitian) and Xi (anti-Hermitian) rate operators in the product basis."""

    chi: np.ndarray
    xi: np.ndarray
    xis: np.ndarray  # Bohr frequency matrix xi_jk = phi_j - phi_k


def build_h0(mapped: MappedParams, params: SpinBosonParams, M: int) -> np.ndarray:
    """TLS-RC Hamiltonian on the 2M-dimensional product space (no counter term)."""
    a = annihilator(M)
    A = a + a.conj().T
    n = a.conj().T @ a
    I2 = np.eye(2)
    IM = np.eye(M)
    Hs = 0.5 * params.epsilon * pauli("z") + 0.5 * params.delta * pauli("x")
    return (
        tensor(Hs, IM)
        + mapped.lam * tensor(pauli("z"), A)
        + mapped.Omega * tensor(I2, n)
    )


def lifted_position(M: int) -> np.ndarray:
    """A = a + a^dag on the product space (identity on the TLS factor)."""
    a = annihilator(M)
    return tensor(np.eye(2), a + a.conj().T)


def build_rate_operators(
    h0: EigenDecomposition, gamma: float, beta: float, M: int
) -> RateOperators:
    """Closed-form chi and Xi for the Ohmic residual bath.

    chi_jk = (pi/2) * gamma * xi_jk * coth(beta xi_jk / 2) * A_jk, with the
    degenerate limit (pi/2)(2 gamma / beta) A_jk; Xi_jk = (pi/2) gamma xi_jk A_jk.
    """
    V = h0.vectors
    phi = h0.values
    A = lifted_position(M)
    A_eig = V.conj().T @ A @ V
    xis = phi[:, None] - phi[None, :]

    scale = max(1.0, float(np.max(np.abs(xis))))
    degenerate = np.abs(xis) < DEGENERACY_CUT * scale
    x = np.where(degenerate, 1.0, xis)
    coef_chi = np.where(
        degenerate,
        (math.pi / 2.0) * (2.0 * gamma / beta),
        (math.pi / 2.0) * gamma * x / np.tanh(beta * x / 2.0),
    )
    coef_xi = np.where(degenerate, 0.0, (math.pi / 2.0) * gamma * xis)

    chi = V @ (coef_chi * A_eig) @ V.conj().T
    xi = V @ (coef_xi * A_eig) @ V.conj().T
    return RateOperators(chi=chi, xi=xi, xis=xis)


def build_liouvillian(h0: np.ndarray, rates: RateOperators) -> Superoperator:
    """Generator of the master equation as a superoperator.

    Trace-annihilating and Hermiticity-preserving by construction (chi
    Hermitian, Xi anti-Hermitian).
    """
    d = h0.shape[0]
    if rates.chi.shape != (d, d) or rates.xi.shape != (d, d):
        raise ValueError(
            f"rate operator dimensions {rates.chi.shape} incompatible with H0 dim {d}"
        )
    if d % 2 != 0:
        raise ValueError(f"product-space dimension {d} is not 2M")
    H = np.asarray(h0, dtype=complex)
    chi, xi = rates.chi, rates.xi
    A = lifted_position(d // 2)

    def apply_fn(rho):
        comm_chi = chi @ rho - rho @ chi
        anti_xi = xi @ rho + rho @ xi
        inner = comm_chi - anti_xi
        return -1j * (H @ rho - rho @ H) - (A @ inner - inner @ A)

    def builder():
        CA = spre(A) - spost(A)
        L = -1j * (spre(H) - spost(H))
        L -= CA @ (spre(chi) - spost(chi))
        L += CA @ (spre(xi) + spost(xi))
        return L

    return Superoperator(dim=d, apply_fn=apply_fn, builder=builder)


def build_generator(mapped: MappedParams, params: SpinBosonParams, M: int) -> Superoperator:
    """Convenience: H0 -> eigendecomposition -> rates -> generator."""
    h0 = build_h0(mapped, params, M)
    rates = build_rate_operators(eig_hermitian(h0), mapped.gamma, params.beta, M)
    return build_liouvillian(h0, rates)


def thermal_rc_state(Omega: float, beta: float, M: int) -> np.ndarray:
    """Gibbs state of the bare RC mode, truncated to M levels."""
    w = np.exp(-beta * Omega * np.arange(M))
    return np.diag(w / w.sum()).astype(complex)


def initial_state(mapped: MappedParams, params: SpinBosonParams, M: int) -> np.ndarray:
    """TLS in |1><1|, RC thermal at the bath temperature, uncorrelated."""
    tls = np.zeros((2, 2), dtype=complex)
    tls[0, 0] = 1.0
    return tensor(tls, thermal_rc_state(mapped.Omega, params.beta, M))


def population_site1(rho: np.ndarray) -> float:
    """TLS population <1|tr_RC rho|1>."""
    return float(ptrace_matrix(rho, "TLS")[0, 0].real)


def propagate(
    L: Superoperator,
    rho0: np.ndarray,
    grid: TimeGrid,
    tol: float = evolution.DEFAULT_TOL,
    method: str = "adaptive",
) -> list[np.ndarray]:
    """Trajectory of the composite state at the grid points."""
    return evolution.propagate(L, rho0, grid, tol=tol, method=method)


def steady_state(L: Superoperator) -> np.ndarray:
    """Unique fixed point via singular decomposition of the dense generator."""
    return evolution.steady_state(L)


def converge_truncation(
    evaluate,
    tol: float = 1e-3,
    M_start: int = 4,
    M_max: int = 256,
):
    """First M in the doubling sequence whose observable is stable under halving.

    evaluate(M) must return a scalar or array observable; convergence means
    the max absolute change on the doubling step M -> 2M drops below tol,
    and the finer truncation 2M (already computed) is returned along with a
    record of (M, change-on-doubling) pairs.
    """
    record = []
    M = M_start
    obs = np.atleast_1d(np.asarray(evaluate(M), dtype=float))
    while M <= M_max // 2:
        obs_next = np.atleast_1d(np.asarray(evaluate(2 * M), dtype=float))
        change = float(np.max(np.abs(obs_next - obs)))
        record.append((M, change))
        if change < tol:
            return 2 * M, record
        M *= 2
        obs = obs_next
    raise ConvergenceError(
        f"RC truncation did not converge by M={M_max} (record: {record})"
    )


def population_observable(
    mapped: MappedParams,
    params: SpinBosonParams,
    grid: TimeGrid,
    solver_tol: float = evolution.DEFAULT_TOL,
):
    """Default convergence observable: site-1 population along the trajectory."""

    def evaluate(M):
        L = build_generator(mapped, params, M)
        rho0 = initial_state(mapped, params, M)
        traj = propagate(L, rho0, grid, tol=solver_tol)
        return np.array([population_site1(r) for r in traj])

    return evaluate
