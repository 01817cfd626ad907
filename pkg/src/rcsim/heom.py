"""Hierarchical equations of motion for the spin-boson model with a Drude-Lorentz bath.

Auxiliary density matrices are indexed by Matsubara occupation multi-indices
n = (n_0 .. n_K) with tier Sum n_m <= Nc; the truncated Matsubara tail is
compensated by the standard Markovian terminator proportional to [Q, [Q, .]].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate

from .core import SpinBosonParams, TimeGrid
from .errors import CapacityError, ConvergenceError, DegeneracyError, IntegrationError
from .operators import pauli

DEFAULT_BUDGET = 300_000  # max number of hierarchy matrices
CONV_TOL = 5e-4
SOLVER_TOL = 1e-8
NC_LIMIT = 40
K_LIMIT = 8


@dataclass(frozen=True)
class HEOMParams:
    """Scenario for the exact solver; alpha_h = pi * alpha."""

    alpha_h: float
    omega_c: float
    beta: float
    K: int = 1
    Nc: int = 4
    epsilon: float = 0.0
    delta: float = 1.0

    def __post_init__(self):
        if self.alpha_h < 0 or self.Nc < 0 or self.K < 0:
            raise ValueError("alpha_h, Nc, K must be nonnegative")
        if self.omega_c <= 0 or self.beta <= 0:
            raise ValueError("omega_c and beta must be positive")

    @classmethod
    def from_spin_boson(cls, params: SpinBosonParams, K: int = 1, Nc: int = 4) -> "HEOMParams":
        return cls(
            alpha_h=math.pi * params.alpha,
            omega_c=params.omega_c,
            beta=params.beta,
            K=K,
            Nc=Nc,
            epsilon=params.epsilon,
            delta=params.delta,
        )

    def with_cutoffs(self, Nc: int, K: int) -> "HEOMParams":
        return HEOMParams(self.alpha_h, self.omega_c, self.beta, K, Nc, self.epsilon, self.delta)

    def hamiltonian(self) -> np.ndarray:
        return 0.5 * self.epsilon * pauli("z") + 0.5 * self.delta * pauli("x")


@dataclass(frozen=True)
class MatsubaraExpansion:
    """Exponential expansion C(t) = Sum c_m exp(-mu_m t) of the bath correlation."""

    c: np.ndarray
    mu: np.ndarray


def matsubara(params: HEOMParams) -> MatsubaraExpansion:
    """Matsubara coefficients for the Drude-Lorentz correlation function.

    mu_0 = omega_c, mu_m = 2 pi m / beta;
    c_0 = (omega_c alpha_h / 2)(cot(beta omega_c / 2) - i),
    c_m = (2 alpha_h omega_c / beta) mu_m / (mu_m^2 - omega_c^2).
    """
    wc, b, aH = params.omega_c, params.beta, params.alpha_h
    mu = np.empty(params.K + 1)
    mu[0] = wc
    m = np.arange(1, params.K + 1)
    mu[1:] = 2.0 * math.pi * m / b
    if np.any(np.abs(mu[1:] ** 2 - wc**2) < 1e-12 * max(wc**2, 1.0)):
        raise DegeneracyError(
            f"beta*omega_c = {b * wc} hits a Matsubara pole 2*pi*m within K={params.K}"
        )
    c = np.empty(params.K + 1, dtype=complex)
    c[0] = 0.5 * wc * aH * (1.0 / math.tan(0.5 * b * wc) - 1j)
    c[1:] = (2.0 * aH * wc / b) * mu[1:] / (mu[1:] ** 2 - wc**2)
    return MatsubaraExpansion(c=c, mu=mu)


def terminator_coefficient(exp: MatsubaraExpansion, params: HEOMParams) -> complex:
    """Residual Matsubara weight compensated by the [Q,[Q,.]] closure; -> 0 as K grows."""
    full = params.alpha_h / (params.beta * params.omega_c) - 0.5j * params.alpha_h
    return full - np.sum(exp.c / exp.mu)


@dataclass
class Hierarchy:
    """Multi-index bookkeeping: flat index order, raising and lowering maps."""

    Nc: int
    K: int
    indices: np.ndarray  # (N, K+1) int
    plus: np.ndarray  # (N, K+1) flat index of n_m + 1, -1 when absent
    minus: np.ndarray  # (N, K+1) flat index of n_m - 1, -1 when absent

    @property
    def size(self) -> int:
        return self.indices.shape[0]


def hierarchy_count(Nc: int, K: int) -> int:
    return math.comb(Nc + K + 1, K + 1)


def enumerate_hierarchy(Nc: int, K: int, budget: int = DEFAULT_BUDGET) -> Hierarchy:
    """All multi-indices with K+1 components summing to <= Nc, graded lex order."""
    if Nc < 0 or K < 0:
        raise ValueError("Nc and K must be nonnegative")
    count = hierarchy_count(Nc, K)
    if count > budget:
        raise CapacityError(
            f"hierarchy with Nc={Nc}, K={K} needs {count} matrices (budget {budget})"
        )

    def compositions(total, parts):
        if parts == 1:
            yield (total,)
            return
        for first in range(total + 1):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    tuples = []
    for total in range(Nc + 1):
        tuples.extend(sorted(compositions(total, K + 1)))
    position = {t: i for i, t in enumerate(tuples)}
    indices = np.array(tuples, dtype=np.int64)
    plus = np.full((count, K + 1), -1, dtype=np.int64)
    minus = np.full((count, K + 1), -1, dtype=np.int64)
    for i, t in enumerate(tuples):
        for m in range(K + 1):
            up = t[:m] + (t[m] + 1,) + t[m + 1 :]
            if sum(up) <= Nc:
                plus[i, m] = position[up]
            if t[m] > 0:
                down = t[:m] + (t[m] - 1,) + t[m + 1 :]
                minus[i, m] = position[down]
    return Hierarchy(Nc=Nc, K=K, indices=indices, plus=plus, minus=minus)


def heom_rhs(
    matrices: np.ndarray,
    hier: Hierarchy,
    exp: MatsubaraExpansion,
    params: HEOMParams,
) -> np.ndarray:
    """Time derivative of every matrix in the hierarchy (stacked (N, 2, 2))."""
    R = matrices
    Q = pauli("z")
    Hs = params.hamiltonian()
    term = terminator_coefficient(exp, params)

    dR = -1j * (Hs @ R - R @ Hs)
    decay = hier.indices @ exp.mu
    dR -= decay[:, None, None] * R
    # terminator: Q = sigma_z so [Q, [Q, R]] = 2(R - Q R Q)
    dR -= term * 2.0 * (R - Q @ R @ Q)
    for m in range(hier.K + 1):
        up = hier.plus[:, m]
        has_up = up >= 0
        if np.any(has_up):
            Rp = R[up[has_up]]
            dR[has_up] -= 1j * (Q @ Rp - Rp @ Q)
        down = hier.minus[:, m]
        has_down = down >= 0
        if np.any(has_down):
            Rm = R[down[has_down]]
            n_m = hier.indices[has_down, m][:, None, None]
            dR[has_down] -= 1j * n_m * (exp.c[m] * (Q @ Rm) - np.conj(exp.c[m]) * (Rm @ Q))
    return dR


def heom_propagate_fixed(
    rho0: np.ndarray,
    grid: TimeGrid,
    params: HEOMParams,
    solver_tol: float = SOLVER_TOL,
    budget: int = DEFAULT_BUDGET,
) -> list[np.ndarray]:
    """Top-matrix trajectory at fixed cutoffs (Nc, K); auxiliaries start at zero."""
    hier = enumerate_hierarchy(params.Nc, params.K, budget=budget)
    exp = matsubara(params)
    N = hier.size
    y0 = np.zeros((N, 2, 2), dtype=complex)
    y0[0] = np.asarray(rho0, dtype=complex)
    ts = grid.as_array()

    def rhs(_t, y):
        return heom_rhs(y.reshape(N, 2, 2), hier, exp, params).reshape(-1)

    sol = scipy.integrate.solve_ivp(
        rhs,
        (ts[0], ts[-1]),
        y0.reshape(-1),
        method="DOP853",
        t_eval=ts,
        rtol=solver_tol,
        atol=solver_tol * 1e-2,
    )
    if not sol.success:
        t_reached = sol.t[-1] if len(sol.t) else ts[0]
        raise IntegrationError(f"HEOM integration failed: {sol.message}", t_reached=t_reached)
    traj = [sol.y[:, i].reshape(N, 2, 2)[0].copy() for i in range(sol.y.shape[1])]
    for t, rho in zip(ts, traj):
        if abs(rho.trace() - 1.0) > 1e-9 or np.max(np.abs(rho - rho.conj().T)) > 1e-9:
            raise IntegrationError(
                f"HEOM system-matrix invariant violated at t={t}", t_reached=t
            )
    return traj


def heom_propagate(
    rho0: np.ndarray,
    grid: TimeGrid,
    params: HEOMParams,
    tol: float = CONV_TOL,
    solver_tol: float = SOLVER_TOL,
    nc_limit: int = NC_LIMIT,
    k_limit: int = K_LIMIT,
    budget: int = DEFAULT_BUDGET,
) -> tuple[list[np.ndarray], dict]:
    """Self-converged trajectory: refine Nc by 2 and K by 1 until rho_11 is stable.

    The tier cutoff is refined first (it usually dominates); the Matsubara
    cutoff is probed only once the tier probe is quiet, since a K probe costs
    roughly Nc/K times the base run.  Convergence requires both probes at the
    final cutoffs to change max_t rho_11 by less than tol.  Returns
    (trajectory, report).
    """
    cache: dict[tuple[int, int], tuple[list[np.ndarray], np.ndarray]] = {}

    def run(nc, k):
        key = (nc, k)
        if key not in cache:
            traj = heom_propagate_fixed(
                rho0, grid, params.with_cutoffs(nc, k), solver_tol=solver_tol, budget=budget
            )
            pops = np.array([r[0, 0].real for r in traj])
            cache[key] = (traj, pops)
        return cache[key]

    nc, k = params.Nc, params.K
    history = []
    _, pops = run(nc, k)
    while True:
        d_nc = None
        if nc + 2 <= nc_limit:
            _, pops_nc = run(nc + 2, k)
            d_nc = float(np.max(np.abs(pops_nc - pops)))
            if d_nc >= tol:
                history.append({"Nc": nc, "K": k, "change_Nc": d_nc, "change_K": None})
                nc, pops = nc + 2, pops_nc
                continue
        d_k = None
        if k + 1 <= k_limit:
            _, pops_k = run(nc, k + 1)
            d_k = float(np.max(np.abs(pops_k - pops)))
            if d_k >= tol:
                history.append({"Nc": nc, "K": k, "change_Nc": d_nc, "change_K": d_k})
                k, pops = k + 1, pops_k
                continue
        history.append({"Nc": nc, "K": k, "change_Nc": d_nc, "change_K": d_k})
        if d_nc is None or d_k is None:
            raise ConvergenceError(
                f"HEOM hit the cutoff limits Nc={nc_limit}, K={k_limit} with an "
                f"unverified refinement direction (history: {history})"
            )
        traj, _ = run(nc, k)
        return traj, {"Nc": nc, "K": k, "history": history}
