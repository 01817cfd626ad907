"""Generic propagation and steady-state extraction for linear generators.

Density matrices are vectorized row-major, so vec(A X B) = (A kron B^T) vec(X).
"""
from __future__ import annotations

import numpy as np
import scipy.integrate
import scipy.linalg

from .core import TimeGrid
from .errors import DegeneracyError, IntegrationError

DEFAULT_TOL = 1e-8
TRAJ_TRACE_TOL = 1e-9
TRAJ_HERM_TOL = 1e-9


def spre(A: np.ndarray) -> np.ndarray:
    d = A.shape[0]
    return np.kron(A, np.eye(d))


def spost(A: np.ndarray) -> np.ndarray:
    d = A.shape[0]
    return np.kron(np.eye(d), A.T)


class Superoperator:
    """Linear map on vectorized density matrices.

    Either a dense matrix or a matrix-form callable (hot path for large
    truncations) can back the map; the dense form is materialized lazily.
    """

    def __init__(self, dim: int, matrix: np.ndarray | None = None, apply_fn=None, builder=None):
        if matrix is None and apply_fn is None and builder is None:
            raise ValueError("need a dense matrix, an apply function, or a builder")
        self.dim = dim
        self._matrix = None if matrix is None else np.asarray(matrix, dtype=complex)
        self._apply_fn = apply_fn
        self._builder = builder

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            self._matrix = self._builder()
        return self._matrix

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Generator action on a dim x dim matrix."""
        if self._apply_fn is not None:
            return self._apply_fn(rho)
        return (self.matrix @ rho.reshape(-1)).reshape(self.dim, self.dim)


def propagate(
    L: Superoperator,
    rho0: np.ndarray,
    grid: TimeGrid,
    tol: float = DEFAULT_TOL,
    method: str = "adaptive",
    check: bool = True,
) -> list[np.ndarray]:
    """Evolve rho0 along the grid under d rho/dt = L(rho).

    method "adaptive" uses an 8th-order adaptive explicit scheme with local
    relative tolerance tol; "expm" uses exact matrix exponentials of the
    dense generator (useful for very long horizons where the generator's
    fast decay rates make explicit stepping wasteful).
    """
    d = L.dim
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (d, d):
        raise ValueError(f"initial state shape {rho0.shape} incompatible with dim {d}")
    ts = grid.as_array()

    if method == "expm":
        traj = [rho0.copy()]
        Lm = L.matrix
        v = rho0.reshape(-1)
        # uniform grids reuse one exponential; generic grids fall back per-step
        propagators: dict[float, np.ndarray] = {}
        for t0, t1 in zip(ts, ts[1:]):
            dt = round(t1 - t0, 12)
            if dt not in propagators:
                propagators[dt] = scipy.linalg.expm(Lm * dt)
            v = propagators[dt] @ v
            traj.append(v.reshape(d, d).copy())
    elif method == "adaptive":
        def rhs(_t, y):
            return L.apply(y.reshape(d, d)).reshape(-1)

        sol = scipy.integrate.solve_ivp(
            rhs,
            (ts[0], ts[-1]),
            rho0.reshape(-1),
            method="DOP853",
            t_eval=ts,
            rtol=tol,
            atol=tol * 1e-2,
        )
        if not sol.success:
            t_reached = sol.t[-1] if len(sol.t) else ts[0]
            raise IntegrationError(f"integration failed: {sol.message}", t_reached=t_reached)
        traj = [sol.y[:, i].reshape(d, d).copy() for i in range(sol.y.shape[1])]
    else:
        raise ValueError(f"unknown propagation method {method!r}")

    if check:
        for t, rho in zip(ts, traj):
            tr_err = abs(rho.trace() - 1.0)
            herm_err = np.max(np.abs(rho - rho.conj().T))
            if tr_err > TRAJ_TRACE_TOL or herm_err > TRAJ_HERM_TOL:
                raise IntegrationError(
                    f"trajectory invariant violated at t={t}: "
                    f"|tr-1|={tr_err:.3e}, hermiticity={herm_err:.3e}",
                    t_reached=t,
                )
    return traj


SVD_DIM_LIMIT = 32  # full singular diagnostics up to a 1024^2 generator


def steady_state(L: Superoperator, kernel_tol: float = 1e-10) -> np.ndarray:
    """Unique unit-trace fixed point of the generator.

    Small systems use a full singular decomposition, which diagnoses a
    non-one-dimensional kernel directly.  Larger systems solve the bordered
    system (trace row replacing one equation) by LU factorization and verify
    the fixed-point residual, which fails loudly for degenerate kernels.
    Raises DegeneracyError when no unique normalizable fixed point exists
    (e.g. for purely unitary dynamics).
    """
    Lm = L.matrix
    if L.dim <= SVD_DIM_LIMIT:
        _, s, vh = np.linalg.svd(Lm)
        if s[-2] < kernel_tol * s[0]:
            raise DegeneracyError(
                f"generator kernel is not one-dimensional "
                f"(second singular value {s[-2]:.3e} vs largest {s[0]:.3e})"
            )
        rho = vh[-1].conj().reshape(L.dim, L.dim)
    else:
        A = Lm.copy()
        trace_row = np.zeros(L.dim * L.dim, dtype=complex)
        trace_row[:: L.dim + 1] = 1.0
        A[0] = trace_row
        b = np.zeros(L.dim * L.dim, dtype=complex)
        b[0] = 1.0
        try:
            x = np.linalg.solve(A, b)
        except np.linalg.LinAlgError as exc:
            raise DegeneracyError(f"bordered fixed-point system is singular: {exc}") from exc
        scale = np.linalg.norm(Lm, np.inf) * np.linalg.norm(x, np.inf)
        residual = np.linalg.norm(Lm @ x, np.inf)
        if not residual <= 1e-6 * scale:
            raise DegeneracyError(
                f"fixed-point residual {residual:.3e} too large relative to {scale:.3e}; "
                "generator kernel is degenerate or ill-conditioned"
            )
        rho = x.reshape(L.dim, L.dim)
    rho = 0.5 * (rho + rho.conj().T)
    tr = rho.trace().real
    if abs(tr) < 1e-12:
        raise DegeneracyError("kernel element is traceless; no normalizable fixed point")
    return rho / tr


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Half the sum of singular values of the difference."""
    return 0.5 * float(np.sum(np.linalg.svd(a - b, compute_uv=False)))
