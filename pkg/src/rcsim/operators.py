"""Dense operator algebra on the TLS, the truncated RC mode, and their product.

Conventions: the TLS is always the left (slow) Kronecker factor; the RC
truncation keeps Fock states 0..M-1; sigma_z = |1><1| - |2><2|.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-9

TLS = "TLS"
RC = "RC"
TLS_RC = "TLSxRC"


def annihilator(M: int) -> np.ndarray:
    """Truncated bosonic annihilation operator on Fock states 0..M-1."""
    if M < 1:
        raise ValueError(f"truncation dimension must be >= 1, got {M}")
    a = np.zeros((M, M), dtype=complex)
    n = np.arange(M - 1)
    a[n, n + 1] = np.sqrt(n + 1)
    return a


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(which: str) -> np.ndarray:
    """Pauli matrix in the basis {|1>, |2>} with sigma_z = diag(1, -1)."""
    try:
        return _PAULI[which].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli label {which!r}") from None


def tensor(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kronecker product with the left argument as the slow factor."""
    return np.kron(A, B)


@dataclass
class DensityMatrix:
    """Hermitian, unit-trace state on a labeled Hilbert space.

    positivity_tol is relaxed for master-equation output that is not of
    Lindblad form and may acquire slightly negative eigenvalues.
    """

    entries: np.ndarray
    space_label: str
    positivity_tol: float = POSITIVITY_TOL

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        self.entries = rho
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        if self.space_label not in (TLS, RC, TLS_RC):
            raise ValueError(f"unknown space label {self.space_label!r}")
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > HERMITICITY_TOL:
            raise ValueError(f"state not Hermitian: max deviation {herm:.3e}")
        tr = rho.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"state trace {tr} not within {TRACE_TOL} of 1")
        lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
        if lo < -self.positivity_tol:
            raise ValueError(f"state has eigenvalue {lo:.3e} below -{self.positivity_tol}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass
class EigenDecomposition:
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix."""

    values: np.ndarray
    vectors: np.ndarray


def eig_hermitian(H: np.ndarray, tol: float = HERMITICITY_TOL) -> EigenDecomposition:
    """Diagonalize a Hermitian matrix with a deterministic eigenvector gauge.

    The phase of each eigenvector is fixed so that its first component of
    nonnegligible magnitude is real and positive.
    """
    H = np.asarray(H, dtype=complex)
    scale = max(1.0, np.max(np.abs(H)))
    herm = np.max(np.abs(H - H.conj().T))
    if herm > tol * scale:
        raise ValueError(f"matrix not Hermitian: max deviation {herm:.3e}")
    values, vectors = np.linalg.eigh(0.5 * (H + H.conj().T))
    for i in range(vectors.shape[1]):
        col = vectors[:, i]
        j = np.argmax(np.abs(col) > 1e-8)
        phase = col[j] / abs(col[j])
        vectors[:, i] = col / phase
    return EigenDecomposition(values, vectors)


def partial_trace(rho: DensityMatrix, keep: str) -> DensityMatrix:
    """Reduce a TLSxRC state to the TLS or RC factor."""
    if rho.space_label != TLS_RC:
        raise ValueError("partial_trace expects a state on the TLS-RC product space")
    if keep not in (TLS, RC):
        raise ValueError(f"keep must be {TLS!r} or {RC!r}, got {keep!r}")
    reduced = ptrace_matrix(rho.entries, keep)
    return DensityMatrix(reduced, keep, positivity_tol=max(rho.positivity_tol, POSITIVITY_TOL))


def ptrace_matrix(rho: np.ndarray, keep: str) -> np.ndarray:
    """Partial trace of a raw 2M x 2M matrix over one of the two factors."""
    d = rho.shape[0]
    if d % 2 != 0 or d < 2:
        raise ValueError(f"dimension {d} does not factor as 2 x M")
    M = d // 2
    blocks = rho.reshape(2, M, 2, M)
    if keep == TLS:
        return np.einsum("imjm->ij", blocks)
    if keep == RC:
        return np.einsum("imin->mn", blocks)
    raise ValueError(f"keep must be {TLS!r} or {RC!r}, got {keep!r}")


def entropy(rho: DensityMatrix | np.ndarray, tol: float = POSITIVITY_TOL) -> float:
    """Von Neumann entropy -sum p ln p with 0 ln 0 := 0.

    Eigenvalues inside [-tol, 1 + tol] are clipped into [0, 1]; anything
    further out indicates a solver bug and raises.
    """
    mat = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    p = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
    if p.min() < -tol or p.max() > 1.0 + tol:
        raise ValueError(f"eigenvalues outside [-{tol}, 1+{tol}]: range [{p.min():.3e}, {p.max():.3e}]")
    p = np.clip(p, 0.0, 1.0)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


def hermitian_function(H: np.ndarray, f) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix via its eigendecomposition."""
    eig = eig_hermitian(H)
    fvals = np.asarray([f(v) for v in eig.values])
    return (eig.vectors * fvals) @ eig.vectors.conj().T
