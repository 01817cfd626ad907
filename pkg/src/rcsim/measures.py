"""Environmental and correlation diagnostics for the mapped model.

Non-Gaussianity is the entropy gap to the moments-matched Gaussian reference
(vacuum covariance 1/2 convention); mutual information is evaluated between
the TLS and RC factors.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import SpinBosonParams
from .errors import InvalidMomentsError
from .operators import (
    DensityMatrix,
    annihilator,
    eig_hermitian,
    entropy,
    hermitian_function,
    ptrace_matrix,
)
from .weak import hamiltonian_tls

UNCERTAINTY_SLACK = 1e-6
TRUNCATION_POP_WARN = 1e-6
# The Born-Markov master equation is not completely positive: transient
# reduced states can undershoot zero by a few percent (worst observed ~0.07
# across the figure parameter range), so entropy evaluation on solver output
# clips within a correspondingly wide window.
MEASURE_EIG_TOL = 0.1


@dataclass(frozen=True)
class GaussianMoments:
    """First and symmetrized second moments of (x, p) with vacuum covariance 1/2."""

    mean: np.ndarray
    cov: np.ndarray


def _as_matrix(rho) -> np.ndarray:
    return rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def moments(rho_rc) -> GaussianMoments:
    """Exact quadrature moments of a truncated RC state.

    Warns when the top two Fock levels are populated above 1e-6, since
    second moments are then truncation-sensitive.
    """
    rho = _as_matrix(rho_rc)
    M = rho.shape[0]
    if M >= 2:
        top_pop = float(rho[M - 1, M - 1].real + rho[M - 2, M - 2].real)
        if top_pop > TRUNCATION_POP_WARN:
            warnings.warn(
                f"population {top_pop:.2e} in the top two Fock levels; "
                "second moments may be truncation-limited",
                stacklevel=2,
            )
    a = annihilator(M)
    x = (a + a.conj().T) / math.sqrt(2.0)
    p = 1j * (a.conj().T - a) / math.sqrt(2.0)
    mean = np.array([np.trace(rho @ x).real, np.trace(rho @ p).real])
    ops = (x, p)
    cov = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            sym = 0.5 * (ops[i] @ ops[j] + ops[j] @ ops[i])
            cov[i, j] = np.trace(rho @ sym).real - mean[i] * mean[j]
    return GaussianMoments(mean=mean, cov=cov)


def gaussian_entropy(m: GaussianMoments) -> float:
    """Entropy of the Gaussian state with the given moments (single mode).

    nu = sqrt(det cov), clipped to >= 1/2; S = (nu+1/2)ln(nu+1/2) - (nu-1/2)ln(nu-1/2).
    """
    det = float(np.linalg.det(m.cov))
    if det < 0.25 - UNCERTAINTY_SLACK:
        raise InvalidMomentsError(
            f"covariance determinant {det} violates the uncertainty bound 1/4"
        )
    nu = max(0.5, math.sqrt(max(det, 0.0)))
    if nu <= 0.5:
        return 0.0
    return (nu + 0.5) * math.log(nu + 0.5) - (nu - 0.5) * math.log(nu - 0.5)


def non_gaussianity(rho_rc) -> float:
    """Entropy gap S(Gaussian reference) - S(rho); zero iff the state is Gaussian."""
    rho = _as_matrix(rho_rc)
    delta = gaussian_entropy(moments(rho)) - entropy(rho, tol=MEASURE_EIG_TOL)
    if delta < -1e-8:
        raise InvalidMomentsError(
            f"non-Gaussianity {delta} below the numerical floor; moments inconsistent"
        )
    return max(delta, 0.0)


def mutual_information(rho) -> float:
    """Total TLS-RC correlations S(rho_s) + S(rho_RC) - S(rho), clipped at 0."""
    joint = _as_matrix(rho)
    s_tls = entropy(ptrace_matrix(joint, "TLS"), tol=MEASURE_EIG_TOL)
    s_rc = entropy(ptrace_matrix(joint, "RC"), tol=MEASURE_EIG_TOL)
    s_joint = entropy(joint, tol=MEASURE_EIG_TOL)
    return max(s_tls + s_rc - s_joint, 0.0)


def thermal_state(h: np.ndarray, beta: float) -> np.ndarray:
    """Gibbs state exp(-beta H)/Z, with the spectrum shifted before exponentiation."""
    ground = float(np.min(np.linalg.eigvalsh(h)))
    boltz = hermitian_function(h, lambda v: math.exp(-beta * (v - ground)))
    return boltz / boltz.trace()


def eigenbasis_observables(rho_s, params: SpinBosonParams) -> tuple[float, complex]:
    """Population ratio rho_gg/rho_ee and coherence rho_ge in the H_S eigenbasis."""
    rho = _as_matrix(rho_s)
    eig = eig_hermitian(hamiltonian_tls(params))
    rho_eig = eig.vectors.conj().T @ rho @ eig.vectors
    p_gg = rho_eig[0, 0].real
    p_ee = rho_eig[1, 1].real
    if p_ee < 1e-300:
        raise OverflowError("excited-state population underflow; ln-ratio is +inf")
    return p_gg / p_ee, rho_eig[0, 1]
