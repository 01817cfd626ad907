import math

import numpy as np
import pytest

from rcsim.operators import (
    DensityMatrix,
    annihilator,
    eig_hermitian,
    entropy,
    hermitian_function,
    partial_trace,
    pauli,
    ptrace_matrix,
    tensor,
)
from conftest import random_density, random_unitary


class TestAnnihilator:
    def test_smallest(self):
        assert np.array_equal(annihilator(2), [[0, 1], [0, 0]])

    def test_sqrt_entries(self):
        assert annihilator(3)[1, 2] == pytest.approx(math.sqrt(2.0), rel=1e-12)

    def test_number_operator(self):
        a = annihilator(5)
        assert np.allclose(a.conj().T @ a, np.diag([0, 1, 2, 3, 4]))

    def test_commutator_truncation_defect(self):
        M = 4
        a = annihilator(M)
        comm = a @ a.conj().T - a.conj().T @ a
        expected = np.eye(M)
        expected[M - 1, M - 1] = 1 - M
        assert np.allclose(comm, expected, atol=1e-14)

    def test_invalid(self):
        with pytest.raises(ValueError):
            annihilator(0)


class TestPauli:
    def test_z_convention(self):
        assert np.array_equal(pauli("z"), np.diag([1.0, -1.0]))

    def test_involution(self):
        for w in "xyz":
            assert np.allclose(pauli(w) @ pauli(w), np.eye(2))

    def test_x_eigenvalues(self):
        assert np.allclose(np.linalg.eigvalsh(pauli("x")), [-1.0, 1.0])

    def test_unknown(self):
        with pytest.raises(ValueError):
            pauli("w")


class TestTensor:
    def test_identity(self):
        assert np.array_equal(tensor(np.eye(2), np.eye(3)), np.eye(6))

    def test_tls_is_slow_factor(self):
        M = 3
        t = tensor(pauli("z"), np.eye(M))
        assert np.allclose(np.diagonal(t)[:M], 1.0)
        assert np.allclose(np.diagonal(t)[M:], -1.0)

    def test_trace_multiplicative(self, rng):
        A = random_density(2, rng)
        B = random_density(4, rng)
        assert np.trace(tensor(A, B)) == pytest.approx(np.trace(A) * np.trace(B), rel=1e-12)


class TestDensityMatrix:
    def test_valid(self, rng):
        rho = DensityMatrix(random_density(4, rng), "RC")
        assert rho.dim == 4

    def test_rejects_non_hermitian(self):
        bad = np.array([[0.5, 0.2], [0.0, 0.5]])
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix(bad, "TLS")

    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(np.eye(2), "TLS")

    def test_rejects_negative(self):
        with pytest.raises(ValueError, match="eigenvalue"):
            DensityMatrix(np.diag([1.5, -0.5]), "TLS")

    def test_relaxed_positivity(self):
        rho = np.diag([1.0 + 1e-6, -1e-6])
        DensityMatrix(rho, "TLS", positivity_tol=1e-4)
        with pytest.raises(ValueError):
            DensityMatrix(rho, "TLS")


class TestPartialTrace:
    def test_product_state(self, rng):
        tls = random_density(2, rng)
        rc = random_density(5, rng)
        joint = DensityMatrix(tensor(tls, rc), "TLSxRC")
        assert np.allclose(partial_trace(joint, "TLS").entries, tls, atol=1e-12)
        assert np.allclose(partial_trace(joint, "RC").entries, rc, atol=1e-12)

    def test_bell_like_state(self):
        # (|1>|0> + |2>|1>)/sqrt(2) with M=2
        psi = np.zeros(4, dtype=complex)
        psi[0] = psi[3] = 1.0 / math.sqrt(2.0)
        joint = DensityMatrix(np.outer(psi, psi.conj()), "TLSxRC")
        for keep in ("TLS", "RC"):
            assert np.allclose(partial_trace(joint, keep).entries, np.eye(2) / 2, atol=1e-12)

    def test_trace_preserved(self, rng):
        joint = DensityMatrix(random_density(8, rng), "TLSxRC")
        assert partial_trace(joint, "RC").entries.trace() == pytest.approx(1.0, abs=1e-12)

    def test_bad_dimension(self):
        with pytest.raises(ValueError):
            ptrace_matrix(np.eye(3) / 3, "TLS")


class TestEigHermitian:
    def test_sigma_z(self):
        eig = eig_hermitian(pauli("z"))
        assert np.allclose(eig.values, [-1.0, 1.0])

    def test_tls_closed_form(self):
        H = 0.5 * 0.5 * pauli("z") + 0.5 * pauli("x")
        eta = math.sqrt(0.5**2 + 1.0**2)
        eig = eig_hermitian(H)
        assert np.allclose(eig.values, [-eta / 2, eta / 2], atol=1e-12)
        assert eig.values[0] == pytest.approx(-0.5590170, abs=1e-7)

    def test_reconstruction_and_orthonormality(self, rng):
        g = rng.normal(size=(20, 20)) + 1j * rng.normal(size=(20, 20))
        H = g + g.conj().T
        eig = eig_hermitian(H)
        recon = (eig.vectors * eig.values) @ eig.vectors.conj().T
        assert np.max(np.abs(recon - H)) <= 1e-10 * np.max(np.abs(H)) * 20
        assert np.allclose(eig.vectors.conj().T @ eig.vectors, np.eye(20), atol=1e-10)

    def test_gauge_deterministic(self, rng):
        g = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        H = g + g.conj().T
        v1 = eig_hermitian(H).vectors
        v2 = eig_hermitian(H.copy()).vectors
        assert np.array_equal(v1, v2)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestEntropy:
    def test_pure_state(self):
        assert entropy(np.diag([1.0, 0.0, 0.0])) == 0.0

    def test_maximally_mixed(self):
        assert entropy(np.eye(2) / 2) == pytest.approx(math.log(2.0), abs=1e-12)

    def test_direct_sum(self):
        p = np.array([0.75, 0.25])
        expected = -float(np.sum(p * np.log(p)))
        assert expected == pytest.approx(0.5623351, abs=1e-7)
        assert entropy(np.diag(p)) == pytest.approx(expected, abs=1e-12)

    def test_unitary_invariance(self, rng):
        for _ in range(5):
            rho = random_density(6, rng)
            U = random_unitary(6, rng)
            assert entropy(U @ rho @ U.conj().T) == pytest.approx(entropy(rho), abs=1e-9)

    def test_subadditivity(self, rng):
        for _ in range(10):
            rho = random_density(8, rng)
            s = entropy(rho)
            s_parts = entropy(ptrace_matrix(rho, "TLS")) + entropy(ptrace_matrix(rho, "RC"))
            assert s <= s_parts + 1e-9

    def test_large_violation_raises(self):
        with pytest.raises(ValueError):
            entropy(np.diag([1.5, -0.5]))


class TestHermitianFunction:
    def test_identity_map(self, rng):
        g = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        H = g + g.conj().T
        assert np.allclose(hermitian_function(H, lambda x: x), H, atol=1e-10)

    def test_exp_diagonal(self):
        H = np.diag([0.0, math.log(2.0)])
        assert np.allclose(hermitian_function(H, math.exp), np.diag([1.0, 2.0]), atol=1e-12)

    def test_exp_trace(self):
        out = hermitian_function(pauli("z"), lambda x: math.exp(-x))
        assert out.trace().real == pytest.approx(2.0 * math.cosh(1.0), abs=1e-12)
        assert 2.0 * math.cosh(1.0) == pytest.approx(3.0861613, abs=1e-7)
