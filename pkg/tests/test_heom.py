import math

import numpy as np
import pytest

from rcsim.core import SpinBosonParams, TimeGrid
from rcsim.errors import CapacityError, DegeneracyError
from rcsim.heom import (
    HEOMParams,
    enumerate_hierarchy,
    heom_propagate,
    heom_propagate_fixed,
    hierarchy_count,
    matsubara,
    terminator_coefficient,
)


def make_heom(pi_alpha=0.1, **kw):
    base = dict(alpha_h=pi_alpha, omega_c=0.05, beta=0.95, epsilon=0.5, delta=1.0)
    base.update(kw)
    return HEOMParams(**base)


class TestMatsubara:
    def test_frequencies(self):
        exp = matsubara(make_heom(K=3))
        assert exp.mu[0] == pytest.approx(0.05, rel=1e-14)
        assert exp.mu[1] == pytest.approx(2.0 * math.pi / 0.95, rel=1e-14)
        assert exp.mu[1] == pytest.approx(6.6138793, abs=1e-6)
        assert exp.mu[3] == pytest.approx(3.0 * exp.mu[1], rel=1e-12)

    def test_leading_coefficient(self):
        exp = matsubara(make_heom(pi_alpha=0.1, K=1))
        # c0 = (wc aH / 2)(cot(beta wc / 2) - i)
        expected = 0.5 * 0.05 * 0.1 * (1.0 / math.tan(0.5 * 0.95 * 0.05) - 1j)
        assert exp.c[0] == pytest.approx(expected, rel=1e-12)
        assert exp.c[0].real == pytest.approx(0.1052434, abs=1e-6)
        assert exp.c[0].imag == pytest.approx(-0.0025, abs=1e-10)

    def test_first_matsubara_coefficient(self):
        exp = matsubara(make_heom(pi_alpha=0.1, K=1))
        mu1 = 2.0 * math.pi / 0.95
        expected = (2.0 * 0.1 * 0.05 / 0.95) * mu1 / (mu1**2 - 0.05**2)
        assert expected == pytest.approx(0.0015917, abs=1e-7)
        assert exp.c[1] == pytest.approx(expected, rel=1e-12)
        assert exp.c[1].imag == 0.0

    def test_pole_collision_raises(self):
        # beta*omega_c = 2*pi puts mu_1 exactly on omega_c
        p = make_heom(omega_c=1.0, beta=2.0 * math.pi, K=1)
        with pytest.raises(DegeneracyError):
            matsubara(p)

    def test_terminator_shrinks_with_k(self):
        mags = [
            abs(terminator_coefficient(matsubara(make_heom(K=K)), make_heom(K=K)))
            for K in (0, 1, 4, 16)
        ]
        assert mags[0] > mags[1] > mags[2] > mags[3]

    def test_correlation_function_oracle(self):
        # C(t) from the exponential expansion must match direct quadrature of
        # the spectral-density integral at moderate K.
        import scipy.integrate

        p = make_heom(pi_alpha=0.5, K=60)
        exp = matsubara(p)
        alpha = p.alpha_h / math.pi

        def correlation(t):
            def re(w):
                J = alpha * p.omega_c * w / (w**2 + p.omega_c**2)
                return J / math.tanh(0.5 * p.beta * w) * math.cos(w * t)

            def im(w):
                J = alpha * p.omega_c * w / (w**2 + p.omega_c**2)
                return -J * math.sin(w * t)

            re_v, _ = scipy.integrate.quad(re, 0.0, 60.0, limit=600)
            im_v, _ = scipy.integrate.quad(im, 0.0, 60.0, limit=600)
            return re_v + 1j * im_v

        for t in (0.5, 2.0, 10.0):
            series = np.sum(exp.c * np.exp(-exp.mu * t))
            direct = correlation(t)
            assert series == pytest.approx(direct, rel=2e-3)


class TestHierarchy:
    @pytest.mark.parametrize("Nc,K", [(0, 0), (4, 1), (6, 2), (10, 3)])
    def test_count_formula(self, Nc, K):
        assert enumerate_hierarchy(Nc, K).size == hierarchy_count(Nc, K)
        assert hierarchy_count(Nc, K) == math.comb(Nc + K + 1, K + 1)

    def test_neighbor_maps_consistent(self):
        h = enumerate_hierarchy(5, 2)
        for i in range(h.size):
            for m in range(3):
                up = h.plus[i, m]
                if up >= 0:
                    assert h.minus[up, m] == i
                    diff = h.indices[up] - h.indices[i]
                    assert diff[m] == 1 and np.sum(np.abs(diff)) == 1

    def test_top_matrix_first(self):
        h = enumerate_hierarchy(3, 1)
        assert np.array_equal(h.indices[0], [0, 0])

    def test_budget_enforced(self):
        with pytest.raises(CapacityError):
            enumerate_hierarchy(40, 8, budget=1000)


class TestDynamics:
    def test_rabi_at_zero_coupling(self):
        # alpha_h = 0 decouples the hierarchy; with epsilon=0 the population
        # is exactly cos^2(t/2).
        p = make_heom(pi_alpha=0.0, epsilon=0.0, Nc=2, K=1)
        grid = TimeGrid.linspace(12.0, 25)
        traj = heom_propagate_fixed(np.diag([1.0, 0.0]).astype(complex), grid, p)
        for t, rho in zip(grid.points, traj):
            assert rho[0, 0].real == pytest.approx(math.cos(t / 2.0) ** 2, abs=1e-6)

    def test_trace_and_hermiticity(self):
        p = make_heom(pi_alpha=0.5, Nc=6, K=1)
        grid = TimeGrid.linspace(10.0, 21)
        traj = heom_propagate_fixed(np.diag([1.0, 0.0]).astype(complex), grid, p)
        for rho in traj:
            assert rho.trace().real == pytest.approx(1.0, abs=1e-9)
            assert np.max(np.abs(rho - rho.conj().T)) < 1e-9

    def test_damping_scales_linearly_at_weak_coupling(self):
        # The revival-peak deficit 1 - max rho_11 near t = 4 pi is
        # c1*a + c2*a^2 + ...; Richardson extrapolation at two scales must
        # agree on the same positive linear coefficient c1.
        grid = TimeGrid.linspace(14.0, 281)
        rho0 = np.diag([1.0, 0.0]).astype(complex)
        ts = grid.as_array()
        sel = ts > 11.0

        def deficit(a):
            p = make_heom(pi_alpha=a, epsilon=0.0, Nc=6, K=1)
            traj = heom_propagate_fixed(rho0, grid, p)
            pop = np.array([r[0, 0].real for r in traj])
            return 1.0 - pop[sel].max()

        d1, d2, d3 = deficit(0.00125), deficit(0.0025), deficit(0.005)
        assert 0.0 < d1 < d2 < d3
        c1_small = (4.0 * d1 - d2) / 0.0025
        c1_large = (4.0 * d2 - d3) / 0.005
        assert c1_small > 0.0
        assert c1_small / c1_large == pytest.approx(1.0, abs=0.1)

    def test_long_time_gibbs_at_weak_coupling(self):
        # Equilibration rates are ~1e-3 at this coupling, so a long horizon
        # is needed before comparing against the canonical state.
        p = make_heom(pi_alpha=0.01, Nc=4, K=1)
        grid = TimeGrid.linspace(8000.0, 5)
        traj = heom_propagate_fixed(np.diag([1.0, 0.0]).astype(complex), grid, p)
        from rcsim.weak import gibbs_tls

        sb = SpinBosonParams(
            epsilon=0.5, delta=1.0, alpha=0.01 / math.pi, omega_c=0.05, beta=0.95
        )
        assert np.max(np.abs(traj[-1] - gibbs_tls(sb))) < 5e-3


class TestConvergenceLoop:
    def test_reports_cutoffs_and_matches_fixed(self):
        p = make_heom(pi_alpha=0.1, Nc=4, K=1)
        grid = TimeGrid.linspace(10.0, 21)
        rho0 = np.diag([1.0, 0.0]).astype(complex)
        traj, report = heom_propagate(rho0, grid, p, tol=5e-3)
        assert report["Nc"] >= 4 and report["K"] >= 1
        fixed = heom_propagate_fixed(rho0, grid, p.with_cutoffs(report["Nc"], report["K"]))
        assert np.allclose(traj[-1], fixed[-1], atol=1e-12)
        assert all(h["Nc"] <= report["Nc"] for h in report["history"])
