"""Large-interval limit and the semiclassical sweep."""

import numpy as np
import pytest
from scipy.integrate import quad

from boxsqueeze.errors import ValidationError
from boxsqueeze.families import gaussian_density, triangular_density
from boxsqueeze.limits import continuum_packet, large_l_convergence, semiclassical_sweep


class TestContinuumPacket:
    def test_gaussian_limit_is_gaussian(self):
        # closed form: sqrt(2) (2 pi)^{-1/4} exp(-(x - x*)^2)
        xs = np.linspace(-2.0, 2.0, 9) + 0.3
        vals, tail = continuum_packet(gaussian_density(), 0.3, xs)
        oracle = np.sqrt(2.0) * (2.0 * np.pi) ** -0.25 * np.exp(-((xs - 0.3) ** 2))
        assert np.max(np.abs(vals - oracle)) < 1e-13
        assert 0 < tail < 0.05  # certified but pessimistic (1/Q law)

    def test_value_at_target_real_positive(self):
        for rho in (gaussian_density(), triangular_density()):
            v, _ = continuum_packet(rho, 0.7, np.array([0.7]))
            assert abs(v[0].imag) < 1e-13
            assert v[0].real > 0

    def test_triangular_against_scipy_oracle(self):
        rho = triangular_density()
        v, _ = continuum_packet(rho, 0.7, np.array([0.7]))
        w = np.sqrt(6.0)
        oracle = (
            quad(lambda q: np.sqrt(max(1 - abs(q) / w, 0.0) / w), -w, w, limit=200)[0]
            / np.sqrt(2 * np.pi)
        )
        assert abs(v[0] - oracle) < 1e-11


class TestLargeL:
    def test_errors_strictly_decreasing(self):
        rows = large_l_convergence(gaussian_density(), 0.0, [8.0, 16.0, 32.0, 64.0])
        errs = [r.sup_error for r in rows]
        assert all(a > b for a, b in zip(errs[:-1], errs[1:]))
        assert errs[-1] <= 1e-3

    def test_peak_error_decreasing(self):
        rows = large_l_convergence(
            gaussian_density(), 0.5, [8.0, 16.0, 32.0], x_grid=np.array([0.5])
        )
        errs = [r.sup_error for r in rows]
        assert errs[0] > errs[1] > errs[2]

    def test_single_rung_table(self):
        rows = large_l_convergence(gaussian_density(), 0.0, [16.0])
        assert len(rows) == 1 and np.isfinite(rows[0].sup_error)

    def test_nonzero_lattice_momentum_rejected(self):
        from types import SimpleNamespace

        moving = SimpleNamespace(x_star=0.0, p_star=1.0)
        with pytest.raises(ValidationError):
            large_l_convergence(gaussian_density(), moving, [64.0], x_grid=np.array([0.0]))


class TestSemiclassical:
    def test_six_rung_sweep(self):
        rows = semiclassical_sweep(0.2, 1.0, rungs=6)
        dx = [r.delta_x for r in rows]
        dp = [r.delta_p for r in rows]
        assert all(a > b for a, b in zip(dx[:-1], dx[1:]))
        assert all(a > b for a, b in zip(dp[:-1], dp[1:]))
        for r in rows:
            assert r.mean_x_dev <= r.mean_x_bound
            assert r.mean_p_dev <= r.mean_p_bound + 1e-12
            assert r.judge_ok
        # means converge to the classical target
        assert rows[-1].mean_x_dev < 1e-9
        assert rows[-1].mean_p_dev < rows[0].mean_p_dev

    def test_product_tracks_half_hbar(self):
        rows = semiclassical_sweep(0.0, 0.0, rungs=5)
        for r in rows:
            assert abs(r.product - 0.5 * r.hbar) < 1e-6 * r.hbar
