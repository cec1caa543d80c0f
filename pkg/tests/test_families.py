"""State family builders: mollifier, Gaussian, theta, discretized, well."""

import numpy as np
import pytest

from boxsqueeze.errors import (
    DensityNotEven,
    DensityNotMonotone,
    EpsilonTooLarge,
    InfiniteSecondMoment,
    TargetTooCloseToWall,
    ValidationError,
)
from boxsqueeze.families import (
    DensitySpec,
    build_discretized_state,
    build_mollifier,
    build_theta_state,
    build_truncated_gaussian,
    build_well_adapted,
    gaussian_density,
    laplace_density,
    triangular_density,
)
from boxsqueeze.geometry import ClassicalTarget, IntervalGeometry
from boxsqueeze.quadrature import integrate, integrate_real
from boxsqueeze.states import evaluate_wave


def project_coefficient(state, k):
    """Independent per-k adaptive-quadrature projection oracle."""
    l = state.geometry.l
    val, _ = integrate(
        lambda x: state.position_evaluator(x) * np.exp(-1j * np.pi * k * x / l),
        -l,
        l,
        tol=1e-14,
        breakpoints=state.breakpoints,
    )
    return complex(val) / np.sqrt(2.0 * l)


class TestMollifier:
    def test_plateau_and_support(self, geom):
        m = build_mollifier(geom, 0.02)
        assert m.eta(np.array([0.0]))[0] == 1.0
        assert np.all(m.eta(np.array([-0.94, 0.94])) == 1.0)  # inside l - 3 eps
        assert np.all(m.eta(np.array([-1.0, -0.99, 0.99, 1.0])) == 0.0)
        mid = m.eta(np.array([-0.955, 0.955]))  # transition zone
        assert np.all((0 < mid) & (mid < 1))

    def test_unit_mass_bump(self, geom):
        m = build_mollifier(geom, 0.02)
        val, _ = integrate_real(m.omega, -0.02, 0.02, tol=1e-14)
        assert abs(val - 1.0) < 1e-12

    def test_eta_prime_integrates_to_zero(self, geom):
        m = build_mollifier(geom, 0.02)
        val, _ = integrate_real(m.eta_prime, -1, 1, tol=1e-13, breakpoints=m.breakpoints)
        assert abs(val) < 1e-12

    def test_derivatives_match_finite_differences(self, geom):
        m = build_mollifier(geom, 0.02)
        h = 1e-6
        for x0 in (-0.97, -0.955, 0.952, 0.968):
            fd1 = (m.eta(np.array([x0 + h]))[0] - m.eta(np.array([x0 - h]))[0]) / (2 * h)
            assert abs(fd1 - m.eta_prime(np.array([x0]))[0]) < 1e-5 * max(1.0, abs(fd1))
            fd2 = (
                m.eta_prime(np.array([x0 + h]))[0] - m.eta_prime(np.array([x0 - h]))[0]
            ) / (2 * h)
            assert abs(fd2 - m.eta_double_prime(np.array([x0]))[0]) < 1e-4 * max(1.0, abs(fd2))

    def test_epsilon_too_large(self, geom):
        with pytest.raises(EpsilonTooLarge):
            build_mollifier(geom, 0.34)
        with pytest.raises(EpsilonTooLarge):
            build_mollifier(geom, -0.1)


class TestTruncatedGaussian:
    def test_normalization_constant_near_one(self, gauss_state):
        # remainder ~ exp(-(l - 3 eps)^2 / (2 beta^2)) ~ e^-176 here
        assert abs(gauss_state.params["b_norm"] - 1.0) < 1e-10

    def test_series_normalized(self, gauss_state):
        assert abs(gauss_state.series.norm_sq - 1.0) <= 1e-12 + gauss_state.series.tail_bound

    def test_mean_momentum_equals_target(self, geom):
        t = ClassicalTarget.make(geom, 0.1, 2.7)
        st = build_truncated_gaussian(geom, t, 0.05, 0.02)
        k = st.series.k_values.astype(float)
        w = np.abs(st.series.coefficients) ** 2
        p_bar = np.pi * float(np.sum(k * w))
        assert abs(p_bar - 2.7) < 1e-10

    def test_real_and_even_at_origin(self, gauss_state):
        xs = np.linspace(0, 0.8, 9)
        vals_pos = gauss_state.position_evaluator(xs)
        vals_neg = gauss_state.position_evaluator(-xs)
        assert np.max(np.abs(vals_pos.imag)) < 1e-14
        assert np.max(np.abs(vals_pos - vals_neg)) < 1e-14

    def test_wall_values_and_derivatives_vanish(self, gauss_state_moving):
        walls = np.array([-1.0, 1.0])
        assert np.max(np.abs(gauss_state_moving.position_evaluator(walls))) < 1e-12
        d1, d2 = gauss_state_moving.derivatives(walls)
        assert np.max(np.abs(d1)) < 1e-12
        assert np.max(np.abs(d2)) < 1e-12
        # series boundary value also vanishes
        from boxsqueeze.states import boundary_values

        lo, _ = boundary_values(gauss_state_moving)
        assert abs(lo) < 1e-12

    def test_coefficients_match_quadrature_oracle(self, gauss_state_moving):
        for k in (0, 2, 9, 21):
            oracle = project_coefficient(gauss_state_moving, k)
            assert abs(gauss_state_moving.series.coefficient(k) - oracle) < 1e-12

    def test_series_matches_closed_form_on_grid(self, gauss_state):
        xs = np.linspace(-1, 1, 101)
        diff = evaluate_wave(gauss_state, xs) - gauss_state.position_evaluator(xs)
        assert np.max(np.abs(diff)) < 1e-10

    def test_target_too_close_to_wall(self, geom):
        with pytest.raises(TargetTooCloseToWall):
            build_truncated_gaussian(geom, ClassicalTarget.make(geom, 0.95, 0.0), 0.05, 0.02)


class TestThetaState:
    def test_mean_momentum_is_exact_lattice_point(self, theta_state_moving):
        st = theta_state_moving
        k = st.series.k_values.astype(float)
        w = np.abs(st.series.coefficients) ** 2
        p_bar = np.pi * float(np.sum(k * w))
        assert abs(p_bar - np.pi * st.target.k_bar) < 1e-14 * max(1.0, abs(p_bar))

    def test_centred_state_symmetric(self, theta_state_8):
        a = theta_state_8.series
        c = a.coefficients
        assert np.allclose(c, c[::-1], atol=1e-16)  # a_k = a_{-k}

    def test_dstar_p2_alpha5(self, geom, origin_target):
        # Delta*p^2 = (pi alpha)^2 with remainder ~ e^{-2 (pi alpha)^2};
        # derived by direct coefficient summation
        st = build_theta_state(geom, origin_target, 5.0)
        k = st.series.k_values.astype(float)
        w = np.abs(st.series.coefficients) ** 2
        dstar = np.pi**2 * float(np.sum(k * k * w))
        assert abs(dstar - 25.0 * np.pi**2) < 1e-12 * 25.0 * np.pi**2

    def test_series_matches_closed_form_on_grid(self, theta_state_8, theta_state_moving):
        xs = np.linspace(-1, 1, 101)
        for st in (theta_state_8, theta_state_moving):
            diff = evaluate_wave(st, xs) - st.position_evaluator(xs)
            assert np.max(np.abs(diff)) < 1e-10

    def test_validation(self, geom, origin_target):
        with pytest.raises(ValidationError):
            build_theta_state(geom, origin_target, -1.0)


class TestDensities:
    def test_builtin_metadata(self):
        for rho in (gaussian_density(), laplace_density(), triangular_density()):
            assert abs(rho.second_moment - 1.0) < 1e-12
            assert rho.monotone_certificate.ok
            # cdf consistency with the density via quadrature
            val, _ = integrate_real(rho.phi, -0.7, 1.3, tol=1e-12, breakpoints=(0.0,))
            assert abs(val - (rho.cdf(1.3) - rho.cdf(-0.7))) < 1e-10

    def test_tail_moments_match_quadrature(self):
        for rho in (gaussian_density(), laplace_density(), triangular_density()):
            for v in (0.0, 0.8, 2.5):
                m0, m1, m2 = rho.tail_moments(v)
                hi = 40.0
                o0, _ = integrate_real(rho.phi, v, hi, tol=1e-13)
                o1, _ = integrate_real(lambda q: q * rho.phi(q), v, hi, tol=1e-13)
                o2, _ = integrate_real(lambda q: q * q * rho.phi(q), v, hi, tol=1e-13)
                assert abs(m0 - o0) < 1e-11
                assert abs(m1 - o1) < 1e-11
                assert abs(m2 - o2) < 1e-10

    def test_not_even_rejected(self):
        with pytest.raises(DensityNotEven):
            DensitySpec(
                phi=lambda q: np.exp(-0.5 * (np.asarray(q, float) - 0.05) ** 2)
                / np.sqrt(2 * np.pi),
                second_moment=1.0,
                peak_value=np.exp(-0.5 * 0.05**2) / np.sqrt(2 * np.pi),
            )

    def test_not_monotone_rejected(self):
        def bimodal(q):
            q = np.asarray(q, float)
            return 0.5 * (np.exp(-0.5 * (q - 3) ** 2) + np.exp(-0.5 * (q + 3) ** 2)) / np.sqrt(
                2 * np.pi
            )

        with pytest.raises(DensityNotMonotone):
            DensitySpec(phi=bimodal, second_moment=10.0, peak_value=float(bimodal(0.0)))

    def test_infinite_second_moment_rejected(self):
        with pytest.raises(InfiniteSecondMoment):
            DensitySpec(
                phi=lambda q: 1.0 / (np.pi * (1 + np.asarray(q, float) ** 2)),
                second_moment=np.inf,
                peak_value=1.0 / np.pi,
            )


class TestDiscretizedState:
    def test_unit_mass_within_tail(self, disc_state_10):
        s = disc_state_10.series
        assert abs(s.norm_sq - 1.0) <= 1e-12 + s.tail_bound

    def test_mean_momentum_exact(self, disc_state_10):
        k = disc_state_10.series.k_values.astype(float)
        w = np.abs(disc_state_10.series.coefficients) ** 2
        p_bar = np.pi * float(np.sum(k * w))
        expected = np.pi * disc_state_10.target.k_bar
        assert abs(p_bar - expected) < 1e-14 * abs(expected)

    def test_coefficient_symmetry_about_k_bar(self, disc_state_10):
        # raw masses are mirrored exactly; the x* phase costs at most an ulp
        s = disc_state_10.series
        kb = disc_state_10.target.k_bar
        mags = np.abs(s.coefficients)
        for j in (1, 2, 5, 11):
            hi, lo = mags[kb + j - s.k_min], mags[kb - j - s.k_min]
            assert abs(hi - lo) <= 4e-16 * max(hi, lo)

    def test_bin_masses_match_quadrature(self, geom):
        # a_k^2 = integral of the scaled density over [k-1/2, k+1/2]
        rho = gaussian_density()
        alpha = 10.0
        t = ClassicalTarget.make(geom, 0.0, 0.0)
        st = build_discretized_state(geom, t, rho, alpha)
        s_scale = np.pi / (geom.l * alpha)
        for k in (0, 3, 14):
            lo, hi = s_scale * (k - 0.5), s_scale * (k + 0.5)
            oracle, _ = integrate_real(rho.phi, lo, hi, tol=1e-15)
            assert abs(abs(st.series.coefficient(k)) ** 2 - oracle) < 1e-14

    def test_compact_support_density_exact_truncation(self, geom):
        st = build_discretized_state(
            geom, ClassicalTarget.make(geom, 0.0, 0.0), triangular_density(), 3.0
        )
        assert st.series.tail_bound == 0.0


class TestWellAdapted:
    def test_wall_values_vanish(self, well_state):
        walls = np.array([-1.0, 1.0])
        assert np.max(np.abs(well_state.position_evaluator(walls))) <= 1e-10
        # the two-theta closed-form difference agrees: build it by hand
        st = well_state
        g2 = st.geometry.doubled()
        a = st.params["alpha"]
        x0 = st.target.x_star + st.geometry.l
        t_plus = ClassicalTarget.make(g2, x0, st.target.p_star)
        t_minus = ClassicalTarget.make(g2, -x0, -st.target.p_star)
        plus = build_theta_state(g2, t_plus, a)
        minus = build_theta_state(g2, t_minus, a)
        prenorm = st.params["prenorm"]
        xs = np.linspace(-1.0, 1.0, 41)
        direct = (
            plus.position_evaluator(xs + 1.0) - minus.position_evaluator(xs + 1.0)
        ) / prenorm
        assert np.max(np.abs(direct - st.position_evaluator(xs))) < 1e-12
        assert np.max(np.abs(direct[[0, -1]])) < 1e-12

    def test_unit_norm_after_renormalization(self, well_state):
        val, _ = integrate_real(
            lambda x: np.abs(well_state.position_evaluator(x)) ** 2, -1, 1, tol=1e-12
        )
        assert abs(val - 1.0) < 1e-10
        assert 0.9 < well_state.params["prenorm"] < 1.5

    def test_interval_series_matches_projection_oracle(self, well_state):
        for j in (0, 2, 7, 30, -5):
            val, _ = integrate(
                lambda x: well_state.position_evaluator(x) * np.exp(-1j * np.pi * j * x),
                -1,
                1,
                tol=1e-13,
            )
            oracle = complex(val) / np.sqrt(2.0)
            assert abs(well_state.series.coefficient(j) - oracle) < 1e-12

    def test_energy_tail_saturates(self, well_state):
        # Cauchy increments of sum n^4 |b_n|^2 go to zero (theta inner, alpha=4)
        from boxsqueeze.moments import energy_expand

        es = energy_expand(well_state, 4096)
        n = es.n_values.astype(float)
        terms = n**4 * np.abs(es.coefficients) ** 2
        cum = np.cumsum(terms)
        assert cum[-1] > 0
        assert (cum[-1] - cum[2047]) / cum[-1] < 1e-12

    def test_disc_inner_supported(self, geom):
        st = build_well_adapted(
            geom,
            ClassicalTarget.make(geom, 0.1, 3.0),
            inner="disc",
            alpha=4.0,
            density=gaussian_density(),
        )
        assert np.max(np.abs(st.position_evaluator(np.array([-1.0, 1.0])))) < 1e-12

    def test_validation(self, geom):
        with pytest.raises(ValidationError):
            build_well_adapted(geom, ClassicalTarget.make(geom, 0.0, 0.0), inner="disc")
        with pytest.raises(ValidationError):
            build_well_adapted(geom, ClassicalTarget.make(geom, 0.0, 0.0), inner="nope")


class TestSharpCutFixture:
    def test_coefficients_match_quadrature(self, sharpcut_state):
        for k in (0, 3, 17, 101):
            oracle = project_coefficient(sharpcut_state, k)
            assert abs(sharpcut_state.series.coefficient(k) - oracle) < 1e-12

    def test_one_over_k_decay(self, sharpcut_state):
        # off-centre sharp cut: k |a_k| approaches a nonzero constant
        kv = sharpcut_state.series.k_values
        av = np.abs(sharpcut_state.series.coefficients)
        tail = [abs(k) * av[list(kv).index(k)] for k in (100, 180, 250)]
        assert all(t > 1e-7 for t in tail)
        assert max(tail) / min(tail) < 1.2

    def test_tail_bound_infinite(self, sharpcut_state):
        assert not np.isfinite(sharpcut_state.series.tail_bound)
