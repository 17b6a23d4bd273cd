from math import erf, pi, sqrt

import numpy as np
import pytest
from scipy import stats

from bellswap import modes
from bellswap.modes import PdDecomposition, SqueezedMode
from bellswap.register import delta


def simpson(values, h):
    weights = np.ones(len(values))
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float(np.dot(weights, values) * h / 3.0)


class TestConversions:
    def test_known_values(self):
        assert modes.db_from_sigma(1.0) == 0.0
        assert modes.sigma_from_db(15.0) == pytest.approx(5.6234133, abs=1e-7)
        assert modes.sigma_from_db(10.0) == pytest.approx(3.1622777, abs=1e-7)

    def test_round_trip(self):
        for db in np.linspace(-10, 30, 17):
            assert modes.db_from_sigma(modes.sigma_from_db(db)) == pytest.approx(db, abs=1e-12)

    def test_rejects_nonpositive_sigma(self):
        with pytest.raises(ValueError):
            modes.db_from_sigma(0.0)
        with pytest.raises(ValueError):
            SqueezedMode(-1.0)


class TestUEval:
    def test_peak_value(self):
        assert modes.u_eval(SqueezedMode(1.0), 0.0) == pytest.approx(pi**-0.25, abs=1e-12)

    def test_even(self):
        mode = SqueezedMode(2.7)
        for p in (0.3, 1.4, 5.0):
            assert modes.u_eval(mode, p) == modes.u_eval(mode, -p)

    @pytest.mark.parametrize("sigma", [1.0, 3.16, 8.0])
    def test_normalized_by_quadrature(self, sigma):
        mode = SqueezedMode(sigma)
        grid = np.linspace(-10.0 / sigma, 10.0 / sigma, 2001)
        integral = simpson(modes.u_eval(mode, grid) ** 2, grid[1] - grid[0])
        assert abs(integral - 1.0) < 1e-9


class TestHhat:
    def test_origin_value(self):
        for sigma in (1.0, 2.5):
            assert modes.hhat_gaussian(SqueezedMode(sigma), 0.0, 0.0) == pytest.approx(
                1.0 / sqrt(pi), abs=1e-12
            )

    @pytest.mark.parametrize("sigma", [1.0, 3.16])
    @pytest.mark.parametrize("x_d", [0.0, 1.5])
    @pytest.mark.parametrize("p", [0.0, 0.7])
    def test_matches_fourier_integral(self, sigma, x_d, p):
        # Quadrature oracle: the closed form must equal the Fourier transform
        # of g((x_d + x)/sqrt2) g((x_d - x)/sqrt2) computed numerically.
        mode = SqueezedMode(sigma)

        def g(x):
            return pi**-0.25 / sqrt(sigma) * np.exp(-np.square(x) / (2 * sigma * sigma))

        grid = np.linspace(-12.0 * sigma, 12.0 * sigma, 40001)
        integrand = (
            g((x_d + grid) / sqrt(2)) * g((x_d - grid) / sqrt(2)) * np.cos(grid * p)
        )
        value = simpson(integrand, grid[1] - grid[0]) / sqrt(2 * pi)
        assert abs(value - modes.hhat_gaussian(mode, x_d, p)) < 1e-8

    def test_even_in_p(self):
        mode = SqueezedMode(1.8)
        for p in (0.2, 1.1):
            assert modes.hhat_gaussian(mode, 0.9, p) == modes.hhat_gaussian(mode, 0.9, -p)

    def test_profile_independent_of_xd(self):
        # hhat(x_d, p)/hhat(x_d, 0) must not depend on x_d: this is what makes
        # the corrected state independent of the x outcome.
        mode = SqueezedMode(2.2)
        p = np.linspace(-2, 2, 41)
        ref = modes.hhat_gaussian(mode, 0.0, p) / modes.hhat_gaussian(mode, 0.0, 0.0)
        for x_d in (1.0, 3.0):
            cur = modes.hhat_gaussian(mode, x_d, p) / modes.hhat_gaussian(mode, x_d, 0.0)
            assert np.max(np.abs(cur - ref)) < 1e-12

    def test_factorizes_through_u(self):
        mode = SqueezedMode(3.0)
        for x_d, p in ((0.5, 0.3), (2.0, 1.2)):
            expected = (
                np.exp(-x_d * x_d / (2 * mode.sigma**2))
                * modes.u_eval(mode, p)
                / (pi**0.25 * sqrt(mode.sigma))
            )
            assert modes.hhat_gaussian(mode, x_d, p) == pytest.approx(expected, abs=1e-15)


class TestJointDensityFactorization:
    @pytest.mark.parametrize("sigma", [1.0, 3.16])
    def test_joint_equals_product_and_marginalizes(self, sigma):
        n = 2
        mode = SqueezedMode(sigma)
        grid = (np.arange(4) - 1.5) * delta(n)
        diffs = (grid[:, None] - grid[None, :]).ravel() / sqrt(2)

        def joint(x_d, p_d):
            return np.sum(modes.hhat_gaussian(mode, x_d, p_d - diffs) ** 2) / 16.0

        def p_x(x_d):
            return np.exp(-x_d * x_d / sigma**2) / (sigma * sqrt(pi))

        for x_d in (0.0, 0.8, -1.7):
            for p_d in (0.0, 0.5, 2.0):
                product = p_x(x_d) * modes.pd_density(mode, n, p_d)
                assert abs(joint(x_d, p_d) - product) < 1e-8
            span = 4 * delta(n) + 8.0 / sigma
            ps = np.linspace(-span, span, 4001)
            marginal = simpson(np.array([joint(x_d, p) for p in ps]), ps[1] - ps[0])
            assert abs(marginal - p_x(x_d)) < 1e-8


class TestSampleXd:
    def test_moments_and_median(self):
        mode = SqueezedMode(1.0)
        rng = np.random.default_rng(42)
        draws = np.array([modes.sample_xd(mode, rng) for _ in range(200_000)])
        se = mode.sigma / sqrt(2) / sqrt(draws.size)
        assert abs(draws.mean()) < 4 * se
        assert draws.var() == pytest.approx(mode.sigma**2 / 2, rel=0.01)
        # standard-normal quantile oracle for the median of |x|
        expected_median = stats.norm.ppf(0.75) * mode.sigma / sqrt(2)
        assert np.median(np.abs(draws)) == pytest.approx(expected_median, rel=0.01)


class TestSamplePd:
    def test_symmetric_mean(self):
        mode = SqueezedMode(2.0)
        rng = np.random.default_rng(1)
        draws = modes.sample_pd(mode, 2, rng, size=1_000_000)
        se = draws.std() / sqrt(draws.size)
        assert abs(draws.mean()) < 4 * se

    def test_three_peaks_for_single_qubit(self):
        mode = SqueezedMode(10.0)
        rng = np.random.default_rng(2)
        draws = modes.sample_pd(mode, 1, rng, size=1_000_000)
        step = delta(1) / sqrt(2)
        nearest = np.rint(draws / step).astype(int)
        counts = {d: np.count_nonzero(nearest == d) / draws.size for d in (-1, 0, 1)}
        assert counts[-1] == pytest.approx(0.25, abs=0.02 * 0.25)
        assert counts[0] == pytest.approx(0.5, abs=0.02 * 0.5)
        assert counts[1] == pytest.approx(0.25, abs=0.02 * 0.25)

    def test_density_matches_direct_pair_sum(self):
        # Oracle: explicit summation over all 16 (j, k) pairs.
        n, sigma = 2, 4.0
        mode = SqueezedMode(sigma)
        grid = (np.arange(4) - 1.5) * delta(n)
        direct = sum(
            float(modes.u_eval(mode, 0.0 - (grid[j] - grid[k]) / sqrt(2))) ** 2
            for j in range(4)
            for k in range(4)
        ) / 16.0
        assert abs(float(modes.pd_density(mode, n, 0.0)) - direct) < 1e-12

    @pytest.mark.parametrize("n,sigma", [(1, 1.0), (2, 3.16), (3, 2.0)])
    def test_chi_square_against_direct_density(self, n, sigma):
        from conftest import pd_chi_square_pvalue

        assert pd_chi_square_pvalue(sigma, n, 1_000_000, seed=100 + n) > 0.001

    def test_scalar_draw_matches_vector_protocol(self, seq_rng):
        mode = SqueezedMode(3.0)
        rng = seq_rng([0.25], [0.9])
        value = modes.sample_pd(mode, 2, rng)
        # d index 13 of cumw -> d = +... recompute via the documented rule
        d_grid, weights = modes.pd_mixture_weights(2)
        idx = int(np.searchsorted(np.cumsum(weights), 0.9, side="right"))
        expected = d_grid[idx] * delta(2) / sqrt(2) + 0.25 / (3.0 * sqrt(2))
        assert value == expected


class TestDecompose:
    def test_zero(self):
        dec = modes.decompose_pd(0.0, 3)
        assert dec.t == 0 and dec.delta_p == 0.0

    def test_spec_point(self):
        dec = modes.decompose_pd(1.0, 2)
        assert dec.t == 1
        assert dec.delta_p == pytest.approx(0.1283792, abs=1e-7)

    def test_half_boundary_belongs_to_lower_t(self):
        # Construct p_d whose scaled coordinate is exactly 1.5.
        d = delta(2)
        p_d = 1.5 * d / sqrt(2)
        for _ in range(4):
            x = sqrt(2) * p_d / d
            if x == 1.5:
                break
            p_d = np.nextafter(p_d, p_d + (1.5 - x))
        assert sqrt(2) * p_d / d == 1.5
        dec = modes.decompose_pd(p_d, 2)
        assert dec.t == 1 and dec.delta_p == 0.5

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        for n in (1, 2, 6):
            step = delta(n) / sqrt(2)
            for p_d in rng.uniform(-4, 4, 3500):
                dec = modes.decompose_pd(p_d, n)
                assert -0.5 < dec.delta_p <= 0.5
                assert abs((dec.t + dec.delta_p) * step - p_d) < 1e-12

    def test_decomposition_validation(self):
        with pytest.raises(ValueError):
            PdDecomposition(0, 0.75)
        with pytest.raises(ValueError):
            PdDecomposition(0, -0.5)
