from math import erf, exp, log10, pi, sqrt

import numpy as np
import pytest

from bellswap import analytic, modes
from bellswap.analytic import NoSolutionError
from bellswap.register import delta


def erf_oracle(x: float) -> float:
    """Independent erf: Maclaurin series for small x, backward-evaluated
    continued fraction for the erfc tail at large x."""
    if x < 0:
        return -erf_oracle(-x)
    if x < 2.0:
        total, term = 0.0, x
        for k in range(40):
            total += term / (2 * k + 1)
            term *= -x * x / (k + 1)
        return 2.0 / sqrt(pi) * total
    # erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + (2/2)/(x + (3/2)/(x + ...))))
    tail = 0.0
    for k in range(160, 0, -1):
        tail = (k / 2.0) / (x + tail)
    return 1.0 - exp(-x * x) / sqrt(pi) / (x + tail)


class TestErfAccuracy:
    def test_matches_series_and_fraction_oracle(self):
        for x in np.linspace(0.0, 6.0, 241):
            assert abs(erf(x) - erf_oracle(float(x))) < 1e-12


class TestProbNbPairs:
    def test_large_sigma_limit(self):
        assert analytic.prob_nb_pairs(2, 1e9) == pytest.approx(0.75, abs=1e-12)

    def test_zero_sigma(self):
        assert analytic.prob_nb_pairs(3, 0.0) == 0.0

    def test_15db_value_via_erf_oracle(self):
        sigma = modes.sigma_from_db(15.0)
        expected = 0.75 * erf_oracle(0.5 * sigma * sqrt(pi / 4))
        value = analytic.prob_nb_pairs(2, sigma)
        assert value == pytest.approx(expected, abs=1e-12)
        assert value == pytest.approx(0.7497, abs=1e-4)

    def test_monotone_in_sigma(self):
        # strictly increasing until erf saturates at double precision
        values = [analytic.prob_nb_pairs(3, s) for s in np.linspace(0.1, 8, 40)]
        assert all(b > a for a, b in zip(values, values[1:]))
        tail = [analytic.prob_nb_pairs(3, s) for s in np.linspace(8, 100, 40)]
        assert all(b >= a for a, b in zip(tail, tail[1:]))

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            analytic.prob_nb_pairs(1, 2.0)


class TestProbExtraPair:
    def test_large_sigma_limit(self):
        assert analytic.prob_extra_pair(2, 1e9) == pytest.approx(0.25, abs=1e-12)

    def test_zero_sigma(self):
        assert analytic.prob_extra_pair(2, 0.0) == 0.0

    def test_ratio_identity(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            n = int(rng.integers(2, 9))
            sigma = float(rng.uniform(0.2, 30.0))
            ratio = analytic.prob_extra_pair(n, sigma) / analytic.prob_nb_pairs(n, sigma)
            assert ratio == pytest.approx((0.5**n) / (0.5 + 0.5**n), rel=1e-12)


class TestSuccessProb:
    def test_substitution_identity_exact(self):
        for sigma in (1.0, 3.16, 5.62):
            for s_c in (0, 1, 3):
                for n_b in (1, 2, 4):
                    assert analytic.success_prob(sigma, s_c, n_b) == analytic.prob_nb_pairs(
                        n_b + 1 + s_c, sigma
                    )

    def test_printed_form(self):
        # Independently coded closed form, as printed.
        rng = np.random.default_rng(8)
        for _ in range(60):
            s_c = int(rng.integers(0, 5))
            n_b = int(rng.integers(1, 6))
            sigma = float(rng.uniform(0.5, 40.0))
            printed = (0.5 + 1.0 / (2**n_b * 2 ** (s_c + 1))) * erf(
                sigma / sqrt(2 ** (s_c + 1)) * sqrt(pi / 2 ** (n_b + 2))
            )
            assert analytic.success_prob(sigma, s_c, n_b) == pytest.approx(printed, rel=1e-14)

    def test_strictly_decreasing_in_sc(self):
        sigma = modes.sigma_from_db(12.0)
        values = [analytic.success_prob(sigma, s_c, 2) for s_c in range(6)]
        assert all(b < a for a, b in zip(values, values[1:]))


class TestConditionalProbabilityConsistency:
    @pytest.mark.parametrize("n,s_c,sigma", [(2, 0, 4.0), (3, 0, 5.0), (3, 1, 5.0)])
    def test_window_quadrature_reproduces_closed_form(self, n, s_c, sigma):
        # Brute-force derivation of the closed form: integrate the conditional
        # success density u(delta_p * Delta/sqrt2)^2 / 2**(n+1) over both
        # first-bit windows (t in [0, 2^(n-1)] and t in [-2^(n-1), 0]),
        # cell by cell.
        mode = modes.SqueezedMode(sigma)
        step = delta(n) / sqrt(2)
        half = 2 ** (n - 1)

        def cell_integral(t):
            xs = np.linspace((t - 0.5) * step, (t + 0.5) * step, 801)
            ys = []
            for p in xs:
                dec = modes.decompose_pd(float(p), n)
                ys.append(float(modes.u_eval(mode, dec.delta_p * step)) ** 2)
            w = np.ones(len(xs))
            w[1:-1:2], w[2:-1:2] = 4.0, 2.0
            return float(np.dot(w, ys) * (xs[1] - xs[0]) / 3.0)

        total = sum(cell_integral(t) for t in range(0, half + 1))
        total += sum(cell_integral(t) for t in range(-half, 1))
        total /= 2 ** (n + 1)
        assert abs(total - analytic.prob_nb_pairs(n, sigma)) < 1e-6


class TestScSelection:
    def test_continuous_bound_value(self):
        value = analytic.required_sc_real(modes.sigma_from_db(10.0), 4, 2.2)
        assert value == pytest.approx(2.5577, abs=2e-4)

    def test_defining_inequality(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            sigma = float(rng.uniform(0.5, 40.0))
            n_b = int(rng.integers(1, 7))
            c = float(rng.uniform(1.0, 3.5))
            s_c = max(0, int(np.ceil(analytic.required_sc_real(sigma, n_b, c))))
            if s_c > 0 or analytic.required_sc_real(sigma, n_b, c) <= 0:
                assert analytic.truncation_margin(sigma, s_c, n_b) > c or s_c == 0

    def test_integer_choice_satisfies_margin(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            sigma = float(rng.uniform(0.5, 40.0))
            n_b = int(rng.integers(1, 7))
            c = float(rng.uniform(1.0, 3.5))
            s_c = analytic.min_sc(sigma, n_b, c)
            if s_c > 0:
                assert analytic.truncation_margin(sigma, s_c, n_b) > c
                # minimality: one fewer qubit would violate the margin
                assert analytic.truncation_margin(sigma, s_c - 1, n_b) <= c

    def test_large_sigma_limits(self):
        assert analytic.required_sc_real(1e12, 3, 2.2) == pytest.approx(-1.0, abs=1e-9)
        assert analytic.min_sc(1e12, 3, 2.2) == 0

    def test_paper_operating_points(self):
        assert analytic.min_sc(modes.sigma_from_db(10.0), 4, 2.2) == 3
        assert analytic.min_sc(modes.sigma_from_db(15.0), 4, 2.2) == 2


class TestBoundsAndMax:
    def test_bounds_ordered_and_bracketing(self):
        rng = np.random.default_rng(13)
        for _ in range(1000):
            sigma = modes.sigma_from_db(float(rng.uniform(0.0, 30.0)))
            n_b = int(rng.integers(1, 8))
            c = float(rng.uniform(1.5, 3.0))
            lower, upper = analytic.prob_bounds(sigma, n_b, c)
            assert lower < upper
            best = analytic.max_success_prob(sigma, n_b, c)
            assert lower < best <= upper + 1e-12

    def test_upper_bound_doubling_recursion(self):
        # The recursion drops a term of order 1/2**n_b, so its quality
        # improves with n_b and degrades as sigma saturates the bound.
        for n_b, dbs in ((4, (12.0, 15.0, 18.0)), (5, (12.0, 18.0, 24.0)), (6, (12.0, 18.0, 24.0))):
            for db in dbs:
                sigma = modes.sigma_from_db(db)
                _, up1 = analytic.prob_bounds(sigma, n_b, 2.2)
                _, up2 = analytic.prob_bounds(sqrt(2) * sigma, n_b + 1, 2.2)
                assert abs(up1 - up2) < 0.01

    def test_doubling_recursion_gap_shrinks_with_nb(self):
        sigma = modes.sigma_from_db(18.0)
        gaps = []
        for n_b in (4, 5, 6, 7):
            _, up1 = analytic.prob_bounds(sigma * 2 ** (-0.5 * (n_b - 4)), n_b, 2.2)
            _, up2 = analytic.prob_bounds(sigma * 2 ** (-0.5 * (n_b - 4)) * sqrt(2), n_b + 1, 2.2)
            gaps.append(abs(up1 - up2))
        assert all(b < a for a, b in zip(gaps, gaps[1:]))

    def test_max_monotone_on_grid(self):
        for n_b in range(1, 6):
            values = [
                analytic.max_success_prob(modes.sigma_from_db(db), n_b, 2.2)
                for db in np.linspace(0.0, 30.0, 200)
            ]
            assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))


class TestMinSqueezing:
    def test_round_trip_at_attained_targets(self):
        for p_target, n_b in ((0.40, 4), (0.48, 3), (0.25, 5)):
            db = analytic.min_squeezing_db(p_target, n_b, 2.2)
            value = analytic.max_success_prob(modes.sigma_from_db(db), n_b, 2.2)
            assert value == pytest.approx(p_target, abs=1e-6)

    def test_threshold_semantics_at_jumps(self):
        # Returned point is minimal: value >= target there, < target just below.
        for p_target, n_b in ((0.30, 5), (0.45, 2)):
            db = analytic.min_squeezing_db(p_target, n_b, 2.2)
            assert analytic.max_success_prob(modes.sigma_from_db(db), n_b, 2.2) >= p_target
            below = db - 1e-4
            assert analytic.max_success_prob(modes.sigma_from_db(below), n_b, 2.2) < p_target

    def test_doubling_step(self):
        # Per extra pair: exactly ~3.01 dB for a mid-range target; for a
        # target near the 0.5 ceiling the steps start higher and decay
        # toward 3.01 (solver-derived values frozen below).
        for n_b in (4, 5, 6, 7):
            step = analytic.min_squeezing_db(0.3, n_b + 1, 2.2) - analytic.min_squeezing_db(
                0.3, n_b, 2.2
            )
            assert 2.8 <= step <= 3.2
        steps_04 = [
            analytic.min_squeezing_db(0.4, n_b + 1, 2.2) - analytic.min_squeezing_db(0.4, n_b, 2.2)
            for n_b in (4, 5, 6, 7)
        ]
        assert steps_04 == pytest.approx([3.235, 3.127, 3.070, 3.040], abs=0.01)
        assert all(b < a for a, b in zip(steps_04, steps_04[1:]))

    def test_unreachable_target(self):
        with pytest.raises(NoSolutionError):
            analytic.min_squeezing_db(0.6, 3, 2.2)

    def test_already_met_target(self):
        with pytest.raises(NoSolutionError):
            analytic.min_squeezing_db(1e-6, 1, 2.2, bracket=(20.0, 60.0))


class TestSaturationThreshold:
    def test_constant_term(self):
        constant = analytic.saturation_threshold_db(2, 2.2) - 2 * 10 * log10(2)
        assert constant == pytest.approx(7.9, abs=0.05)

    def test_n2_value(self):
        assert analytic.saturation_threshold_db(2, 2.2) == pytest.approx(13.92, abs=0.05)

    def test_linear_in_n(self):
        diffs = [
            analytic.saturation_threshold_db(n + 1, 2.2) - analytic.saturation_threshold_db(n, 2.2)
            for n in range(2, 8)
        ]
        assert all(d == pytest.approx(10 * log10(2), abs=1e-12) for d in diffs)

    def test_saturation_holds_above_threshold(self):
        for n in (2, 3, 4):
            db = analytic.saturation_threshold_db(n, 2.2)
            value = analytic.prob_nb_pairs(n, modes.sigma_from_db(db))
            assert value >= 0.99 * (0.5 + 0.5**n)


class TestPrediction:
    def test_predict_bundles_consistent_fields(self):
        pred = analytic.predict(modes.sigma_from_db(14.0), 3)
        assert pred.s_c == analytic.min_sc(pred.sigma, 3, pred.c)
        assert pred.p_lower < pred.p_success <= pred.p_upper
        with pytest.raises(ValueError):
            analytic.AnalyticPrediction(2.0, 3, 2.2, 1, 0.9, 0.5, 0.8)
