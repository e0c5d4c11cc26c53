import math
from datetime import date, timedelta

import numpy as np
import pytest

from mtdd.errors import DataError
from mtdd.oracles import gbm_simulate
from mtdd.returns import (
    D_EVAL_LEFT,
    LOG_WINDOW,
    XI_THEORETICAL,
    XI_WINDOW,
    NormalizedReturnSeries,
    PriceSeries,
    VolEstimate,
    diffusion_coeff,
    distribution_stats,
    historical_vol,
    normalized_returns,
    xi_transform,
    zeta_q_transform,
)


def make_series(closes, start=date(2015, 1, 1)):
    dates = [start + timedelta(days=i) for i in range(len(closes))]
    return PriceSeries(dates=dates, closes=np.asarray(closes, dtype=float))


def gbm_series(n, mu=0.05, sigma=0.2, seed=0, s0=100.0):
    path = gbm_simulate(s0, mu, sigma, n / 252.0, n, seed=seed)
    return make_series(path.values, start=date(1970, 1, 1))


class TestPriceSeries:
    def test_rejects_short_series(self):
        with pytest.raises(DataError, match="at least 2"):
            make_series([100.0])

    def test_rejects_unsorted_dates(self):
        dates = [date(2015, 1, 2), date(2015, 1, 1)]
        with pytest.raises(DataError, match="ascending"):
            PriceSeries(dates=dates, closes=np.array([1.0, 2.0]))

    def test_rejects_nonpositive_close(self):
        with pytest.raises(DataError, match="positive"):
            make_series([100.0, -1.0])


def test_xi_transform_identity_at_reference():
    assert xi_transform(100.0, 100.0, 0.05, 0.2) == 1.0


def test_xi_transform_flat_when_exponent_vanishes():
    # mu = sigma^2/2 kills the exponent outright
    assert xi_transform(123.0, 100.0, 0.02, 0.2) == pytest.approx(1.0)


def test_xi_transform_known_exponent():
    # a = 1 - 2*0.05/0.04 = -1.5
    value = xi_transform(110.0, 100.0, 0.05, 0.2)
    assert value == pytest.approx(1.1 ** -1.5, rel=1e-14)


def test_diffusion_coeff_consistent_with_transform():
    s, s0, mu, sigma = 120.0, 100.0, 0.03, 0.25
    a = 1.0 - 2.0 * mu / sigma**2
    xi = xi_transform(s, s0, mu, sigma)
    expected = 0.5 * sigma**2 * a**2 * xi**2
    assert diffusion_coeff(s, s0, mu, sigma) == pytest.approx(expected, rel=1e-13)


def test_zeta_q_transform():
    assert zeta_q_transform(100.0, 100.0, 0.05, 0.2, 0.0) == 0.0
    got = zeta_q_transform(110.0, 100.0, 0.05, 0.2, 2.0)
    assert got == pytest.approx(math.log(1.1) + (0.05 - 0.02) * 2.0, rel=1e-14)


def test_transform_input_validation():
    with pytest.raises(ValueError):
        xi_transform(-1.0, 100.0, 0.05, 0.2)
    with pytest.raises(ValueError):
        diffusion_coeff(100.0, 100.0, 0.05, 0.0)
    with pytest.raises(ValueError):
        zeta_q_transform(100.0, 100.0, 0.05, 0.2, -1.0)


class TestHistoricalVol:
    def test_matches_manual_computation(self):
        series = gbm_series(30)  # 31 closes, 30 returns
        rets = np.diff(np.log(series.closes))
        estimates = historical_vol(series, 10, annualization=252)
        assert len(estimates) == 21
        manual = rets[:10].std(ddof=1) * math.sqrt(252)
        assert estimates[0].sigma == pytest.approx(manual, rel=1e-12)
        manual_last = rets[-10:].std(ddof=1) * math.sqrt(252)
        assert estimates[-1].sigma == pytest.approx(manual_last, rel=1e-12)

    def test_recovers_gbm_vol(self):
        series = gbm_series(3000, sigma=0.25, seed=4)
        estimate = historical_vol(series, 2999)[0]
        # sampling band: sigma * (1 +- 4/sqrt(2(n-1)))
        assert abs(estimate.sigma - 0.25) < 0.25 * 4 / math.sqrt(2 * 2998)

    def test_constant_series_has_zero_vol(self):
        series = make_series([50.0] * 40)
        estimates = historical_vol(series, 10)
        assert all(e.sigma == 0.0 for e in estimates)

    def test_window_longer_than_history_raises(self):
        series = make_series([100.0, 101.0, 99.0])
        with pytest.raises(DataError, match="window"):
            historical_vol(series, 10)

    def test_rejects_tiny_window(self):
        with pytest.raises(ValueError, match="window_days"):
            historical_vol(gbm_series(30), 1)

    def test_estimate_validation(self):
        with pytest.raises(ValueError, match="sigma"):
            VolEstimate(sigma=-0.1, window_days=10, annualization=252)


class TestNormalizedReturns:
    def test_xi_theoretical_is_approximately_standard_normal(self):
        series = gbm_series(20_000, mu=0.05, sigma=0.2, seed=2)
        nr = normalized_returns(series, XI_THEORETICAL, drift=0.05, fixed_vol=0.2)
        assert nr.values.size == 20_000
        assert abs(nr.values.mean()) < 0.03
        assert abs(nr.values.std(ddof=1) - 1.0) < 0.02

    def test_log_window_scheme_unit_variance(self):
        series = gbm_series(20_000, mu=0.05, sigma=0.2, seed=3)
        nr = normalized_returns(series, LOG_WINDOW, window_days=90)
        assert nr.values.size == 20_000 - 90
        assert abs(nr.values.std(ddof=1) - 1.0) < 0.03

    def test_xi_window_alignment(self):
        series = gbm_series(500, seed=6)
        nr = normalized_returns(series, XI_WINDOW, drift=0.05, window_days=60)
        assert nr.values.size == 500 - 60

    def test_left_and_midpoint_agree_for_small_steps(self):
        series = gbm_series(1000, seed=7)
        mid = normalized_returns(series, XI_THEORETICAL, drift=0.05, fixed_vol=0.2)
        left = normalized_returns(
            series, XI_THEORETICAL, drift=0.05, fixed_vol=0.2, d_eval=D_EVAL_LEFT
        )
        # the two evaluations differ by the factor e^{w/2} ~ 1 + w/2 per step
        np.testing.assert_allclose(mid.values, left.values, rtol=0.05, atol=0.01)
        assert not np.array_equal(mid.values, left.values)

    def test_stable_form_matches_direct_ratio(self):
        # one large step, computed directly from the definitions
        series = make_series([100.0, 140.0])
        mu, sigma = 0.03, 0.3
        a = 1.0 - 2.0 * mu / sigma**2
        dt = 1.0 / 252.0
        nr_left = normalized_returns(
            series, XI_THEORETICAL, drift=mu, fixed_vol=sigma, d_eval=D_EVAL_LEFT
        )
        xi0 = xi_transform(100.0, 100.0, mu, sigma)
        xi1 = xi_transform(140.0, 100.0, mu, sigma)
        direct = (xi1 - xi0) / math.sqrt(
            2.0 * diffusion_coeff(100.0, 100.0, mu, sigma) * dt
        )
        assert nr_left.values[0] == pytest.approx(direct, rel=1e-12)
        # midpoint variant evaluates D at the geometric midpoint instead
        nr_mid = normalized_returns(
            series, XI_THEORETICAL, drift=mu, fixed_vol=sigma
        )
        s_mid = math.sqrt(100.0 * 140.0)
        direct_mid = (xi1 - xi0) / math.sqrt(
            2.0 * diffusion_coeff(s_mid, 100.0, mu, sigma) * dt
        )
        assert nr_mid.values[0] == pytest.approx(direct_mid, rel=1e-12)

    def test_sqrt2_conventions(self):
        series = gbm_series(300, seed=8)
        base = normalized_returns(series, XI_THEORETICAL, drift=0.05, fixed_vol=0.2)
        wide = normalized_returns(
            series, XI_THEORETICAL, drift=0.05, fixed_vol=0.2, xi_sqrt2=False
        )
        np.testing.assert_allclose(wide.values, base.values * math.sqrt(2.0), rtol=1e-13)
        log_base = normalized_returns(series, LOG_WINDOW, window_days=30)
        log_narrow = normalized_returns(
            series, LOG_WINDOW, window_days=30, log_sqrt2=True
        )
        np.testing.assert_allclose(
            log_narrow.values, log_base.values / math.sqrt(2.0), rtol=1e-13
        )

    def test_degenerate_exponent_falls_back_to_log(self):
        # mu = sigma^2/2 makes the exponent zero for every step
        series = gbm_series(300, seed=9)
        sigma = 0.2
        nr = normalized_returns(
            series, XI_THEORETICAL, drift=0.5 * sigma**2, fixed_vol=sigma
        )
        assert len(nr.fallback_indices) == nr.values.size
        log_like = np.diff(np.log(series.closes)) / (sigma / math.sqrt(252.0))
        np.testing.assert_allclose(nr.values, log_like, rtol=1e-12)

    def test_constant_series_normalizes_to_zeros(self):
        series = make_series([75.0] * 200)
        nr = normalized_returns(series, XI_WINDOW, drift=0.05, window_days=30)
        assert np.all(nr.values == 0.0)

    def test_zero_vol_with_moving_price_is_an_error(self):
        closes = [100.0] * 40 + [120.0]
        series = make_series(closes)
        with pytest.raises(DataError, match="zero window volatility"):
            normalized_returns(series, XI_WINDOW, drift=0.05, window_days=20)

    def test_requires_the_right_arguments(self):
        series = gbm_series(300)
        with pytest.raises(ValueError, match="fixed_vol"):
            normalized_returns(series, XI_THEORETICAL, drift=0.05)
        with pytest.raises(ValueError, match="window_days"):
            normalized_returns(series, XI_WINDOW, drift=0.05)
        with pytest.raises(ValueError, match="scheme"):
            normalized_returns(series, "zscore", drift=0.05)

    def test_series_shorter_than_window_raises(self):
        series = gbm_series(50)
        with pytest.raises(DataError):
            normalized_returns(series, LOG_WINDOW, window_days=80)

    def test_finite_guard(self):
        with pytest.raises(ValueError, match="finite"):
            NormalizedReturnSeries(
                values=np.array([0.0, np.inf]), scheme=XI_THEORETICAL
            )


class TestDistributionStats:
    def test_standard_normal_sample(self):
        rng = np.random.default_rng(12)
        x = rng.standard_normal(200_000)
        st = distribution_stats(x)
        assert st.count == 200_000
        assert abs(st.mean) < 0.01
        assert st.stddev == pytest.approx(1.0, abs=0.01)
        assert abs(st.skewness) < 0.02
        assert abs(st.excess_kurtosis) < 0.05
        assert st.tail_mass_2 == pytest.approx(0.0455, abs=0.002)
        assert st.tail_mass_3 == pytest.approx(0.0027, abs=0.0006)
        assert not st.degenerate

    def test_accepts_normalized_return_series(self):
        series = gbm_series(500, seed=13)
        nr = normalized_returns(series, XI_THEORETICAL, drift=0.05, fixed_vol=0.2)
        st = distribution_stats(nr)
        assert st.count == nr.values.size

    def test_histogram_clamps_and_accounts_for_everything(self):
        x = np.concatenate([np.zeros(50), np.array([-12.0, 9.0])])
        st = distribution_stats(x, bins=10)
        assert st.counts.sum() == x.size
        assert st.bin_edges[0] == -5.0
        assert st.bin_edges[-1] == 5.0
        assert st.counts[0] >= 1  # the -12 lands in the leftmost bin
        assert st.counts[-1] >= 1

    def test_known_skewed_sample(self):
        rng = np.random.default_rng(14)
        x = np.exp(rng.standard_normal(100_000) * 0.5)
        st = distribution_stats(x)
        assert st.skewness > 1.0
        assert st.excess_kurtosis > 1.0

    def test_degenerate_sample_flagged(self):
        st = distribution_stats(np.full(100, 3.0))
        assert st.degenerate
        assert math.isnan(st.skewness)
        assert math.isnan(st.excess_kurtosis)

    def test_rejects_small_samples(self):
        with pytest.raises(DataError, match="at least 30"):
            distribution_stats(np.zeros(10))
