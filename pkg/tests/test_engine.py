import math

import numpy as np
import pytest

from mtdd.black import (
    CALL,
    PUT,
    MarketParams,
    OptionSpec,
    black_price,
    expected_payoff_bsm,
    forward_price,
)
from mtdd.distributions import LogNormalLaw, lognormal_density_q
from mtdd.engine import (
    MODE_STRIKE,
    MODE_ZERO,
    MtddQuote,
    QuadratureConfig,
    mtdd_call,
    mtdd_kernel,
    mtdd_profile,
    mtdd_put,
)
from mtdd.errors import ConvergenceError

ZERO = QuadratureConfig(lower_bound_mode=MODE_ZERO)
STRIKE = QuadratureConfig(lower_bound_mode=MODE_STRIKE)


def make_params(**overrides):
    base = dict(spot=100.0, rate=0.0, dividend=0.0, vol=0.2, maturity=1.0)
    base.update(overrides)
    return MarketParams(**base)


class TestQuadratureConfig:
    def test_defaults(self):
        quad = QuadratureConfig()
        assert quad.lower_bound_mode == MODE_STRIKE
        assert quad.nodes == 256

    @pytest.mark.parametrize(
        "kwargs, match",
        [
            (dict(lower_bound_mode="floor"), "lower_bound_mode"),
            (dict(nodes=8), "nodes"),
            (dict(truncation_halfwidth=2.0), "truncation_halfwidth"),
            (dict(rel_tolerance=0.0), "rel_tolerance"),
        ],
    )
    def test_validation(self, kwargs, match):
        with pytest.raises(ValueError, match=match):
            QuadratureConfig(**kwargs)


def test_kernel_matches_lognormal_density():
    law = LogNormalLaw(forward=105.0, total_stddev=0.2 * math.sqrt(0.5))
    for s in (80.0, 100.0, 130.0):
        assert mtdd_kernel(s, 105.0, 0.2, 0.5) == pytest.approx(
            lognormal_density_q(s, law), rel=1e-14
        )


def test_kernel_rejects_negative_dispersion_inputs():
    with pytest.raises(ValueError):
        mtdd_kernel(100.0, 100.0, -0.2, 1.0)


def test_zero_mode_collapses_to_black_with_doubled_variance():
    # kernel dispersion sigma^2 T and inner Black dispersion sigma^2 T add
    # into a single lognormal with 2 sigma^2 T
    for vol in (0.1, 0.25, 0.5):
        for maturity in (0.25, 1.0, 2.0):
            for strike in (85.0, 100.0, 120.0):
                params = make_params(rate=0.03, vol=vol, maturity=maturity)
                spec = OptionSpec(strike=strike)
                got = mtdd_call(params, spec, ZERO).price
                doubled = make_params(
                    rate=0.03, vol=vol * math.sqrt(2.0), maturity=maturity
                )
                assert got == pytest.approx(black_price(doubled, spec), rel=1e-9)


def test_zero_mode_put_collapses_too():
    params = make_params(vol=0.3)
    spec = OptionSpec(strike=110.0, kind=PUT)
    doubled = make_params(vol=0.3 * math.sqrt(2.0))
    assert mtdd_put(params, spec, ZERO).price == pytest.approx(
        black_price(doubled, spec), rel=1e-9
    )


def test_strike_mode_atm_frozen_value():
    params = make_params()
    quote = mtdd_call(params, OptionSpec(strike=100.0), STRIKE)
    assert quote.price == pytest.approx(9.605929528616887, rel=1e-12)
    # sits strictly between the plain Black value and the zero-mode value
    assert 7.965567455405796 < quote.price < 11.246291601828245


def test_strike_mode_below_zero_mode():
    for strike in (80.0, 100.0, 125.0):
        spec = OptionSpec(strike=strike)
        params = make_params(vol=0.3)
        s = mtdd_call(params, spec, STRIKE).price
        z = mtdd_call(params, spec, ZERO).price
        assert s < z


def test_zero_mode_dominates_plain_black():
    for strike in (80.0, 100.0, 125.0):
        spec = OptionSpec(strike=strike)
        params = make_params()
        assert mtdd_call(params, spec, ZERO).price > black_price(params, spec)


def test_zero_mode_parity():
    params = make_params(rate=0.05, vol=0.25)
    call = mtdd_call(params, OptionSpec(strike=90.0, kind=CALL), ZERO).price
    put = mtdd_put(params, OptionSpec(strike=90.0, kind=PUT), ZERO).price
    target = params.discount * (forward_price(params) - 90.0)
    assert call - put == pytest.approx(target, rel=1e-10)


def test_equivalent_implied_vol_zero_mode_is_root_two_vol():
    params = make_params(vol=0.2)
    quote = mtdd_call(params, OptionSpec(strike=100.0), ZERO)
    assert quote.equiv_implied_vol == pytest.approx(0.2 * math.sqrt(2.0), abs=1e-9)


def test_equivalent_implied_vol_strike_mode_depends_on_moneyness():
    params = make_params()
    ivs = [
        mtdd_call(params, OptionSpec(strike=k), STRIKE).equiv_implied_vol
        for k in (80.0, 100.0, 120.0)
    ]
    assert all(iv is not None for iv in ivs)
    spread = max(ivs) - min(ivs)
    assert spread > 1e-3  # genuinely nonconstant across strikes


def test_monotone_in_vol_and_maturity_both_modes():
    for quad in (STRIKE, ZERO):
        prices_v = [
            mtdd_call(make_params(vol=v), OptionSpec(strike=105.0), quad).price
            for v in (0.1, 0.2, 0.3, 0.5)
        ]
        assert all(b >= a for a, b in zip(prices_v, prices_v[1:]))
        prices_t = [
            mtdd_call(make_params(maturity=t), OptionSpec(strike=105.0), quad).price
            for t in (0.25, 0.5, 1.0, 2.0)
        ]
        assert all(b >= a for a, b in zip(prices_t, prices_t[1:]))


def test_tiny_vol_prices_collapse_to_discounted_intrinsic():
    params = make_params(rate=0.05, vol=1e-4)
    fwd = forward_price(params)
    for strike in (90.0, 110.0):
        intrinsic = params.discount * max(fwd - strike, 0.0)
        for quad in (STRIKE, ZERO):
            got = mtdd_call(params, OptionSpec(strike=strike), quad).price
            assert got == pytest.approx(intrinsic, abs=1e-6)


def test_degenerate_truncation_flag():
    # strike far beyond the kernel window: nothing left to integrate
    params = make_params()
    quote = mtdd_call(params, OptionSpec(strike=700.0), STRIKE)
    assert quote.degenerate
    assert quote.price == 0.0
    assert quote.equiv_implied_vol is None


def test_kind_mismatch_raises():
    params = make_params()
    with pytest.raises(ValueError, match="call"):
        mtdd_call(params, OptionSpec(strike=100.0, kind=PUT))
    with pytest.raises(ValueError, match="put"):
        mtdd_put(params, OptionSpec(strike=100.0, kind=CALL))


def test_node_doubling_is_stable():
    params = make_params(vol=0.35, maturity=2.0)
    spec = OptionSpec(strike=90.0)
    coarse = mtdd_call(params, spec, QuadratureConfig(nodes=256)).price
    fine = mtdd_call(params, spec, QuadratureConfig(nodes=512)).price
    assert abs(fine - coarse) <= 1e-9 * fine


def test_unreachable_tolerance_raises():
    quad = QuadratureConfig(nodes=16, rel_tolerance=1e-30)
    params = make_params(vol=0.5, maturity=2.0)
    with pytest.raises(ConvergenceError, match="quadrature"):
        mtdd_call(params, OptionSpec(strike=100.0), quad)


def test_quote_is_frozen_dataclass():
    quote = MtddQuote(price=1.0, equiv_implied_vol=None)
    with pytest.raises(AttributeError):
        quote.price = 2.0


class TestProfile:
    def test_full_elapsed_matches_undiscounted_price(self):
        params = make_params(rate=0.04)
        spec = OptionSpec(strike=100.0)
        fwd = forward_price(params)
        value = mtdd_profile(fwd, params.maturity, params, spec, ZERO)
        quote = mtdd_call(params, spec, ZERO)
        assert value == pytest.approx(quote.price / params.discount, rel=1e-12)

    def test_small_elapsed_approaches_expected_payoff(self):
        params = make_params()
        spec = OptionSpec(strike=95.0)
        value = mtdd_profile(103.0, 1e-10, params, spec, ZERO)
        direct = expected_payoff_bsm(103.0, spec, params.vol, params.maturity)
        assert value == pytest.approx(direct, rel=1e-8)

    def test_increasing_in_reference_price_for_calls(self):
        params = make_params()
        spec = OptionSpec(strike=100.0)
        values = [
            mtdd_profile(s, 0.5, params, spec, STRIKE) for s in (80.0, 95.0, 110.0)
        ]
        assert values[0] < values[1] < values[2]

    def test_rejects_bad_elapsed(self):
        params = make_params()
        spec = OptionSpec(strike=100.0)
        with pytest.raises(ValueError, match="elapsed"):
            mtdd_profile(100.0, 0.0, params, spec)
        with pytest.raises(ValueError, match="elapsed"):
            mtdd_profile(100.0, 1.5, params, spec)
        with pytest.raises(ValueError, match="s_now"):
            mtdd_profile(-5.0, 0.5, params, spec)
