"""Black pricing on the forward and its inversion to implied volatility."""

import math
from dataclasses import dataclass

from .distributions import norm_cdf, norm_pdf
from .errors import ConvergenceError, PriceBoundsError

CALL = "call"
PUT = "put"

_MIN_TOTAL_VOL = 1e-12
_VOL_LO = 1e-6
_VOL_HI = 5.0
_VOL_TOL = 1e-10
_MAX_ITER = 100


@dataclass(frozen=True)
class MarketParams:
    """Market state for one underlying: spot, flat carry rates, vol, maturity."""

    spot: float
    rate: float
    dividend: float
    vol: float
    maturity: float

    def __post_init__(self):
        if self.spot <= 0:
            raise ValueError(f"spot must be positive, got {self.spot}")
        if self.vol <= 0:
            raise ValueError(f"vol must be positive, got {self.vol}")
        if self.maturity <= 0:
            raise ValueError(f"maturity must be positive, got {self.maturity}")

    @property
    def drift(self) -> float:
        """Carry drift of the forward, rate - dividend."""
        return self.rate - self.dividend

    @property
    def discount(self) -> float:
        return math.exp(-self.rate * self.maturity)


@dataclass(frozen=True)
class OptionSpec:
    """A European option: strike plus call/put kind."""

    strike: float
    kind: str = CALL

    def __post_init__(self):
        if self.strike <= 0:
            raise ValueError(f"strike must be positive, got {self.strike}")
        if self.kind not in (CALL, PUT):
            raise ValueError(f"kind must be {CALL!r} or {PUT!r}, got {self.kind!r}")


def forward_price(params: MarketParams) -> float:
    """Spot compounded at the carry drift out to maturity."""
    return params.spot * math.exp(params.drift * params.maturity)


def relative_moneyness(forward: float, strike: float) -> float:
    """(F - K)/F: zero at the forward, positive where a call is in the money."""
    if forward <= 0:
        raise ValueError(f"forward must be positive, got {forward}")
    if strike <= 0:
        raise ValueError(f"strike must be positive, got {strike}")
    return (forward - strike) / forward


def expected_payoff_bsm(forward: float, spec: OptionSpec, vol: float, horizon: float) -> float:
    """Undiscounted expected payoff under the mean-preserving lognormal law.

    For a call this is F N(d1) - K N(d2) with d1 = (ln(F/K) + v^2/2)/v,
    d2 = d1 - v and v = vol*sqrt(horizon); puts follow by symmetry.  When v
    falls below 1e-12 the law is treated as a point mass and the intrinsic
    value is returned.
    """
    if forward <= 0:
        raise ValueError(f"forward must be positive, got {forward}")
    if vol < 0 or horizon < 0:
        raise ValueError("vol and horizon must be nonnegative")
    total = vol * math.sqrt(horizon)
    is_call = spec.kind == CALL
    if total < _MIN_TOTAL_VOL:
        payoff = forward - spec.strike if is_call else spec.strike - forward
        return max(payoff, 0.0)
    d1 = math.log(forward / spec.strike) / total + 0.5 * total
    d2 = d1 - total
    if is_call:
        return forward * norm_cdf(d1) - spec.strike * norm_cdf(d2)
    return spec.strike * norm_cdf(-d2) - forward * norm_cdf(-d1)


def black_price(params: MarketParams, spec: OptionSpec) -> float:
    """Discounted Black price, e^{-r T} times the expected payoff at the forward."""
    fwd = forward_price(params)
    return params.discount * expected_payoff_bsm(fwd, spec, params.vol, params.maturity)


def vega(params: MarketParams, spec: OptionSpec) -> float:
    """Price sensitivity to vol: e^{-r T} F phi(d1) sqrt(T), same for both kinds."""
    fwd = forward_price(params)
    total = params.vol * math.sqrt(params.maturity)
    d1 = math.log(fwd / spec.strike) / total + 0.5 * total
    return params.discount * fwd * norm_pdf(d1) * math.sqrt(params.maturity)


def implied_vol(target_price: float, params: MarketParams, spec: OptionSpec) -> float:
    """Volatility whose Black price matches ``target_price``; params.vol is ignored.

    Safeguarded Newton iteration on the analytic vega, falling back to
    bisection whenever a Newton step leaves the current bracket, searched
    inside [1e-6, 5.0].  Deterministic for fixed inputs.  Accuracy degrades
    for options so far from the money that the time value approaches float
    noise (vega underflow); such prices do not pin down a vol.

    Raises :class:`PriceBoundsError` when the target sits outside the static
    no-arbitrage bounds and :class:`ConvergenceError` when the matching vol
    lies outside the search bracket or the iteration cap is reached.
    """
    fwd = forward_price(params)
    disc = params.discount
    is_call = spec.kind == CALL
    intrinsic = max(fwd - spec.strike, 0.0) if is_call else max(spec.strike - fwd, 0.0)
    upper = disc * (fwd if is_call else spec.strike)
    lower = disc * intrinsic
    if not lower < target_price < upper:
        raise PriceBoundsError(
            f"target price {target_price} outside no-arbitrage bounds "
            f"({lower}, {upper}) for this option"
        )

    def price_at(v: float) -> float:
        return disc * expected_payoff_bsm(fwd, spec, v, params.maturity)

    lo, hi = _VOL_LO, _VOL_HI
    if price_at(lo) >= target_price:
        raise ConvergenceError(f"implied vol below search bracket [{_VOL_LO}, {_VOL_HI}]")
    if price_at(hi) <= target_price:
        raise ConvergenceError(f"implied vol above search bracket [{_VOL_LO}, {_VOL_HI}]")

    sigma = 0.5 * (lo + hi)
    for _ in range(_MAX_ITER):
        diff = price_at(sigma) - target_price
        if diff > 0.0:
            hi = sigma
        else:
            lo = sigma
        total = sigma * math.sqrt(params.maturity)
        d1 = math.log(fwd / spec.strike) / total + 0.5 * total
        slope = disc * fwd * norm_pdf(d1) * math.sqrt(params.maturity)
        if slope > 0.0:
            candidate = sigma - diff / slope
        else:
            candidate = 0.5 * (lo + hi)
        if not lo < candidate < hi:
            candidate = 0.5 * (lo + hi)
        step = abs(candidate - sigma)
        sigma = candidate
        if step < _VOL_TOL or hi - lo < _VOL_TOL:
            return sigma
    raise ConvergenceError(
        f"implied vol iteration did not converge within {_MAX_ITER} steps"
    )
