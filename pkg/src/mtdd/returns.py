"""Coordinate-transform return analytics.

The drift-absorbing power transform xi = (S/S0)^a with a = 1 - 2 mu/sigma^2
turns a constant-drift lognormal diffusion into a driftless one; its
state-dependent diffusion coefficient D = (sigma^2/2) a^2 (S/S0)^{2a} then
normalizes per-step increments onto a common scale.  This module computes
the transform, rolling vol estimates, normalized return series under three
schemes, and distribution diagnostics for comparing them against a standard
normal.
"""

import math
from dataclasses import dataclass, field
from datetime import date

import numpy as np

from .errors import DataError

XI_THEORETICAL = "xi_theoretical"
XI_WINDOW = "xi_window"
LOG_WINDOW = "log_window"
SCHEMES = (XI_THEORETICAL, XI_WINDOW, LOG_WINDOW)

D_EVAL_MIDPOINT = "midpoint"
D_EVAL_LEFT = "left"
D_EVALS = (D_EVAL_MIDPOINT, D_EVAL_LEFT)

# Below this exponent magnitude the power transform is numerically the
# identity and steps fall back to plain log normalization.
_DEGENERATE_EXPONENT = 1e-6

_MIN_STATS_SAMPLES = 30
_HIST_RANGE = 5.0


@dataclass
class PriceSeries:
    """Daily closes keyed by strictly ascending ISO dates."""

    dates: list[date]
    closes: np.ndarray

    def __post_init__(self):
        self.closes = np.asarray(self.closes, dtype=np.float64)
        if len(self.dates) != self.closes.size:
            raise DataError("dates and closes must have equal length")
        if self.closes.size < 2:
            raise DataError(f"need at least 2 closes, got {self.closes.size}")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise DataError("dates must be strictly ascending")
        if np.any(self.closes <= 0):
            raise DataError("closes must be strictly positive")


@dataclass(frozen=True)
class VolEstimate:
    """Annualized close-to-close volatility from one trailing window."""

    sigma: float
    window_days: int
    annualization: int

    def __post_init__(self):
        if self.window_days < 2:
            raise ValueError(f"window_days must be at least 2, got {self.window_days}")
        if self.annualization < 1:
            raise ValueError(
                f"annualization must be positive, got {self.annualization}"
            )
        if self.sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")


@dataclass
class NormalizedReturnSeries:
    """Per-step normalized returns under one scheme.

    ``fallback_indices`` lists the steps whose transform exponent was
    numerically degenerate and which therefore used the log normalization.
    """

    values: np.ndarray
    scheme: str
    fallback_indices: tuple[int, ...] = ()

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("normalized returns must be finite")


@dataclass
class DistributionStats:
    """Sample moments, tail masses and a clamped histogram on [-5, 5]."""

    count: int
    mean: float
    stddev: float
    skewness: float
    excess_kurtosis: float
    tail_mass_2: float
    tail_mass_3: float
    bin_edges: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)
    degenerate: bool = False


def xi_transform(s: float, s0: float, mu: float, sigma: float) -> float:
    """Power transform (s/s0)^a with the drift-killing exponent a = 1 - 2 mu/sigma^2."""
    if s <= 0 or s0 <= 0:
        raise ValueError("prices must be positive")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    a = 1.0 - 2.0 * mu / (sigma * sigma)
    return (s / s0) ** a


def diffusion_coeff(s: float, s0: float, mu: float, sigma: float) -> float:
    """Diffusion coefficient of the transformed price, (sigma^2/2) a^2 (s/s0)^{2a}."""
    if s <= 0 or s0 <= 0:
        raise ValueError("prices must be positive")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    a = 1.0 - 2.0 * mu / (sigma * sigma)
    return 0.5 * sigma * sigma * a * a * (s / s0) ** (2.0 * a)


def zeta_q_transform(s: float, s_ref: float, mu: float, sigma: float, elapsed: float) -> float:
    """Heat coordinate ln(s/s_ref) + (mu - sigma^2/2) * elapsed of a mirror-time price."""
    if s <= 0 or s_ref <= 0:
        raise ValueError("prices must be positive")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if elapsed < 0:
        raise ValueError(f"elapsed must be nonnegative, got {elapsed}")
    return math.log(s / s_ref) + (mu - 0.5 * sigma * sigma) * elapsed


def historical_vol(
    series: PriceSeries, window_days: int, annualization: int = 252
) -> list[VolEstimate]:
    """Rolling annualized close-to-close vol, one estimate per completed window.

    The estimate at position j covers the ``window_days`` log returns ending
    with the return into ``series.dates[window_days + j]``, so estimates align
    with ``series.dates[window_days:]`` and only use information available on
    their date.
    """
    if window_days < 2:
        raise ValueError(f"window_days must be at least 2, got {window_days}")
    n = series.closes.size
    if n <= window_days:
        raise DataError(
            f"series has {n} closes but a {window_days}-day window needs at least "
            f"{window_days + 1}"
        )
    rets = np.diff(np.log(series.closes))
    scale = math.sqrt(annualization)
    out = []
    for i in range(window_days, n):
        sigma = float(rets[i - window_days : i].std(ddof=1)) * scale
        out.append(
            VolEstimate(sigma=sigma, window_days=window_days, annualization=annualization)
        )
    return out


def _window_sigmas(series, window_days, annualization):
    """Vol for each normalizable step: step i -> i+1 uses the window ending at i."""
    estimates = historical_vol(series, window_days, annualization)
    n = series.closes.size
    usable = n - 1 - window_days
    if usable < 1:
        raise DataError(
            f"series has no steps with a complete {window_days}-day trailing window"
        )
    return np.array([e.sigma for e in estimates[:usable]])


def normalized_returns(
    series: PriceSeries,
    scheme: str,
    drift: float = 0.0,
    fixed_vol: float | None = None,
    window_days: int | None = None,
    annualization: int = 252,
    xi_sqrt2: bool = True,
    log_sqrt2: bool = False,
    d_eval: str = D_EVAL_MIDPOINT,
) -> NormalizedReturnSeries:
    """Per-step normalized returns under one of three schemes.

    ``xi_theoretical`` divides power-transform increments by sqrt(2 D dt)
    using a single model vol (``fixed_vol``); ``xi_window`` does the same but
    re-estimates the vol (and with it the exponent) from a trailing window of
    ``window_days`` log returns; ``log_window`` divides plain log returns by
    sigma*sqrt(dt) from the same trailing window.  ``xi_sqrt2``/``log_sqrt2``
    toggle the factor of sqrt(2) in the respective denominators.

    The transform reference price cancels algebraically from the normalized
    increment, so the computation uses the stable ratio form: with
    w = a * dlnS, the step value is expm1(w) (``d_eval='left'``, D taken at
    the step start) or 2*sinh(w/2) (``d_eval='midpoint'``, D at the
    geometric midpoint) over |a| * sigma * sqrt(dt), which is what
    sqrt(2 D dt) collapses to.  Steps with |a| < 1e-6 fall back to the log
    normalization (the small-exponent limit of the xi normalizer) and are
    reported in ``fallback_indices``.

    Zero window vol on a step is only tolerated when the step's return is
    also zero (the normalized value is then zero); otherwise it is a data
    error.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    if d_eval not in D_EVALS:
        raise ValueError(f"d_eval must be one of {D_EVALS}, got {d_eval!r}")
    dlog = np.diff(np.log(series.closes))
    dt = 1.0 / annualization

    if scheme == XI_THEORETICAL:
        if fixed_vol is None or fixed_vol <= 0:
            raise ValueError("xi_theoretical needs a positive fixed_vol")
        steps = dlog
        sigmas = np.full(steps.size, float(fixed_vol))
    else:
        if window_days is None:
            raise ValueError(f"{scheme} needs window_days")
        sigmas = _window_sigmas(series, window_days, annualization)
        steps = dlog[window_days:]

    zero_vol = sigmas <= 0.0
    if np.any(zero_vol & (steps != 0.0)):
        bad = int(np.nonzero(zero_vol & (steps != 0.0))[0][0])
        raise DataError(
            f"zero window volatility with a nonzero return at step {bad}"
        )
    safe_sigmas = np.where(zero_vol, 1.0, sigmas)
    root_dt = math.sqrt(dt)

    if scheme == LOG_WINDOW:
        denom = safe_sigmas * root_dt
        if log_sqrt2:
            denom = denom * math.sqrt(2.0)
        values = np.where(zero_vol, 0.0, steps / denom)
        return NormalizedReturnSeries(values=values, scheme=scheme)

    a = 1.0 - 2.0 * drift / (safe_sigmas * safe_sigmas)
    degenerate = np.abs(a) < _DEGENERATE_EXPONENT
    safe_a = np.where(degenerate, 1.0, a)
    w = safe_a * steps
    if d_eval == D_EVAL_MIDPOINT:
        core = 2.0 * np.sinh(0.5 * w)
    else:
        core = np.expm1(w)
    # With the sqrt(2) convention the denominator sqrt(2 D dt) collapses to
    # |a| sigma xi sqrt(dt) because D carries a factor sigma^2/2; dropping
    # the sqrt(2) leaves the values larger by that factor.
    scale = 1.0 if xi_sqrt2 else math.sqrt(2.0)
    xi_values = scale * core / (np.abs(safe_a) * safe_sigmas * root_dt)
    # The fallback is the small-exponent limit of the xi normalizer, which
    # coincides with the log scheme.
    fallback_values = scale * steps / (safe_sigmas * root_dt)
    values = np.where(degenerate, fallback_values, xi_values)
    values = np.where(zero_vol, 0.0, values)
    fallback = tuple(int(i) for i in np.nonzero(degenerate & ~zero_vol)[0])
    return NormalizedReturnSeries(values=values, scheme=scheme, fallback_indices=fallback)


def distribution_stats(returns, bins: int = 50) -> DistributionStats:
    """Moments, |x|>2 and |x|>3 tail masses, and a histogram clamped to [-5, 5].

    Accepts a :class:`NormalizedReturnSeries` or a plain array.  Skewness and
    excess kurtosis are the conventional central-moment ratios; a zero-spread
    sample is flagged degenerate and reports NaN for both shape numbers.
    """
    values = returns.values if isinstance(returns, NormalizedReturnSeries) else returns
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("returns must be one-dimensional")
    if x.size < _MIN_STATS_SAMPLES:
        raise DataError(
            f"need at least {_MIN_STATS_SAMPLES} samples for stable moments, got {x.size}"
        )
    if bins < 1:
        raise ValueError(f"bins must be positive, got {bins}")
    n = x.size
    mean = float(x.mean())
    centered = x - mean
    m2 = float(np.mean(centered**2))
    stddev = float(x.std(ddof=1))
    degenerate = m2 == 0.0
    if degenerate:
        skew = float("nan")
        exkurt = float("nan")
    else:
        m3 = float(np.mean(centered**3))
        m4 = float(np.mean(centered**4))
        skew = m3 / m2**1.5
        exkurt = m4 / (m2 * m2) - 3.0
    tail2 = float(np.mean(np.abs(x) > 2.0))
    tail3 = float(np.mean(np.abs(x) > 3.0))
    counts, edges = np.histogram(
        np.clip(x, -_HIST_RANGE, _HIST_RANGE), bins=bins, range=(-_HIST_RANGE, _HIST_RANGE)
    )
    return DistributionStats(
        count=n,
        mean=mean,
        stddev=stddev,
        skewness=skew,
        excess_kurtosis=exkurt,
        tail_mass_2=tail2,
        tail_mass_3=tail3,
        bin_edges=edges,
        counts=counts,
        degenerate=degenerate,
    )
