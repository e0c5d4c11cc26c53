"""Scalar probability primitives.

Standard-normal density/cdf/quantile plus the mean-preserving lognormal law
of a terminal forward, which is the weighting kernel of the pricing model.
"""

import math
from dataclasses import dataclass

from scipy.special import ndtri

from .errors import DegenerateLawError

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def norm_pdf(x: float) -> float:
    """Standard normal density exp(-x^2/2)/sqrt(2*pi)."""
    return math.exp(-0.5 * x * x) / _SQRT_2PI


def norm_cdf(x: float) -> float:
    """Standard normal cdf, evaluated through erfc so both tails stay accurate."""
    return 0.5 * math.erfc(-x * _INV_SQRT2)


def norm_ppf(p: float) -> float:
    """Inverse of :func:`norm_cdf` on the open interval (0, 1)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile argument must lie in (0, 1), got {p}")
    return float(ndtri(p))


@dataclass(frozen=True)
class LogNormalLaw:
    """Lognormal law with mean ``forward`` and log-dispersion ``total_stddev``.

    ``total_stddev`` is the annualized volatility scaled by the square root of
    the horizon; the log-mean carries the -v^2/2 correction so the law is
    mean-preserving around the forward.
    """

    forward: float
    total_stddev: float

    def __post_init__(self):
        if self.forward <= 0:
            raise ValueError(f"forward must be positive, got {self.forward}")
        if self.total_stddev < 0:
            raise ValueError(
                f"total_stddev must be nonnegative, got {self.total_stddev}"
            )


def lognormal_density_q(s: float, law: LogNormalLaw) -> float:
    """Density of ``law`` at the price ``s``.

    f(s) = exp(-(ln(s/F) + v^2/2)^2 / (2 v^2)) / (s v sqrt(2 pi)) with
    F = law.forward and v = law.total_stddev.  Integrates to one over
    (0, inf) and has mean F.
    """
    if s <= 0:
        raise ValueError(f"price must be positive, got {s}")
    v = law.total_stddev
    if v == 0:
        raise DegenerateLawError(
            "total_stddev is zero: the law is a point mass at the forward"
        )
    z = (math.log(s / law.forward) + 0.5 * v * v) / v
    return math.exp(-0.5 * z * z) / (s * v * _SQRT_2PI)
