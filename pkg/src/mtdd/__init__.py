"""Mirror-time diffusion discount (MTDD) option pricing and analytics."""

from ._backend import backend_name
from .black import (
    CALL,
    PUT,
    MarketParams,
    OptionSpec,
    black_price,
    expected_payoff_bsm,
    forward_price,
    implied_vol,
    relative_moneyness,
)
from .distributions import (
    LogNormalLaw,
    lognormal_density_q,
    norm_cdf,
    norm_pdf,
    norm_ppf,
)
from .engine import (
    MODE_STRIKE,
    MODE_ZERO,
    MODES,
    MtddQuote,
    QuadratureConfig,
    mtdd_call,
    mtdd_kernel,
    mtdd_profile,
    mtdd_put,
)
from .errors import (
    ConvergenceError,
    DataError,
    DegenerateLawError,
    GridResolutionError,
    PriceBoundsError,
)
from .oracles import (
    FdGrid,
    FdSolution,
    McConfig,
    PathSeries,
    fd_discount_solve,
    gbm_simulate,
    mc_mtdd_price,
)
from .returns import (
    DistributionStats,
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

__version__ = "0.1.0"

__all__ = [
    "CALL",
    "PUT",
    "MODE_STRIKE",
    "MODE_ZERO",
    "MODES",
    "MarketParams",
    "OptionSpec",
    "MtddQuote",
    "QuadratureConfig",
    "LogNormalLaw",
    "McConfig",
    "FdGrid",
    "FdSolution",
    "PathSeries",
    "PriceSeries",
    "VolEstimate",
    "NormalizedReturnSeries",
    "DistributionStats",
    "ConvergenceError",
    "DataError",
    "DegenerateLawError",
    "GridResolutionError",
    "PriceBoundsError",
    "backend_name",
    "black_price",
    "expected_payoff_bsm",
    "forward_price",
    "implied_vol",
    "relative_moneyness",
    "norm_pdf",
    "norm_cdf",
    "norm_ppf",
    "lognormal_density_q",
    "mtdd_kernel",
    "mtdd_call",
    "mtdd_put",
    "mtdd_profile",
    "gbm_simulate",
    "mc_mtdd_price",
    "fd_discount_solve",
    "xi_transform",
    "diffusion_coeff",
    "zeta_q_transform",
    "historical_vol",
    "normalized_returns",
    "distribution_stats",
]
