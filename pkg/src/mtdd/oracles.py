"""Independent numerical checks for the pricing engine.

Seeded geometric Brownian path simulation, Monte Carlo evaluation of the
kernel average, and a Crank-Nicolson march of the discount equation in heat
coordinates.  None of these share quadrature code with the engine, so
agreement is evidence rather than tautology.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from . import kernels
from .black import CALL, MarketParams, OptionSpec, forward_price
from .engine import MODE_STRIKE, MODE_ZERO, MODES
from .errors import GridResolutionError

_BOUNDARY_DRIFT_LIMIT = 1e-6


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo sampling plan."""

    paths: int
    seed: int = 0
    antithetic: bool = False

    def __post_init__(self):
        if self.paths < 1:
            raise ValueError(f"paths must be at least 1, got {self.paths}")
        if self.antithetic and self.paths % 2:
            raise ValueError("antithetic sampling needs an even path count")


@dataclass(frozen=True)
class FdGrid:
    """Finite-difference grid in the heat coordinate zeta."""

    zeta_halfwidth: float = 8.0
    space_steps: int = 800
    time_steps: int = 800

    def __post_init__(self):
        if self.zeta_halfwidth < 5:
            raise ValueError(
                f"zeta_halfwidth must be at least 5, got {self.zeta_halfwidth}"
            )
        if self.space_steps < 50:
            raise ValueError(f"space_steps must be at least 50, got {self.space_steps}")
        if self.time_steps < 50:
            raise ValueError(f"time_steps must be at least 50, got {self.time_steps}")


@dataclass
class PathSeries:
    """A simulated path: ascending times with strictly positive values."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise ValueError("times and values must be 1-d arrays of equal length")
        if self.times.size < 2:
            raise ValueError("a path needs at least two samples")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(self.values <= 0):
            raise ValueError("path values must stay positive")


def _standard_normals(rng: np.random.Generator, n: int) -> np.ndarray:
    # Uniform integers in [1, 2^53) mapped through the normal quantile keep
    # the draws identical across platforms for a fixed bit generator.
    u = rng.integers(1, 1 << 53, size=n) / float(1 << 53)
    return ndtri(u)


def gbm_simulate(
    s0: float, mu: float, sigma: float, horizon: float, steps: int, seed: int
) -> PathSeries:
    """Exact-in-distribution log stepping of geometric Brownian motion."""
    if s0 <= 0:
        raise ValueError(f"s0 must be positive, got {s0}")
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    if horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    if steps < 1:
        raise ValueError(f"steps must be at least 1, got {steps}")
    rng = np.random.Generator(np.random.PCG64(seed))
    dt = horizon / steps
    z = _standard_normals(rng, steps)
    increments = (mu - 0.5 * sigma * sigma) * dt + sigma * math.sqrt(dt) * z
    log_path = np.concatenate(([0.0], np.cumsum(increments)))
    times = np.linspace(0.0, horizon, steps + 1)
    return PathSeries(times=times, values=s0 * np.exp(log_path))


def mc_mtdd_price(
    params: MarketParams, spec: OptionSpec, mode: str, mc: McConfig
) -> tuple[float, float]:
    """Monte Carlo estimate of the model price; returns (price, std_error).

    Draws the dummy forward from the mean-preserving lognormal kernel and
    averages discounted Black values of the payoff at each draw; in strike
    mode, draws at or below the strike contribute zero.  With antithetic
    sampling the standard error is computed over pair means.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    rng = np.random.Generator(np.random.PCG64(mc.seed))
    total = params.vol * math.sqrt(params.maturity)
    fwd = forward_price(params)
    if mc.antithetic:
        half = mc.paths // 2
        z = _standard_normals(rng, half)
        z = np.concatenate([z, -z])
    else:
        z = _standard_normals(rng, mc.paths)
    draws = fwd * np.exp(-0.5 * total * total + total * z)
    values = params.discount * kernels.black_values(
        draws, spec.strike, params.vol, params.maturity, spec.kind == CALL
    )
    if mode == MODE_STRIKE:
        values = np.where(draws > spec.strike, values, 0.0)
    if mc.antithetic:
        half = mc.paths // 2
        values = 0.5 * (values[:half] + values[half:])
    n = values.size
    price = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
    return price, stderr


@dataclass
class FdSolution:
    """Result of the heat-coordinate march.

    ``values`` holds the adjusted-to-maturity profile on the ``zeta`` grid at
    the final mirror time; ``boundary_drift`` is the worst relative deviation
    of the near-boundary nodes from the far-field asymptote seen during the
    march (relative to max(forward, strike)).
    """

    zeta: np.ndarray
    values: np.ndarray
    boundary_drift: float

    @property
    def center_value(self) -> float:
        return float(self.values[self.values.size // 2])

    def value_at(self, z: float) -> float:
        return float(np.interp(z, self.zeta, self.values))


def fd_discount_solve(
    params: MarketParams, spec: OptionSpec, grid: FdGrid
) -> FdSolution:
    """Crank-Nicolson solution of the discount equation over the full mirror time.

    In the coordinate zeta = ln(F'/F) - tau the equation reduces to the unit
    heat equation in tau, marched from the terminal Black payoff value out to
    tau = sigma^2 T / 2 (full kernel dispersion).  The grid is centered so
    that its middle node lands on the forward at the final time, matching the
    zero-lower-bound convention; Dirichlet boundary values follow the
    far-field asymptotes (intrinsic on the in-the-money side, zero on the
    other).  Requires a zero dividend yield so the discount rate and the
    carry drift coincide.

    Raises :class:`GridResolutionError` when the near-boundary nodes drift
    from their asymptotes by more than 1e-6 relative, which signals a window
    too narrow (or a grid too coarse) for the requested horizon.
    """
    if params.dividend != 0:
        raise ValueError("the finite-difference oracle requires dividend == 0")
    v = params.vol * math.sqrt(params.maturity)
    center = -0.5 * v * v
    width = grid.zeta_halfwidth * v
    zeta = np.linspace(center - width, center + width, grid.space_steps + 1)
    fwd = forward_price(params)
    is_call = spec.kind == CALL
    init = kernels.black_values(
        fwd * np.exp(zeta), spec.strike, params.vol, params.maturity, is_call
    )
    tau_total = 0.5 * v * v
    dz = zeta[1] - zeta[0]
    lam = (tau_total / grid.time_steps) / (dz * dz)
    taus = np.linspace(0.0, tau_total, grid.time_steps + 1)
    if is_call:
        lower_bc = np.zeros_like(taus)
        upper_bc = fwd * np.exp(zeta[-1] + taus) - spec.strike
    else:
        lower_bc = spec.strike - fwd * np.exp(zeta[0] + taus)
        upper_bc = np.zeros_like(taus)
    values, lo_trace, hi_trace = kernels.cn_march(init, lam, lower_bc, upper_bc)
    if is_call:
        lo_ref = np.zeros(grid.time_steps)
        hi_ref = fwd * np.exp(zeta[-2] + taus[1:]) - spec.strike
    else:
        lo_ref = spec.strike - fwd * np.exp(zeta[1] + taus[1:])
        hi_ref = np.zeros(grid.time_steps)
    scale = max(fwd, spec.strike)
    drift = max(
        float(np.abs(lo_trace - lo_ref).max()),
        float(np.abs(hi_trace - hi_ref).max()),
    ) / scale
    if drift > _BOUNDARY_DRIFT_LIMIT:
        raise GridResolutionError(
            f"near-boundary drift {drift:.2e} exceeds {_BOUNDARY_DRIFT_LIMIT:.0e}; "
            "widen zeta_halfwidth or refine the grid"
        )
    return FdSolution(zeta=zeta, values=values, boundary_drift=drift)
