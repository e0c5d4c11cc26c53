"""Hot array kernels, in jitted and pure-numpy flavours.

Both implementations of each kernel stay importable (when numba is present)
so they can be cross-checked and benchmarked against each other; the public
names ``black_values`` and ``cn_march`` are bound to whichever backend
:mod:`mtdd._backend` selected at import time.
"""

import math

import numpy as np
from scipy.linalg import solve_banded
from scipy.special import ndtr

from ._backend import HAVE_NUMBA, NUMBA_ENABLED

_MIN_TOTAL_VOL = 1e-12
_INV_SQRT2 = 0.7071067811865476


def black_values_numpy(forwards, strike, vol, horizon, is_call):
    """Undiscounted Black values of one option over an array of forwards."""
    forwards = np.asarray(forwards, dtype=np.float64)
    total = vol * math.sqrt(horizon)
    if total < _MIN_TOTAL_VOL:
        payoff = forwards - strike if is_call else strike - forwards
        return np.maximum(payoff, 0.0)
    d1 = np.log(forwards / strike) / total + 0.5 * total
    d2 = d1 - total
    if is_call:
        return forwards * ndtr(d1) - strike * ndtr(d2)
    return strike * ndtr(-d2) - forwards * ndtr(-d1)


def cn_march_numpy(values, lam, lower_bc, upper_bc):
    """Crank-Nicolson march of the unit heat equation with Dirichlet ends.

    ``values`` holds the full initial grid (boundary nodes included) and
    ``lower_bc``/``upper_bc`` the boundary values at every time level, index 0
    matching the initial data.  ``lam`` is dtau/dzeta^2.  Returns the final
    grid together with per-step traces of the two interior nodes adjacent to
    the boundaries, which callers use to detect boundary-induced error.
    """
    u = np.array(values, dtype=np.float64, copy=True)
    steps = lower_bc.size - 1
    n = u.size - 2
    ab = np.zeros((3, n))
    ab[0, 1:] = -0.5 * lam
    ab[1, :] = 1.0 + lam
    ab[2, :-1] = -0.5 * lam
    lo_trace = np.empty(steps)
    hi_trace = np.empty(steps)
    for m in range(steps):
        interior = u[1:-1]
        rhs = (1.0 - lam) * interior
        rhs[1:] += 0.5 * lam * interior[:-1]
        rhs[:-1] += 0.5 * lam * interior[1:]
        rhs[0] += 0.5 * lam * (u[0] + lower_bc[m + 1])
        rhs[-1] += 0.5 * lam * (u[-1] + upper_bc[m + 1])
        u[1:-1] = solve_banded((1, 1), ab, rhs)
        u[0] = lower_bc[m + 1]
        u[-1] = upper_bc[m + 1]
        lo_trace[m] = u[1]
        hi_trace[m] = u[-2]
    return u, lo_trace, hi_trace


if HAVE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def black_values_numba(forwards, strike, vol, horizon, is_call):
        total = vol * math.sqrt(horizon)
        out = np.empty_like(forwards)
        if total < _MIN_TOTAL_VOL:
            for i in range(forwards.size):
                payoff = forwards[i] - strike if is_call else strike - forwards[i]
                out[i] = payoff if payoff > 0.0 else 0.0
            return out
        for i in range(forwards.size):
            d1 = math.log(forwards[i] / strike) / total + 0.5 * total
            d2 = d1 - total
            if is_call:
                n1 = 0.5 * math.erfc(-d1 * _INV_SQRT2)
                n2 = 0.5 * math.erfc(-d2 * _INV_SQRT2)
                out[i] = forwards[i] * n1 - strike * n2
            else:
                n1 = 0.5 * math.erfc(d1 * _INV_SQRT2)
                n2 = 0.5 * math.erfc(d2 * _INV_SQRT2)
                out[i] = strike * n2 - forwards[i] * n1
        return out

    @njit(cache=True)
    def cn_march_numba(values, lam, lower_bc, upper_bc):
        u = values.copy()
        steps = lower_bc.size - 1
        n = u.size - 2
        a = -0.5 * lam
        b = 1.0 + lam
        # The tridiagonal matrix is constant, so the Thomas elimination
        # coefficients are computed once.
        cp = np.empty(n)
        cp[0] = a / b
        for i in range(1, n):
            cp[i] = a / (b - a * cp[i - 1])
        rhs = np.empty(n)
        dp = np.empty(n)
        lo_trace = np.empty(steps)
        hi_trace = np.empty(steps)
        for m in range(steps):
            for i in range(n):
                rhs[i] = (1.0 - lam) * u[i + 1] + 0.5 * lam * (u[i] + u[i + 2])
            rhs[0] += 0.5 * lam * lower_bc[m + 1]
            rhs[n - 1] += 0.5 * lam * upper_bc[m + 1]
            dp[0] = rhs[0] / b
            for i in range(1, n):
                dp[i] = (rhs[i] - a * dp[i - 1]) / (b - a * cp[i - 1])
            u[n] = dp[n - 1]
            for i in range(n - 2, -1, -1):
                u[i + 1] = dp[i] - cp[i] * u[i + 2]
            u[0] = lower_bc[m + 1]
            u[n + 1] = upper_bc[m + 1]
            lo_trace[m] = u[1]
            hi_trace[m] = u[n]
        return u, lo_trace, hi_trace


if NUMBA_ENABLED:
    black_values = black_values_numba
    cn_march = cn_march_numba
else:
    black_values = black_values_numpy
    cn_march = cn_march_numpy
