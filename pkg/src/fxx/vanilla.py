"""Two-rate vanilla FX pricing and analytic Greeks.

The Greeks come from the same kernel that powers the barrier
decomposition parameter A, so vanilla and barrier sensitivities share a
single closed-form implementation.
"""

import math

from .contracts import GreekSet, MarketEnvironment, OptionDirection
from .errors import DomainError
from .num_core import std_normal_cdf as _N
from .single_barrier import _kernel_direct

# Below this diffusion scale d1/d2 degenerate; price the forward limit.
_DETERMINISTIC_LIMIT = 1e-12


def d1_d2(env: MarketEnvironment, strike: float) -> tuple:
    s = env.sigma * math.sqrt(env.T)
    d1 = (math.log(env.spot / strike) + (env.drift + 0.5 * env.sigma * env.sigma) * env.T) / s
    return d1, d1 - s


def gk_price(env: MarketEnvironment, direction: OptionDirection, strike: float) -> float:
    """Vanilla FX option price under flat rates and volatility."""
    if strike <= 0.0 or not math.isfinite(strike):
        raise DomainError(f"strike must be positive and finite, got {strike!r}")
    phi = int(direction)
    df_f = math.exp(-env.r_f * env.T)
    df_d = math.exp(-env.r_d * env.T)
    if env.sigma * math.sqrt(env.T) < _DETERMINISTIC_LIMIT:
        return max(phi * (env.spot * df_f - strike * df_d), 0.0)
    d1, d2 = d1_d2(env, strike)
    return phi * (env.spot * df_f * _N(phi * d1) - strike * df_d * _N(phi * d2))


def gk_greeks(env: MarketEnvironment, direction: OptionDirection, strike: float) -> GreekSet:
    """Vanilla value plus delta/vega/vanna/volga in closed form."""
    kernel = _kernel_direct(env, int(direction), strike, strike)
    value = gk_price(env, direction, strike)
    return GreekSet(value, kernel.delta, kernel.vega, kernel.vanna, kernel.volga)
