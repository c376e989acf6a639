"""Vanna-Volga market adjustment on top of the flat-volatility price.

The smile enters through three pivot strikes: the delta-neutral straddle
strike and the two strikes where the call/put delta equals +/-0.25 at
the pivot volatility. A 3x3 system matches the contract's vega, vanna
and volga with a portfolio of the pivot options, and the adjustment is
the portfolio-weighted market-versus-flat cost, which collapses to the
risk-reversal and butterfly legs because the straddle leg carries no
market-versus-flat gap.

All pivot quantities (strikes, Greeks, flat prices) are evaluated at the
pivot at-the-money volatility, which overrides the volatility carried by
the market environment.
"""

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .contracts import GreekSet, MarketEnvironment, OptionDirection
from .double_barrier import SeriesConfig
from .errors import DomainError, IllConditionedError
from .num_core import inv_std_normal_cdf
from .router import greeks_contract, price_contract
from .vanilla import gk_greeks, gk_price

_MAX_CONDITION = 1e12
_PIVOT_DELTA = 0.25


@dataclass(frozen=True)
class PivotQuotes:
    """Market smile quotes: at-the-money volatility, 25-delta risk
    reversal (call vol minus put vol) and 25-delta butterfly offset."""

    sigma_atm: float
    sigma_rr25: float = 0.0
    sigma_bf25: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma_atm) and self.sigma_atm > 0.0):
            raise DomainError(f"sigma_atm must be positive, got {self.sigma_atm!r}")
        for name in ("sigma_rr25", "sigma_bf25"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.call_vol <= 0.0 or self.put_vol <= 0.0:
            raise DomainError(
                f"reconstructed smile vols must stay positive, got call "
                f"{self.call_vol!r} / put {self.put_vol!r}")

    @property
    def call_vol(self) -> float:
        return self.sigma_atm + self.sigma_bf25 + 0.5 * self.sigma_rr25

    @property
    def put_vol(self) -> float:
        return self.sigma_atm + self.sigma_bf25 - 0.5 * self.sigma_rr25


@dataclass(frozen=True)
class Pivot:
    """One pivot instrument leg: its strike, the flat (pivot ATM) vol and
    the smile vol quoted for that strike."""

    strike: float
    bs_vol: float
    market_vol: float
    direction: OptionDirection

    def __post_init__(self):
        for name in ("strike", "bs_vol", "market_vol"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise DomainError(f"pivot {name} must be positive, got {value!r}")


@dataclass(frozen=True)
class PivotSet:
    put_25: Pivot
    atm: Pivot
    call_25: Pivot

    def __post_init__(self):
        if not (self.put_25.strike < self.atm.strike < self.call_25.strike):
            raise DomainError(
                f"pivot strikes must increase strictly, got "
                f"{self.put_25.strike}, {self.atm.strike}, {self.call_25.strike}")

    def __iter__(self):
        return iter((self.put_25, self.atm, self.call_25))


@dataclass(frozen=True)
class PivotSystem:
    """Pivot Greek matrix (columns: put-strike, atm, call-strike pivots;
    rows vega/vanna/volga), the market-minus-flat pivot price gaps and a
    condition estimate of the matrix."""

    matrix: np.ndarray
    gaps: np.ndarray
    condition: float


@dataclass(frozen=True)
class VVResult:
    bs_price: float
    x1: float
    x2: float
    x3: float
    adjustment: float
    vv_price: float
    condition: float

    @property
    def weights(self) -> tuple:
        return (self.x1, self.x2, self.x3)


def atm_strike(env: MarketEnvironment) -> float:
    """Delta-neutral straddle strike: call and put deltas cancel there."""
    return env.spot * math.exp((env.drift + 0.5 * env.sigma * env.sigma) * env.T)


def solve_delta_strike(env: MarketEnvironment, target_delta: float,
                       direction: OptionDirection) -> float:
    """Strike whose spot delta equals ``target_delta`` at env volatility."""
    phi = int(direction)
    if target_delta * phi <= 0.0:
        raise DomainError(
            f"target delta {target_delta!r} has the wrong sign for {direction.name}")
    scaled = phi * target_delta * math.exp(env.r_f * env.T)
    if scaled >= 1.0:
        raise DomainError(
            f"|delta * exp(r_f T)| = {scaled!r} >= 1 has no strike solution")
    d1 = inv_std_normal_cdf(scaled) * phi
    s = env.sigma * math.sqrt(env.T)
    return env.spot * math.exp((env.drift + 0.5 * env.sigma * env.sigma) * env.T - d1 * s)


def build_pivots(env: MarketEnvironment, quotes: PivotQuotes) -> PivotSet:
    """Solve the three pivot strikes at the pivot ATM volatility."""
    env_atm = replace(env, sigma=quotes.sigma_atm)
    k_atm = atm_strike(env_atm)
    k_call = solve_delta_strike(env_atm, _PIVOT_DELTA, OptionDirection.CALL)
    k_put = solve_delta_strike(env_atm, -_PIVOT_DELTA, OptionDirection.PUT)
    return PivotSet(
        put_25=Pivot(k_put, quotes.sigma_atm, quotes.put_vol, OptionDirection.PUT),
        atm=Pivot(k_atm, quotes.sigma_atm, quotes.sigma_atm, OptionDirection.CALL),
        call_25=Pivot(k_call, quotes.sigma_atm, quotes.call_vol, OptionDirection.CALL),
    )


def build_pivot_system(env: MarketEnvironment, pivots: PivotSet) -> PivotSystem:
    """Pivot call Greeks at the flat vol plus market-minus-flat price gaps.

    The matrix columns use call Greeks at every pivot strike; replacing a
    pivot put with the call at the same strike changes none of the three
    Greeks. The gap entries price each pivot with its own quoted
    direction, at its market vol minus at the flat vol.
    """
    matrix = np.empty((3, 3))
    gaps = np.empty(3)
    for j, pivot in enumerate(pivots):
        env_flat = replace(env, sigma=pivot.bs_vol)
        greeks = gk_greeks(env_flat, OptionDirection.CALL, pivot.strike)
        matrix[:, j] = (greeks.vega, greeks.vanna, greeks.volga)
        env_mkt = replace(env, sigma=pivot.market_vol)
        gaps[j] = (gk_price(env_mkt, pivot.direction, pivot.strike)
                   - gk_price(env_flat, pivot.direction, pivot.strike))
    if not np.all(np.isfinite(matrix)):
        raise IllConditionedError("pivot Greek matrix contains non-finite entries")
    try:
        inv = np.linalg.inv(matrix)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError(f"pivot system is singular: {exc}") from exc
    condition = float(np.linalg.norm(matrix, 1) * np.linalg.norm(inv, 1))
    if not math.isfinite(condition) or condition > _MAX_CONDITION:
        raise IllConditionedError(
            f"pivot system condition estimate {condition:.3e} exceeds "
            f"{_MAX_CONDITION:.0e}; pivots are too close to distinguish")
    return PivotSystem(matrix=matrix, gaps=gaps, condition=condition)


def vv_weights(target: GreekSet, system: PivotSystem) -> tuple:
    """Hedge weights on the pivot columns matching the target's vega,
    vanna and volga; solved with partial pivoting plus one step of
    iterative refinement."""
    rhs = np.array([target.vega, target.vanna, target.volga])
    x = np.linalg.solve(system.matrix, rhs)
    residual = rhs - system.matrix @ x
    x = x + np.linalg.solve(system.matrix, residual)
    residual = rhs - system.matrix @ x
    scale = np.linalg.norm(rhs)
    if scale > 0.0 and np.linalg.norm(residual) > 1e-10 * scale:
        raise IllConditionedError(
            f"pivot solve residual {np.linalg.norm(residual):.3e} too large "
            f"versus rhs norm {scale:.3e}")
    return tuple(float(v) for v in x)


def vv_adjustment(weights: tuple, system: PivotSystem) -> tuple:
    """Map strike-basis weights to instrument-basis weights and the
    market-cost adjustment.

    Returns (x_atm, x_rr, x_bf, adjustment) where the adjustment is
    ``x_rr * RR gap + x_bf * BF gap``; the ATM leg carries a zero gap by
    construction and only its weight is reported.
    """
    w_put, w_atm, w_call = weights
    gap_put, _, gap_call = (float(g) for g in system.gaps)
    x_rr = 0.5 * (w_call - w_put)
    x_bf = w_call + w_put
    x_atm = w_atm + x_bf
    rr_gap = gap_call - gap_put
    bf_gap = 0.5 * (gap_call + gap_put)
    adjustment = x_rr * rr_gap + x_bf * bf_gap
    return x_atm, x_rr, x_bf, adjustment


def vv_price(env: MarketEnvironment, spec, quotes: PivotQuotes,
             series_cfg: Optional[SeriesConfig] = None) -> VVResult:
    """Market-adjusted price of any contract this library prices.

    The flat price and its Greeks are evaluated at ``quotes.sigma_atm``
    (the env volatility is overridden); barrier contracts without closed
    Greeks use the finite-difference engine.
    """
    env_atm = replace(env, sigma=quotes.sigma_atm)
    bs_price, _rule = price_contract(env_atm, spec, series_cfg)
    target, _method, _notes = greeks_contract(env_atm, spec, method="analytic",
                                              series_cfg=series_cfg)
    pivots = build_pivots(env, quotes)
    system = build_pivot_system(env_atm, pivots)
    weights = vv_weights(target, system)
    x_atm, x_rr, x_bf, adjustment = vv_adjustment(weights, system)
    return VVResult(bs_price=bs_price, x1=x_atm, x2=x_rr, x3=x_bf,
                    adjustment=adjustment, vv_price=bs_price + adjustment,
                    condition=system.condition)
