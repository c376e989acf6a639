"""Dispatch of price and Greek requests over every supported contract type."""

from typing import Optional

from .contracts import (DoubleBarrierSpec, GreekSet, KikoSpec, KnockType,
                        MarketEnvironment, SingleBarrierSpec, VanillaSpec,
                        classify_single_barrier)
from .double_barrier import (SeriesConfig, classify_kiko, kiki_greeks,
                             kiki_price, kiko_greeks, kiko_price, koko_greeks,
                             koko_price)
from .errors import DomainError
from .greeks_fd import FdBumps, fd_greeks
from .single_barrier import greeks_single_barrier, price_single_barrier
from .vanilla import gk_greeks, gk_price


def price_contract(env: MarketEnvironment, spec,
                   series_cfg: Optional[SeriesConfig] = None) -> tuple:
    """Price any supported contract; returns (price, rule identifier)."""
    cfg = series_cfg or SeriesConfig()
    if isinstance(spec, VanillaSpec):
        return gk_price(env, spec.direction, spec.strike), "vanilla"
    if isinstance(spec, SingleBarrierSpec):
        spec.validate_against(env)
        return price_single_barrier(env, spec), classify_single_barrier(spec).rule_id
    if isinstance(spec, DoubleBarrierSpec):
        kind = "call" if int(spec.direction) > 0 else "put"
        if spec.knock == KnockType.OUT:
            return koko_price(env, spec, cfg), f"KOKO-{kind}"
        return kiki_price(env, spec, cfg), f"KIKI-{kind}"
    if isinstance(spec, KikoSpec):
        spec.validate_against(env)
        return kiko_price(env, spec, cfg), classify_kiko(spec)
    raise DomainError(f"unsupported contract type {type(spec).__name__}")


def greeks_contract(env: MarketEnvironment, spec, method: str = "analytic",
                    series_cfg: Optional[SeriesConfig] = None,
                    bumps: Optional[FdBumps] = None) -> tuple:
    """GreekSet of any supported contract; returns (greeks, method used, notices).

    ``method`` is "analytic" or "fd"; contracts without closed forms fall
    back to finite differences with a notice.
    """
    if method not in ("analytic", "fd"):
        raise DomainError(f"method must be 'analytic' or 'fd', got {method!r}")
    cfg = series_cfg or SeriesConfig()
    fd_bumps = bumps or FdBumps()
    notices = []

    if isinstance(spec, VanillaSpec):
        if method == "analytic":
            return gk_greeks(env, spec.direction, spec.strike), "analytic", notices
        return fd_greeks(lambda e: gk_price(e, spec.direction, spec.strike),
                         env, fd_bumps), "fd", notices
    if isinstance(spec, SingleBarrierSpec):
        spec.validate_against(env)
        if method == "analytic":
            return greeks_single_barrier(env, spec), "analytic", notices
        return fd_greeks(lambda e: price_single_barrier(e, spec), env, fd_bumps), "fd", notices
    if isinstance(spec, DoubleBarrierSpec):
        if method == "analytic":
            notices.append("no closed-form Greeks for double barriers; "
                           "finite differences used")
        greeks = (koko_greeks if spec.knock == KnockType.OUT else kiki_greeks)(
            env, spec, cfg, fd_bumps)
        return greeks, "fd", notices
    if isinstance(spec, KikoSpec):
        if method == "analytic":
            notices.append("no closed-form Greeks for in/out barrier pairs; "
                           "finite differences used")
        return kiko_greeks(env, spec, cfg, fd_bumps), "fd", notices
    raise DomainError(f"unsupported contract type {type(spec).__name__}")
