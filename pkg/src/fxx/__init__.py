"""FX vanilla and barrier option pricing with analytic Greeks, a
Vanna-Volga smile adjustment and a seeded Monte Carlo cross-check engine."""

from .contracts import (BarrierSide, DoubleBarrierSpec, GreekSet, KikoSpec,
                        KnockType, MarketEnvironment, OptionDirection,
                        SingleBarrierSpec, TableRow, VanillaSpec,
                        classify_single_barrier)
from .double_barrier import (SeriesConfig, kiki_greeks, kiki_price, kiko_greeks,
                             kiko_price, koko_greeks, koko_price)
from .errors import (ClassificationError, DomainError, IllConditionedError,
                     NumericalError, PreconditionError, PricingError,
                     TruncationWarning)
from .greeks_fd import FdBumps, fd_greeks
from .mc_oracle import McConfig, McEstimate, mc_price, mc_price_batch
from .num_core import erf, erfc, inv_std_normal_cdf, std_normal_cdf, std_normal_pdf
from .router import greeks_contract, price_contract
from .single_barrier import (AbcdValues, abcd, greeks_abcd, greeks_single_barrier,
                             price_single_barrier)
from .vanilla import gk_greeks, gk_price
from .vanna_volga import (Pivot, PivotQuotes, PivotSet, PivotSystem, VVResult,
                          atm_strike, build_pivot_system, build_pivots,
                          solve_delta_strike, vv_price, vv_weights)

__version__ = "0.1.0"

__all__ = [
    "AbcdValues", "BarrierSide", "ClassificationError", "DomainError",
    "DoubleBarrierSpec", "FdBumps", "GreekSet", "IllConditionedError",
    "KikoSpec", "KnockType", "MarketEnvironment", "McConfig", "McEstimate",
    "NumericalError", "OptionDirection", "Pivot", "PivotQuotes", "PivotSet",
    "PivotSystem", "PreconditionError", "PricingError", "SeriesConfig",
    "SingleBarrierSpec", "TableRow", "TruncationWarning", "VVResult",
    "VanillaSpec", "abcd", "atm_strike", "build_pivot_system", "build_pivots",
    "classify_single_barrier", "erf", "erfc", "fd_greeks", "gk_greeks",
    "gk_price", "greeks_abcd", "greeks_contract", "greeks_single_barrier",
    "inv_std_normal_cdf", "kiki_greeks", "kiki_price", "kiko_greeks",
    "kiko_price", "koko_greeks", "koko_price", "mc_price", "mc_price_batch",
    "price_contract", "price_single_barrier", "solve_delta_strike",
    "std_normal_cdf", "std_normal_pdf", "vv_price", "vv_weights",
]
