"""imprand: betting-strategy randomness audits against interval forecasts.

The library models a forecaster who announces a closed probability interval
for each next bit, a sceptic who bets within those prices, and the audits
that follow: a bit sequence is refuted for a forecasting system when some
declared betting strategy multiplies its capital past a threshold (or past a
growth function) along it.  On top sit frequency (stochasticity) verdicts,
finite-horizon expectations by backward induction, an empirical scan of the
stationary intervals a sequence survives, path simulation, restriction-law
checks, and a manifest-driven CLI.
"""

from .capital import (
    CapitalTrajectory,
    ContractViolation,
    is_supermartingale_multiplier_at,
    process_difference,
    run_multiplier,
    verify_multiplier_along,
    verify_supermartingale_along,
)
from .localmodels import IntervalForecast, LocalGamble, ex_precise, lower_ex, upper_ex
from .systems import (
    ForecastingSystem,
    ResourceLimitError,
    alternating,
    as_bits,
    build_system,
    explain_away,
    from_callable,
    is_at_least_as_conservative,
    lambda_trailing_zeros,
    near_half,
    near_half_forecast,
    precise,
    stationary,
    table,
    vacuous,
)

__version__ = "0.1.0"

__all__ = [
    "IntervalForecast",
    "LocalGamble",
    "ex_precise",
    "lower_ex",
    "upper_ex",
    "ForecastingSystem",
    "stationary",
    "precise",
    "vacuous",
    "alternating",
    "near_half",
    "near_half_forecast",
    "explain_away",
    "table",
    "from_callable",
    "build_system",
    "lambda_trailing_zeros",
    "is_at_least_as_conservative",
    "as_bits",
    "ResourceLimitError",
    "CapitalTrajectory",
    "ContractViolation",
    "run_multiplier",
    "process_difference",
    "is_supermartingale_multiplier_at",
    "verify_supermartingale_along",
    "verify_multiplier_along",
    "__version__",
]
