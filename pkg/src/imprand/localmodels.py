"""Single-step betting models on a binary outcome.

A gamble is a payoff pair (value at outcome 1, value at outcome 0).  A
forecast is either a single probability p for the next outcome, or a closed
interval of probabilities; the interval induces lower/upper expectations by
minimising/maximising the precise expectation over the interval.  Because the
precise expectation is affine in p, the extrema sit at the interval endpoints,
split on the sign of ``f(1) - f(0)``.

Numbers are polymorphic: exact ``fractions.Fraction`` values stay exact all
the way through, floats compute in binary64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Number = Union[int, float, Fraction]

__all__ = [
    "Number",
    "LocalGamble",
    "IntervalForecast",
    "ex_precise",
    "lower_ex",
    "upper_ex",
]


def _check_finite(x: Number, what: str) -> None:
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError(f"{what} must be finite, got {x!r}")


@dataclass(frozen=True)
class LocalGamble:
    """Payoff pair on the binary outcome: ``at_one`` if 1, ``at_zero`` if 0."""

    at_one: Number
    at_zero: Number

    def __post_init__(self):
        _check_finite(self.at_one, "gamble payoff")
        _check_finite(self.at_zero, "gamble payoff")

    def __call__(self, outcome: int) -> Number:
        return self.at_one if outcome else self.at_zero

    def __neg__(self) -> "LocalGamble":
        return LocalGamble(-self.at_one, -self.at_zero)

    def __add__(self, other) -> "LocalGamble":
        if isinstance(other, LocalGamble):
            return LocalGamble(self.at_one + other.at_one, self.at_zero + other.at_zero)
        return LocalGamble(self.at_one + other, self.at_zero + other)

    __radd__ = __add__

    def __sub__(self, other) -> "LocalGamble":
        return self + (-other if isinstance(other, LocalGamble) else -other)

    def scaled(self, factor: Number) -> "LocalGamble":
        return LocalGamble(factor * self.at_one, factor * self.at_zero)

    @property
    def variation_norm(self) -> Number:
        """max f - min f; the uniform bound on centred payoffs."""
        return abs(self.at_one - self.at_zero)

    def min(self) -> Number:
        return min(self.at_one, self.at_zero)

    def max(self) -> Number:
        return max(self.at_one, self.at_zero)


@dataclass(frozen=True)
class IntervalForecast:
    """Closed subinterval [lower, upper] of the unit interval."""

    lower: Number
    upper: Number

    def __post_init__(self):
        if not (0 <= self.lower <= self.upper <= 1):
            raise ValueError(
                f"forecast interval needs 0 <= lower <= upper <= 1, "
                f"got [{self.lower}, {self.upper}]"
            )

    @classmethod
    def precise(cls, p: Number) -> "IntervalForecast":
        return cls(p, p)

    @classmethod
    def vacuous(cls) -> "IntervalForecast":
        return cls(0, 1)

    @property
    def is_precise(self) -> bool:
        return self.lower == self.upper

    @property
    def width(self) -> Number:
        return self.upper - self.lower

    @property
    def midpoint(self) -> Number:
        return (self.lower + self.upper) / 2

    def __contains__(self, p: Number) -> bool:
        return self.lower <= p <= self.upper

    def issubset(self, other: "IntervalForecast") -> bool:
        return other.lower <= self.lower and self.upper <= other.upper

    def intersection(self, other: "IntervalForecast"):
        lo = max(self.lower, other.lower)
        hi = min(self.upper, other.upper)
        return IntervalForecast(lo, hi) if lo <= hi else None


def ex_precise(p: Number, f: LocalGamble) -> Number:
    """Expectation of ``f`` under the precise forecast ``p``: p*f(1)+(1-p)*f(0)."""
    if not 0 <= p <= 1:
        raise ValueError(f"forecast must lie in [0, 1], got {p}")
    return p * f.at_one + (1 - p) * f.at_zero


def lower_ex(forecast: IntervalForecast, f: LocalGamble) -> Number:
    """min over p in the interval of the precise expectation of ``f``."""
    if f.at_one >= f.at_zero:
        return ex_precise(forecast.lower, f)
    return ex_precise(forecast.upper, f)


def upper_ex(forecast: IntervalForecast, f: LocalGamble) -> Number:
    """max over p in the interval; conjugate to lower_ex via f -> -f."""
    if f.at_one >= f.at_zero:
        return ex_precise(forecast.upper, f)
    return ex_precise(forecast.lower, f)
