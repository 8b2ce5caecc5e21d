"""Global upper/lower expectations of finite-horizon gambles.

A horizon-n gamble pays off according to the first n outcomes only.  Its
upper expectation under a forecasting system is computed by backward
induction through the local models: leaf values are the payoffs, every inner
situation takes the local upper expectation of its two children, and the root
value is the answer.  The induced value process is the minimal supermartingale
dominating the payoff, so this matches the supermartingale-infimum definition
of the global operator on this class of gambles.  With rational inputs the
whole induction is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .localmodels import LocalGamble, Number, upper_ex
from .systems import ForecastingSystem, ResourceLimitError, as_bits

HORIZON_LIMIT = 20


def _index_bits(i: int, depth: int) -> tuple:
    return tuple((i >> (depth - 1 - j)) & 1 for j in range(depth))


@dataclass(frozen=True)
class HorizonGamble:
    """Payoff table over all bit strings of a fixed length.

    Payoffs are stored densely, indexed by the MSB-first integer value of the
    string; horizons past the table limit are rejected outright.
    """

    horizon: int
    payoffs: tuple

    def __post_init__(self):
        if self.horizon < 0:
            raise ValueError("horizon must be non-negative")
        if self.horizon > HORIZON_LIMIT:
            raise ResourceLimitError(
                f"horizon {self.horizon} exceeds the dense-table limit {HORIZON_LIMIT}"
            )
        if len(self.payoffs) != 1 << self.horizon:
            raise ValueError(
                f"need {1 << self.horizon} payoffs for horizon {self.horizon}, "
                f"got {len(self.payoffs)}"
            )

    @classmethod
    def from_function(cls, horizon: int, fn: Callable[[tuple], Number]) -> "HorizonGamble":
        if horizon > HORIZON_LIMIT:
            raise ResourceLimitError(
                f"horizon {horizon} exceeds the dense-table limit {HORIZON_LIMIT}"
            )
        return cls(horizon, tuple(fn(_index_bits(i, horizon)) for i in range(1 << horizon)))

    @classmethod
    def ones_count(cls, horizon: int) -> "HorizonGamble":
        return cls.from_function(horizon, lambda bits: sum(bits))

    @classmethod
    def indicator(cls, horizon: int, event: Iterable) -> "HorizonGamble":
        cells = {as_bits(w) for w in event}
        for w in cells:
            if len(w) != horizon:
                raise ValueError(f"event cylinder {w!r} is not depth-{horizon}")
        return cls.from_function(horizon, lambda bits: 1 if bits in cells else 0)

    def value(self, bits) -> Number:
        bits = as_bits(bits)
        if len(bits) != self.horizon:
            raise ValueError(f"need {self.horizon} bits, got {len(bits)}")
        i = 0
        for b in bits:
            i = (i << 1) | b
        return self.payoffs[i]

    def __neg__(self) -> "HorizonGamble":
        return HorizonGamble(self.horizon, tuple(-p for p in self.payoffs))


def upper_expectation_fh(phi: ForecastingSystem, g: HorizonGamble) -> Number:
    """Backward induction from the depth-n payoffs to the root."""
    vals = list(g.payoffs)
    for depth in range(g.horizon - 1, -1, -1):
        nxt = []
        for i in range(1 << depth):
            s = _index_bits(i, depth)
            nxt.append(upper_ex(phi(s), LocalGamble(vals[2 * i + 1], vals[2 * i])))
        vals = nxt
    return vals[0]


def lower_expectation_fh(phi: ForecastingSystem, g: HorizonGamble) -> Number:
    """Conjugate of the upper operator: -upper(-g)."""
    return -upper_expectation_fh(phi, -g)


def upper_probability_fh(phi: ForecastingSystem, horizon: int, event: Iterable) -> Number:
    return upper_expectation_fh(phi, HorizonGamble.indicator(horizon, event))


def lower_probability_fh(phi: ForecastingSystem, horizon: int, event: Iterable) -> Number:
    return lower_expectation_fh(phi, HorizonGamble.indicator(horizon, event))
