"""Selection rules and the frequency statistics they induce along a path.

A selection process looks at the current situation and decides whether the
*next* outcome enters the statistic; a selection function decides from the
time index alone.  Frequency verdicts compare tail-window running frequencies
of selected outcomes against an interval forecast, with a declared
finite-sample slack (the asymptotic statements these mimic are exact only in
the limit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .localmodels import IntervalForecast, LocalGamble, Number, lower_ex
from .systems import ForecastingSystem, Situation, as_bits

__all__ = [
    "SelectionProcess",
    "SelectionFunction",
    "every_step",
    "never",
    "parity",
    "bit_echo",
    "from_table",
    "from_time_function",
    "selected_frequency",
    "selected_average",
    "church_verdict",
    "ChurchVerdict",
    "CONSISTENT",
    "VIOLATION",
    "SKIPPED",
]

CONSISTENT = "CONSISTENT"
VIOLATION = "VIOLATION"
SKIPPED = "SKIPPED"


@dataclass(frozen=True)
class SelectionProcess:
    """Situation -> {0,1}; total and deterministic."""

    kind: str
    params: tuple
    fn: Callable[[Situation], int] = field(compare=False, repr=False)

    def __call__(self, situation) -> int:
        return 1 if self.fn(as_bits(situation)) else 0

    def describe(self) -> str:
        if not self.params:
            return self.kind
        return f"{self.kind}({','.join(str(p) for p in self.params)})"


@dataclass(frozen=True)
class SelectionFunction:
    """Positive time index -> {0,1}; blind to the outcomes."""

    kind: str
    params: tuple
    fn: Callable[[int], int] = field(compare=False, repr=False)

    def __call__(self, k: int) -> int:
        if k < 1:
            raise ValueError("time indices start at 1")
        return 1 if self.fn(k) else 0

    def as_process(self) -> SelectionProcess:
        return SelectionProcess(
            kind=f"time:{self.kind}", params=self.params, fn=lambda s: self.fn(len(s) + 1)
        )


def every_step() -> SelectionProcess:
    return SelectionProcess("constant", (1,), lambda s: 1)


def never() -> SelectionProcess:
    return SelectionProcess("constant", (0,), lambda s: 0)


def parity(which: str) -> SelectionProcess:
    """Select situations of even or odd depth."""
    if which not in ("even", "odd"):
        raise ValueError("parity selection is 'even' or 'odd'")
    want = 0 if which == "even" else 1
    return SelectionProcess("parity-of-depth", (which,), lambda s: len(s) % 2 == want)


def bit_echo(bit: int) -> SelectionProcess:
    """Select a step iff the previously published outcome equals ``bit``.

    The initial situation has no previous outcome and is never selected.
    """
    if bit not in (0, 1):
        raise ValueError("echo bit must be 0 or 1")
    return SelectionProcess("bit-echo", (bit,), lambda s: bool(s) and s[-1] == bit)


def from_table(selected) -> SelectionProcess:
    """Select exactly the listed situations."""
    from .systems import as_bits

    cells = frozenset(as_bits(s) for s in selected)
    return SelectionProcess("table", (len(cells),), lambda s: tuple(s) in cells)


def from_time_function(fn: Callable[[int], int], name: str = "custom") -> SelectionFunction:
    return SelectionFunction(kind=name, params=(), fn=fn)


def _selector_fn(sel) -> Callable[[Situation], int]:
    if isinstance(sel, SelectionFunction):
        return sel.as_process().fn
    if isinstance(sel, SelectionProcess):
        return sel.fn
    raise TypeError(f"not a selection rule: {sel!r}")


def selected_frequency(sel, omega):
    """(count, frequency-of-ones) over the selected steps; frequency is None
    when nothing was selected."""
    bits = as_bits(omega)
    fn = _selector_fn(sel)
    count = ones = 0
    prefix: list = []
    for x in bits:
        if fn(prefix):
            count += 1
            ones += x
        prefix.append(x)
    if count == 0:
        return 0, None
    from fractions import Fraction

    return count, Fraction(ones, count)


def selected_average(
    phi: ForecastingSystem, h: LocalGamble, sel, omega
) -> Number:
    """Average over selected steps of h(outcome) minus its lower expectation;
    0 by convention when nothing is selected."""
    bits = as_bits(omega)
    fn = _selector_fn(sel)
    depth_only = phi.depth_fn is not None
    total = 0
    count = 0
    prefix: list = []
    for k, x in enumerate(bits):
        if fn(prefix):
            count += 1
            forecast = phi.at_depth(k) if depth_only else phi(tuple(prefix))
            total += h(x) - lower_ex(forecast, h)
        prefix.append(x)
    return 0 if count == 0 else total / count


@dataclass(frozen=True)
class ChurchVerdict:
    selection: str
    count: int
    final_frequency: Optional[float]
    tail_min: Optional[float]
    tail_max: Optional[float]
    slack: Optional[float]
    verdict: str

    def as_dict(self) -> dict:
        return {
            "selection": self.selection,
            "count": self.count,
            "final_frequency": self.final_frequency,
            "tail_min": self.tail_min,
            "tail_max": self.tail_max,
            "slack": self.slack,
            "verdict": self.verdict,
        }


def _running_selected_freqs(sel, bits):
    fn = _selector_fn(sel)
    freqs = []
    ones = count = 0
    prefix: list = []
    for x in bits:
        if fn(prefix):
            count += 1
            ones += x
            freqs.append(ones / count)
        prefix.append(x)
    return freqs


def church_verdict(
    forecast: IntervalForecast,
    omega,
    selections: Sequence,
    tail_window: float = 0.5,
) -> list:
    """Tail-window frequency verdicts for each selection rule.

    The liminf/limsup of the asymptotic statement are proxied by the min/max
    of the running selected frequency over the final ``tail_window`` fraction
    of selected points.  The verdict adds a binomial-fluctuation slack of
    3*sqrt(ub*(1-ub)/count) to the interval bounds; raw numbers are always
    reported so stricter judgements remain possible.
    """
    if not 0 < tail_window <= 1:
        raise ValueError("tail_window must be in (0, 1]")
    bits = as_bits(omega)
    out = []
    for sel in selections:
        name = sel.describe() if hasattr(sel, "describe") else str(sel)
        freqs = _running_selected_freqs(sel, bits)
        count = len(freqs)
        if count == 0:
            out.append(ChurchVerdict(name, 0, None, None, None, None, SKIPPED))
            continue
        start = count - max(1, math.ceil(tail_window * count))
        tail = freqs[start:]
        tmin, tmax = min(tail), max(tail)
        ub = float(forecast.upper)
        slack = 3.0 * math.sqrt(max(ub * (1.0 - ub), 0.0) / count)
        ok = (forecast.lower - slack) <= tmin and tmax <= (forecast.upper + slack)
        out.append(
            ChurchVerdict(
                selection=name,
                count=count,
                final_frequency=float(freqs[-1]),
                tail_min=float(tmin),
                tail_max=float(tmax),
                slack=slack,
                verdict=CONSISTENT if ok else VIOLATION,
            )
        )
    return out
