"""Sceptic's capital accounting along a path.

A multiplier process assigns each situation a non-negative payoff pair; the
generated capital starts at 1 and gets multiplied by the realised payoff at
every step.  Capital lives in the log domain because the interesting
strategies grow geometrically (linear binary64 overflows near step 700);
log-capital -inf encodes ruined (zero) capital and is absorbing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

from .localmodels import IntervalForecast, LocalGamble, Number, upper_ex
from .systems import ForecastingSystem, Situation, as_bits

NEG_INF = float("-inf")

#: absolute slack for <=-comparisons on local expectations in binary64 mode
FLOAT_TOL = 1e-12


class ContractViolation(RuntimeError):
    """A multiplier broke its non-negativity contract at a named situation."""


def _is_exact(*values) -> bool:
    return not any(isinstance(v, float) for v in values)


@dataclass(frozen=True)
class CapitalTrajectory:
    """Log of the running capital after 0..n steps; entry 0 is always 0."""

    log_capital: tuple

    def __len__(self) -> int:
        return len(self.log_capital)

    @property
    def steps(self) -> int:
        return len(self.log_capital) - 1

    @property
    def final_log(self) -> float:
        return self.log_capital[-1]

    @property
    def max_log(self) -> float:
        return max(self.log_capital)

    def capital(self, k: int) -> float:
        return math.exp(self.log_capital[k])

    @property
    def final(self) -> float:
        return math.exp(self.final_log)


def process_difference(process: Callable[[Situation], Number], s) -> LocalGamble:
    """The one-step payoff of a real process at s: x -> F(sx) - F(s)."""
    s = as_bits(s)
    base = process(s)
    return LocalGamble(process(s + (1,)) - base, process(s + (0,)) - base)


def run_multiplier(multiplier, omega) -> CapitalTrajectory:
    """Capital generated by a multiplier process along the path prefix.

    ``multiplier`` maps situations to non-negative LocalGambles.  A negative
    payoff raises ContractViolation naming the situation; a zero payoff ruins
    the capital for good.
    """
    bits = as_bits(omega)
    log = 0.0
    out: List[float] = [0.0]
    for k, x in enumerate(bits):
        factor = multiplier(bits[:k])(x)
        if factor < 0:
            raise ContractViolation(
                f"negative multiplier {factor} at situation {bits[:k]!r}"
            )
        if log == NEG_INF or factor == 0:
            log = NEG_INF
        else:
            log += math.log(factor)
        out.append(log)
    return CapitalTrajectory(tuple(out))


def run_process(process: Callable[[Situation], Number], omega) -> CapitalTrajectory:
    """Log-trajectory of a non-negative real process with unit initial value."""
    bits = as_bits(omega)
    out = []
    for k in range(len(bits) + 1):
        v = process(bits[:k])
        if v < 0:
            raise ContractViolation(f"negative capital {v} at {bits[:k]!r}")
        out.append(math.log(v) if v > 0 else NEG_INF)
    if abs(out[0]) > 1e-12:
        raise ContractViolation(f"initial capital must be 1, got log {out[0]}")
    return CapitalTrajectory(tuple(out))


def is_supermartingale_multiplier_at(
    multiplier, forecast: IntervalForecast, s, tol: float = FLOAT_TOL
) -> bool:
    """Whether the local bet at s keeps upper expected capital growth <= 1."""
    g = multiplier(as_bits(s))
    ub = upper_ex(forecast, g)
    slack = tol if not _is_exact(ub) else 0
    return ub <= 1 + slack


@dataclass(frozen=True)
class Violation:
    step: int
    situation: Situation
    excess: float


@dataclass(frozen=True)
class VerificationReport:
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_supermartingale_along(
    process: Callable[[Situation], Number],
    phi: ForecastingSystem,
    omega,
    tol: float = FLOAT_TOL,
) -> VerificationReport:
    """Check the supermartingale inequality at every situation along omega.

    At each prefix s of the path, the process difference must have
    non-positive upper expectation under phi(s).  Violations are reported
    with their location; they are data, not errors.
    """
    bits = as_bits(omega)
    bad = []
    for k in range(len(bits)):
        s = bits[:k]
        delta = process_difference(process, s)
        ub = upper_ex(phi(s), delta)
        slack = tol if not _is_exact(ub) else 0
        if ub > slack:
            bad.append(Violation(k, s, float(ub)))
    return VerificationReport(tuple(bad))


def verify_multiplier_along(
    multiplier,
    phi: ForecastingSystem,
    omega,
    tol: float = FLOAT_TOL,
) -> VerificationReport:
    """Multiplier-level form of the supermartingale check along omega.

    Whenever the generated capital is positive, upper expected growth <= 1 at
    every prefix is equivalent to the process-level inequality; it also covers
    the ruined region, where the process-level differences are identically 0.
    """
    bits = as_bits(omega)
    bad = []
    for k in range(len(bits)):
        s = bits[:k]
        ub = upper_ex(phi(s), multiplier(s))
        slack = tol if not _is_exact(ub) else 0
        if ub > 1 + slack:
            bad.append(Violation(k, s, float(ub - 1)))
    return VerificationReport(tuple(bad))
