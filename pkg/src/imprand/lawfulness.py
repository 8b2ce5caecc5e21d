"""Frequency-restriction law algorithms and their path checks.

A law algorithm maps each situation s to a restrictive finite set of strict
extensions; a path obeys the law if, at every prefix, the prescribed set
contains a further prefix of the path while provably excluding at least one
extension.  The built-in family R(n, r) prescribes, at a prefix of depth m,
all extensions of depth r*max(n, m) whose ones count stays below
r*max(n, m) - max(n, m), i.e. whose ones frequency stays below 1 - 1/r.

Everything here is exact integer arithmetic.  The member sets are never
enumerated (they are combinatorially large); the four conditions are checked
through the membership predicate, one inclusion witness (the path's own
prefix) and one exclusion witness (the all-ones extension).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .systems import ResourceLimitError, as_bits


@dataclass(frozen=True)
class LawAlgorithm:
    """The frequency-restriction family, parameterised by n >= 2 and r >= 2."""

    n: int
    r: int

    def __post_init__(self):
        if self.n < 2 or self.r < 2:
            raise ValueError(f"law algorithm needs n >= 2 and r >= 2, got {self.n}, {self.r}")

    def target_depth(self, prefix_depth: int) -> int:
        return self.r * max(self.n, prefix_depth)

    def describe(self) -> str:
        return f"R(n={self.n},r={self.r})"


def law_member(alg: LawAlgorithm, s, t) -> bool:
    """Membership of t in the prescribed set at s.

    Requires: depth of t equal to r*max(n, |s|), t extends s, and the ones
    count of t below r*max(n,|s|) - max(n,|s|).
    """
    s, t = as_bits(s), as_bits(t)
    m_eff = max(alg.n, len(s))
    if len(t) != alg.r * m_eff:
        return False
    if t[: len(s)] != s:
        return False
    return sum(t) < alg.r * m_eff - m_eff


@dataclass(frozen=True)
class ConditionFailure:
    m: int
    condition: str
    detail: str


@dataclass(frozen=True)
class LawfulnessReport:
    algorithm: str
    m_checked: int
    failure: Optional[ConditionFailure]

    @property
    def ok(self) -> bool:
        return self.failure is None

    def as_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "m_checked": self.m_checked,
            "ok": self.ok,
            "failure": None
            if self.failure is None
            else {
                "m": self.failure.m,
                "condition": self.failure.condition,
                "detail": self.failure.detail,
            },
        }


def check_lawful_for(omega, alg: LawAlgorithm, m_max: int) -> LawfulnessReport:
    """Verify the four lawfulness conditions at every prefix depth m <= m_max.

    (i)   the prescribed set is defined -- holds by construction;
    (ii)  all members strictly extend the prefix -- structural, since the
          member depth r*max(n, m) exceeds m;
    (iii) the set is restrictive -- witnessed by the excluded all-ones
          extension of the prefix;
    (iv)  some member is a further prefix of the path -- witnessed by the
          path's own prefix at the member depth, when its ones count allows.

    Stops at the first failing m.  The path prefix must be long enough to
    read the deepest witness.
    """
    bits = as_bits(omega)
    need = alg.target_depth(m_max)
    if len(bits) < need:
        raise ResourceLimitError(
            f"prefix of length {len(bits)} too short; checking m <= {m_max} "
            f"needs at least {need} bits"
        )
    ones_running = 0
    ones_at = [0]  # ones count of each prefix
    for b in bits:
        ones_running += b
        ones_at.append(ones_running)

    for m in range(m_max + 1):
        m_eff = max(alg.n, m)
        depth = alg.r * m_eff
        # (ii) structural
        if not depth > m:
            return LawfulnessReport(
                alg.describe(), m, ConditionFailure(m, "ii", "member depth not past prefix")
            )
        # (iii) the all-ones extension must be excluded
        allones_count = ones_at[m] + (depth - m)
        if not allones_count >= alg.r * m_eff - m_eff:
            return LawfulnessReport(
                alg.describe(),
                m,
                ConditionFailure(m, "iii", "all-ones extension was not excluded"),
            )
        # (iv) the path's own prefix must be a member
        if not ones_at[depth] < alg.r * m_eff - m_eff:
            return LawfulnessReport(
                alg.describe(),
                m,
                ConditionFailure(
                    m,
                    "iv",
                    f"path prefix of depth {depth} has ones count {ones_at[depth]}"
                    f" >= {alg.r * m_eff - m_eff}",
                ),
            )
    return LawfulnessReport(alg.describe(), m_max, None)
