"""Forecasting systems: one interval forecast per situation of the event tree.

Situations (finite bit strings) are plain tuples of 0/1 ints; the empty tuple
is the initial situation.  ``as_bits`` normalises the accepted spellings
("0101", [0,1,0,1], b"\\x0f" is *not* accepted here -- packed input goes
through pathsim.ingest_bits).

A ForecastingSystem is a total, deterministic map from situations to interval
forecasts.  Systems whose forecast depends on the depth only also expose
``depth_fn`` so long paths can be walked without materialising prefixes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .localmodels import IntervalForecast, Number

Situation = tuple  # tuple of 0/1 ints
ROOT: Situation = ()

DEPTH_EXHAUSTION_LIMIT = 20


class ResourceLimitError(RuntimeError):
    """An exhaustive walk was asked to go past the configured limit."""


def as_bits(value) -> Situation:
    """Normalise a bit-sequence spelling to a tuple of 0/1 ints."""
    if isinstance(value, tuple) and all(b in (0, 1) for b in value):
        return value
    if isinstance(value, str):
        out = []
        for i, ch in enumerate(value):
            if ch not in "01":
                raise ValueError(f"illegal bit character {ch!r} at offset {i}")
            out.append(ch == "1")
        return tuple(int(b) for b in out)
    bits = tuple(int(b) for b in value)
    if any(b not in (0, 1) for b in bits):
        raise ValueError("bits must all be 0 or 1")
    return bits


def to_fraction(x: Number) -> Fraction:
    """Exact rational for ints/Fractions; floats go via their shortest decimal
    spelling when that round-trips, else via their exact binary value."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        via_repr = Fraction(repr(x))
        return via_repr if float(via_repr) == x else Fraction(x)
    return Fraction(x)


@dataclass(frozen=True)
class ForecastingSystem:
    """Total map situation -> IntervalForecast, identified by (kind, params)."""

    kind: str
    params: tuple
    evaluate: Callable[[Situation], IntervalForecast] = field(compare=False, repr=False)
    # set when the forecast depends only on the situation's depth
    depth_fn: Optional[Callable[[int], IntervalForecast]] = field(
        default=None, compare=False, repr=False
    )
    # sup over situations of the forecast width, when known in closed form
    imprecision_sup: Optional[Number] = field(default=None, compare=False, repr=False)
    aux: object = field(default=None, compare=False, repr=False)

    def __call__(self, situation) -> IntervalForecast:
        return self.evaluate(as_bits(situation))

    def at_depth(self, depth: int) -> IntervalForecast:
        if self.depth_fn is None:
            raise ValueError(f"{self.kind} system is not depth-only")
        return self.depth_fn(depth)

    def lower(self, situation) -> Number:
        return self(situation).lower

    def upper(self, situation) -> Number:
        return self(situation).upper

    def describe(self) -> str:
        if not self.params:
            return self.kind
        inner = ",".join(str(p) for p in self.params)
        return f"{self.kind}({inner})"


def stationary(interval) -> ForecastingSystem:
    """The same interval forecast in every situation."""
    if not isinstance(interval, IntervalForecast):
        lo, hi = interval
        interval = IntervalForecast(lo, hi)
    return ForecastingSystem(
        kind="stationary",
        params=(interval.lower, interval.upper),
        evaluate=lambda s: interval,
        depth_fn=lambda d: interval,
        imprecision_sup=interval.width,
    )


def precise(p: Number) -> ForecastingSystem:
    return stationary(IntervalForecast.precise(p))


def vacuous() -> ForecastingSystem:
    sys = stationary(IntervalForecast.vacuous())
    return ForecastingSystem(
        kind="vacuous",
        params=(),
        evaluate=sys.evaluate,
        depth_fn=sys.depth_fn,
        imprecision_sup=1,
    )


def alternating(p: Number, q: Number) -> ForecastingSystem:
    """Precise forecast p in odd-depth situations, q in even-depth ones."""
    if not (0 <= p < q <= 1):
        raise ValueError(f"alternating system needs 0 <= p < q <= 1, got p={p}, q={q}")
    odd = IntervalForecast.precise(p)
    even = IntervalForecast.precise(q)

    def at_depth(d: int) -> IntervalForecast:
        return odd if d % 2 else even

    return ForecastingSystem(
        kind="alternating",
        params=(p, q),
        evaluate=lambda s: at_depth(len(s)),
        depth_fn=at_depth,
        imprecision_sup=0,
    )


def near_half_forecast(n: int) -> float:
    """1/2 + (-1)^n * sqrt(8/(n+33)); strictly inside (0, 1), tending to 1/2."""
    if n < 0:
        raise ValueError("depth must be non-negative")
    delta = math.sqrt(8.0 / (n + 33))
    return 0.5 + delta if n % 2 == 0 else 0.5 - delta


def near_half() -> ForecastingSystem:
    """Precise forecasts oscillating around 1/2 with slowly shrinking swing."""

    def at_depth(d: int) -> IntervalForecast:
        return IntervalForecast.precise(near_half_forecast(d))

    return ForecastingSystem(
        kind="near-half",
        params=(),
        evaluate=lambda s: at_depth(len(s)),
        depth_fn=at_depth,
        imprecision_sup=0,
    )


def table(mapping, default: IntervalForecast = None) -> ForecastingSystem:
    """Explicit situation -> interval map; unlisted situations are vacuous."""
    default = default if default is not None else IntervalForecast.vacuous()
    norm = {}
    for key, val in dict(mapping).items():
        if not isinstance(val, IntervalForecast):
            val = IntervalForecast(val[0], val[1])
        norm[as_bits(key)] = val
    widths = [v.width for v in norm.values()] + [default.width]
    frozen = tuple(sorted((k, (v.lower, v.upper)) for k, v in norm.items()))
    return ForecastingSystem(
        kind="table",
        params=(frozen, (default.lower, default.upper)),
        evaluate=lambda s: norm.get(s, default),
        imprecision_sup=max(widths),
    )


def from_callable(
    fn: Callable[[Situation], IntervalForecast],
    params: tuple = (),
    depth_fn=None,
    imprecision_sup=None,
) -> ForecastingSystem:
    """Wrap an arbitrary evaluator (fixtures, derived systems)."""
    return ForecastingSystem(
        kind="composite",
        params=params,
        evaluate=fn,
        depth_fn=depth_fn,
        imprecision_sup=imprecision_sup,
    )


def lambda_trailing_zeros(n: int) -> int:
    """Number of trailing zeros in the binary expansion of n+1.

    Every value m has infinitely many preimages: exactly {2^m (2l+1) - 1}.
    """
    if n < 0:
        raise ValueError("index must be non-negative")
    m = n + 1
    return (m & -m).bit_length() - 1


@dataclass(frozen=True)
class RivalParams:
    """Derived per-rival constants of the dilution construction."""

    eps: Fraction
    lo: Fraction  # inner anchor just above the host interval's lower bound
    hi: Fraction  # inner anchor just below the host interval's upper bound


def _dyadic_round(x: Fraction, quantum: Fraction) -> Fraction:
    # round-half-away is irrelevant here; nearest multiple of the quantum
    k = (x / quantum).numerator // (x / quantum).denominator  # floor
    lo_mult, hi_mult = k * quantum, (k + 1) * quantum
    return lo_mult if x - lo_mult <= hi_mult - x else hi_mult


def explain_away(interval, rivals: Sequence[ForecastingSystem]) -> ForecastingSystem:
    """Precise system inside ``interval`` that dodges each rival infinitely often.

    Rival m is consulted whenever the depth's trailing-zeros index equals m;
    the emitted forecast is the upper anchor ``hi_m`` when rival m's upper
    endpoint certifiably sits low, else the lower anchor ``lo_m``.  Depths
    whose index exceeds the rival list get the host upper bound.  All derived
    constants are exact rationals and every ordering they must satisfy is
    verified at construction time.
    """
    if not isinstance(interval, IntervalForecast):
        interval = IntervalForecast(interval[0], interval[1])
    lo = to_fraction(interval.lower)
    hi = to_fraction(interval.upper)
    width = hi - lo
    rivals = list(rivals)
    if not rivals:
        raise ValueError("need at least one rival system")

    rival_params = []
    for m, rival in enumerate(rivals):
        sup = rival.imprecision_sup
        if sup is None:
            raise ValueError(
                f"rival #{m} ({rival.kind}) has no known imprecision bound"
            )
        sup = to_fraction(sup)
        if not sup < width:
            raise ValueError(
                f"rival #{m} imprecision {sup} is not smaller than the host width {width}"
            )
        eps = Fraction(1)
        while not sup + 6 * eps < width:
            eps /= 2
        quantum = eps / 8
        lo_m = _dyadic_round(lo + eps / 2, quantum)
        hi_m = _dyadic_round(hi - eps / 2, quantum)
        chain_ok = (
            0 <= lo < lo_m < lo + eps
            and hi - eps < hi_m < hi <= 1
            and lo_m + eps < hi_m - eps
        )
        if not chain_ok:  # dyadic snap landed on a bound; exact values always work
            lo_m, hi_m = lo + eps / 2, hi - eps / 2
            assert 0 <= lo < lo_m < lo + eps < hi - eps < hi_m < hi <= 1
        rival_params.append(RivalParams(eps=eps, lo=lo_m, hi=hi_m))

    rival_params = tuple(rival_params)

    def evaluate(s: Situation) -> IntervalForecast:
        m = lambda_trailing_zeros(len(s))
        if m < len(rivals):
            rp = rival_params[m]
            if rivals[m].upper(s) <= rp.hi - 2 * rp.eps:
                return IntervalForecast.precise(rp.hi)
            return IntervalForecast.precise(rp.lo)
        return IntervalForecast.precise(hi)

    depth_fn = None
    if all(r.depth_fn is not None for r in rivals):

        def depth_fn(d: int) -> IntervalForecast:
            m = lambda_trailing_zeros(d)
            if m < len(rivals):
                rp = rival_params[m]
                if rivals[m].at_depth(d).upper <= rp.hi - 2 * rp.eps:
                    return IntervalForecast.precise(rp.hi)
                return IntervalForecast.precise(rp.lo)
            return IntervalForecast.precise(hi)

    return ForecastingSystem(
        kind="explain-away",
        params=(lo, hi, tuple(r.describe() for r in rivals), rival_params),
        evaluate=evaluate,
        depth_fn=depth_fn,
        imprecision_sup=0,
        aux={"rivals": tuple(rivals), "rival_params": rival_params, "host": (lo, hi)},
    )


def situations_up_to(depth: int) -> Iterable[Situation]:
    from itertools import product

    for d in range(depth + 1):
        yield from product((0, 1), repeat=d)


def is_at_least_as_conservative(
    phi: ForecastingSystem,
    psi: ForecastingSystem,
    depth: int,
    limit: int = DEPTH_EXHAUSTION_LIMIT,
) -> bool:
    """True iff psi is at least as conservative as phi up to ``depth``:
    phi(s) is a subset of psi(s) for every situation with |s| <= depth."""
    if depth > limit:
        raise ResourceLimitError(
            f"exhaustive check to depth {depth} exceeds the limit {limit}"
        )
    return all(phi(s).issubset(psi(s)) for s in situations_up_to(depth))


def build_system(descriptor: dict) -> ForecastingSystem:
    """Build a system from a flat descriptor, as the CLI manifest produces."""
    kind = descriptor.get("kind")
    if kind == "stationary":
        if "interval" in descriptor:
            return stationary(descriptor["interval"])
        return precise(descriptor["p"])
    if kind == "vacuous":
        return vacuous()
    if kind == "alternating":
        return alternating(descriptor["p"], descriptor["q"])
    if kind == "near-half":
        return near_half()
    if kind == "explain-away":
        rivals = descriptor.get("rivals")
        if rivals is None:
            rivals = [stationary(descriptor["rival-interval"])]
        return explain_away(descriptor["interval"], rivals)
    if kind == "table":
        return table(descriptor["entries"])
    raise ValueError(f"unknown system kind {kind!r}")
