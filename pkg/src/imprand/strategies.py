"""Named test-supermartingale constructions and growth-function checks.

Every Strategy declares the forecasting system it bets against (its target)
and claims the supermartingale property for it: upper expected growth at most
one in every situation.  Strategies built here carry enough structure for the
fast evaluation lanes:

* state lane -- the bet depends only on (depth parity, previous bit); covers
  calibration bets against stationary/alternating targets with the standard
  selection rules, and matched divergence bets between such systems;
* step lane -- the bet depends only on the depth; covers divergence bets
  against depth-indexed precise systems and the rival-exploitation bets;
* general lane -- arbitrary multiplier or capital-process evaluators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .localmodels import IntervalForecast, LocalGamble, Number, lower_ex
from .selections import SelectionFunction, SelectionProcess, every_step
from .systems import ForecastingSystem, Situation, as_bits, lambda_trailing_zeros

START = -1  # previous-bit code for the initial situation


def fmt_num(x: Number) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    return repr(x) if isinstance(x, float) else str(x)


# ---------------------------------------------------------------------------
# fast-lane descriptors


@dataclass(frozen=True)
class StateTable:
    """Bet and selection flag per (depth parity, previous bit) state."""

    gambles: dict  # (parity, prev in (START, 0, 1)) -> LocalGamble
    selected: dict  # same keys -> 0/1

    def gamble_at(self, s: Situation) -> LocalGamble:
        prev = s[-1] if s else START
        return self.gambles[(len(s) & 1, prev)]

    def selected_at(self, s: Situation) -> int:
        prev = s[-1] if s else START
        return self.selected[(len(s) & 1, prev)]


@dataclass(frozen=True)
class StepTable:
    """Bet and selection flag as functions of the depth alone."""

    gamble_at_depth: Callable[[int], LocalGamble]
    selected_at_depth: Callable[[int], int]

    def gamble_at(self, s: Situation) -> LocalGamble:
        return self.gamble_at_depth(len(s))

    def selected_at(self, s: Situation) -> int:
        return self.selected_at_depth(len(s))


@dataclass
class Strategy:
    """A declared bet against ``target`` with its evaluation machinery."""

    name: str
    kind: str
    target: ForecastingSystem
    multiplier: Optional[Callable[[Situation], LocalGamble]] = None
    process: Optional[Callable[[Situation], Number]] = None
    params: dict = field(default_factory=dict)
    state_table: Optional[StateTable] = None
    step_table: Optional[StepTable] = None
    #: certified growth rate c: log-capital >= c * (selected count) when the
    #: certified trigger holds; also the default growth pairing in audits
    growth_rate: Optional[Number] = None
    members: Optional[tuple] = None
    weights: Optional[tuple] = None

    def table(self):
        return self.state_table or self.step_table

    def capital_process(self) -> Callable[[Situation], Number]:
        """Situation -> capital; O(depth) per call for multiplier strategies."""
        if self.process is not None:
            return self.process
        mult = self.multiplier

        def process(s):
            s = as_bits(s)
            cap = 1
            for k, x in enumerate(s):
                cap = cap * mult(s[:k])(x)
            return cap

        return process


# ---------------------------------------------------------------------------
# periodic structure helpers


def periodic_forecasts(phi: ForecastingSystem):
    """(even-depth, odd-depth) forecasts when the system is 2-periodic in depth."""
    if phi.kind in ("stationary", "vacuous"):
        one = phi(())
        return one, one
    if phi.kind == "alternating":
        return phi.at_depth(0), phi.at_depth(1)
    return None


def selection_states(sel) -> Optional[dict]:
    """(parity, prev) -> 0/1 for the state-drivable selection kinds."""
    if isinstance(sel, SelectionProcess):
        keys = [(par, prev) for par in (0, 1) for prev in (START, 0, 1)]
        if sel.kind == "constant":
            v = sel.params[0]
            return {k: v for k in keys}
        if sel.kind == "parity-of-depth":
            want = 0 if sel.params[0] == "even" else 1
            return {(par, prev): int(par == want) for par, prev in keys}
        if sel.kind == "bit-echo":
            b = sel.params[0]
            return {(par, prev): int(prev == b) for par, prev in keys}
    return None


# ---------------------------------------------------------------------------
# matched divergence gambles


def hellinger_gamble(alpha: Number, beta: Number) -> LocalGamble:
    """The unit-expectation likelihood-ratio bet between nearby Bernoullis.

    Both payoffs are positive, expectation under alpha is exactly 1, and the
    pointwise product with the swapped gamble is at least
    1/(1 - (alpha-beta)^2/4).  Endpoints 0 and 1 are outside the domain.
    """
    a, b = float(alpha), float(beta)
    if not (0.0 < a < 1.0 and 0.0 < b < 1.0):
        raise ValueError(f"divergence bet needs probabilities in (0,1), got {alpha}, {beta}")
    denom = math.sqrt(a * b) + math.sqrt((1.0 - a) * (1.0 - b))
    return LocalGamble(math.sqrt(b / a) / denom, math.sqrt((1.0 - b) / (1.0 - a)) / denom)


def hellinger_product_bound(alpha: Number, beta: Number) -> float:
    """Lower bound on the matched-pair payoff product at either outcome."""
    d = float(alpha) - float(beta)
    return 1.0 / (1.0 - 0.25 * d * d)


# ---------------------------------------------------------------------------
# calibration supermartingale


def calibration_supermartingale(
    phi: ForecastingSystem,
    h: LocalGamble,
    sel,
    eps: Number,
    bound: Number,
    name: str = None,
) -> Strategy:
    """The drift bet: multiply capital by 1 - xi * S(s) * (h - lower_ex(h)).

    With xi = eps/(2*bound^2) and |h - lower_ex(h)| <= bound, this is a
    positive supermartingale multiplier for ``phi``; whenever the selected
    average of the centred payoffs sits at or below -eps, the capital is at
    least exp(eps^2/(4*bound^2) * selected-count).
    """
    if not 0 < eps < bound:
        raise ValueError(f"need 0 < eps < bound, got eps={eps}, bound={bound}")
    if h.variation_norm > bound:
        raise ValueError(
            f"bound {bound} is below the payoff variation {h.variation_norm}"
        )
    if isinstance(sel, SelectionFunction):
        sel = sel.as_process()
    xi = eps / (2 * bound * bound)
    rate = eps * eps / (4 * bound * bound)

    def bet(forecast: IntervalForecast, selected: int) -> LocalGamble:
        if not selected:
            return LocalGamble(1, 1)
        centre = lower_ex(forecast, h)
        return LocalGamble(1 - xi * (h.at_one - centre), 1 - xi * (h.at_zero - centre))

    def multiplier(s: Situation) -> LocalGamble:
        return bet(phi(s), sel.fn(s))

    state_table = None
    pf = periodic_forecasts(phi)
    sstates = selection_states(sel)
    if pf is not None and sstates is not None:
        gambles = {
            key: bet(pf[key[0]], sstates[key]) for key in sstates
        }
        state_table = StateTable(gambles=gambles, selected=dict(sstates))

    name = name or (
        f"cal h=({fmt_num(h.at_one)},{fmt_num(h.at_zero)})"
        f" sel={sel.describe()} eps={fmt_num(eps)}"
    )
    return Strategy(
        name=name,
        kind="calibration",
        target=phi,
        multiplier=multiplier,
        params={
            "h": (h.at_one, h.at_zero),
            "sel": sel.describe(),
            "eps": eps,
            "bound": bound,
            "xi": xi,
        },
        state_table=state_table,
        growth_rate=rate,
    )


def calibration_certified_floor(eps: Number, bound: Number, selected_count: int) -> float:
    """Log-capital floor promised once the selected average reaches -eps."""
    return float(eps) ** 2 / (4.0 * float(bound) ** 2) * selected_count


# ---------------------------------------------------------------------------
# matched divergence pair


def _pair_gambles(target_forecast: IntervalForecast, ref_value: Number):
    """Pick the anchor endpoint and return (target bet, reference bet)."""
    if ref_value < target_forecast.lower:
        anchor = target_forecast.lower
    elif ref_value > target_forecast.upper:
        anchor = target_forecast.upper
    else:
        return None
    return hellinger_gamble(anchor, ref_value), hellinger_gamble(ref_value, anchor), anchor


def divergence_pair(
    target: ForecastingSystem,
    reference: ForecastingSystem,
    schedule: SelectionProcess = None,
    name: str = None,
) -> tuple:
    """Two bets whose payoff product grows whenever the systems disagree.

    At each scheduled situation the reference forecast must be precise and
    must fall strictly outside the target's interval; the first returned
    strategy is then a supermartingale for ``target``, the second an exact
    martingale for ``reference``, and the product of their step factors is at
    least 1/(1 - gap^2/4) with gap the anchor-to-reference distance.
    """
    schedule = schedule if schedule is not None else every_step()
    unit = LocalGamble(1, 1)

    def gambles_at(forecast: IntervalForecast, ref: IntervalForecast, where):
        if not ref.is_precise:
            raise ValueError(f"reference forecast must be precise at {where}")
        picked = _pair_gambles(forecast, ref.lower)
        if picked is None:
            raise ValueError(
                f"reference forecast {fmt_num(ref.lower)} lies inside the "
                f"target interval at {where}; the pair is not constructible"
            )
        return picked

    def target_mult(s: Situation) -> LocalGamble:
        if not schedule.fn(s):
            return unit
        return gambles_at(target(s), reference(s), s)[0]

    def reference_mult(s: Situation) -> LocalGamble:
        if not schedule.fn(s):
            return unit
        return gambles_at(target(s), reference(s), s)[1]

    # fast lanes
    t_state = r_state = t_step = r_step = None
    pf_t, pf_r = periodic_forecasts(target), periodic_forecasts(reference)
    sstates = selection_states(schedule)
    if pf_t is not None and pf_r is not None and sstates is not None:
        tg, rg, sel = {}, {}, {}
        for key in sstates:
            par = key[0]
            if sstates[key]:
                pick = gambles_at(pf_t[par], pf_r[par], f"depth parity {par}")
                tg[key], rg[key] = pick[0], pick[1]
                sel[key] = 1
            else:
                tg[key] = rg[key] = unit
                sel[key] = 0
        t_state = StateTable(tg, sel)
        r_state = StateTable(rg, sel)
    elif (
        pf_t is not None
        and reference.depth_fn is not None
        and sstates is not None
    ):
        # depth-indexed precise reference against a 2-periodic target; needs a
        # prev-independent schedule (constant or parity kinds)
        prev_free = all(
            sstates[(p, START)] == sstates[(p, 0)] == sstates[(p, 1)] for p in (0, 1)
        )
        if prev_free:

            def sched_at(d: int) -> int:
                return sstates[(d & 1, 0)]

            def t_gamble(d: int) -> LocalGamble:
                if not sched_at(d):
                    return unit
                return gambles_at(pf_t[d & 1], reference.at_depth(d), f"depth {d}")[0]

            def r_gamble(d: int) -> LocalGamble:
                if not sched_at(d):
                    return unit
                return gambles_at(pf_t[d & 1], reference.at_depth(d), f"depth {d}")[1]

            t_step = StepTable(t_gamble, sched_at)
            r_step = StepTable(r_gamble, sched_at)

    base = name or f"div ref={reference.describe()} sched={schedule.describe()}"
    params = {"reference": reference.describe(), "schedule": schedule.describe()}
    t = Strategy(
        name=f"{base} side=target",
        kind="divergence",
        target=target,
        multiplier=target_mult,
        params=dict(params),
        state_table=t_state,
        step_table=t_step,
    )
    r = Strategy(
        name=f"{base} side=reference",
        kind="divergence",
        target=reference,
        multiplier=reference_mult,
        params=dict(params),
        state_table=r_state,
        step_table=r_step,
    )
    return t, r


# ---------------------------------------------------------------------------
# rival exploitation against the dilution system


def lambda_count(m: int, n: int) -> int:
    """#{k < n : trailing-zeros index of k equals m}."""
    if n <= 0:
        return 0
    # ranks m are hit by k = 2^m (2l+1) - 1
    period = 1 << (m + 1)
    first = (1 << m) - 1
    return 0 if first >= n else (n - 1 - first) // period + 1


def rival_exploit_multipliers(ea_system: ForecastingSystem, m: int) -> tuple:
    """The bet pair that ruins rival ``m`` of a dilution system.

    Returns (rival-side strategy, host-side strategy).  On depths whose
    trailing-zeros index is ``m`` the factors multiply to at least
    delta = 1/(1 - eps_m^2/4) > 1, so once the host side stays below a bound
    B along a path, the rival side's capital is at least B^-1 * delta^(count
    of such depths).
    """
    if ea_system.kind != "explain-away":
        raise ValueError("rival exploitation needs an explain-away system")
    aux = ea_system.aux
    rivals = aux["rivals"]
    if not 0 <= m < len(rivals):
        raise ValueError(f"rival index {m} not in the rival list (size {len(rivals)})")
    rp = aux["rival_params"][m]
    rival = rivals[m]
    unit = LocalGamble(1, 1)

    def branch_bets(rival_upper):
        if rival_upper <= rp.hi - 2 * rp.eps:
            return (
                hellinger_gamble(rp.hi - rp.eps, rp.hi),
                hellinger_gamble(rp.hi, rp.hi - rp.eps),
            )
        return (
            hellinger_gamble(rp.lo + rp.eps, rp.lo),
            hellinger_gamble(rp.lo, rp.lo + rp.eps),
        )

    def rival_mult(s: Situation) -> LocalGamble:
        if lambda_trailing_zeros(len(s)) != m:
            return unit
        return branch_bets(rival.upper(s))[0]

    def host_mult(s: Situation) -> LocalGamble:
        if lambda_trailing_zeros(len(s)) != m:
            return unit
        return branch_bets(rival.upper(s))[1]

    r_step = h_step = None
    if rival.depth_fn is not None:

        def sel_at(d: int) -> int:
            return int(lambda_trailing_zeros(d) == m)

        def r_gamble(d: int) -> LocalGamble:
            return branch_bets(rival.at_depth(d).upper)[0] if sel_at(d) else unit

        def h_gamble(d: int) -> LocalGamble:
            return branch_bets(rival.at_depth(d).upper)[1] if sel_at(d) else unit

        r_step = StepTable(r_gamble, sel_at)
        h_step = StepTable(h_gamble, sel_at)

    delta = 1 / (1 - rp.eps * rp.eps / 4)
    params = {"rival": rival.describe(), "m": m, "eps": rp.eps, "delta": delta}
    rate = math.log(float(delta))
    return (
        Strategy(
            name=f"rival-exploit m={m} side=rival",
            kind="rival-exploit",
            target=rival,
            multiplier=rival_mult,
            params=dict(params),
            step_table=r_step,
            growth_rate=rate,
        ),
        Strategy(
            name=f"rival-exploit m={m} side=host",
            kind="rival-exploit",
            target=ea_system,
            multiplier=host_mult,
            params=dict(params),
            step_table=h_step,
        ),
    )


# ---------------------------------------------------------------------------
# combinators


def mixture(strategies: Sequence[Strategy], weights: Sequence[Number] = None) -> Strategy:
    """Convex blend of capital processes; default weights 2^-k, normalised."""
    strategies = list(strategies)
    if not strategies:
        raise ValueError("mixture of nothing")
    target = strategies[0].target
    for st in strategies[1:]:
        if st.target != target:
            raise ValueError(
                f"mixture members disagree on the target: {st.name} targets "
                f"{st.target.describe()}, expected {target.describe()}"
            )
    if weights is None:
        raw = [Fraction(1, 2**k) for k in range(len(strategies))]
        total = sum(raw)
        weights = [w / total for w in raw]
    weights = [Fraction(w) if not isinstance(w, float) else w for w in weights]
    if any(w <= 0 for w in weights):
        raise ValueError("mixture weights must be positive")
    if sum(weights) > 1:
        raise ValueError("mixture weights must sum to at most 1")
    members = tuple(strategies)
    wts = tuple(weights)

    def process(s):
        total = 0
        for st, w in zip(members, wts):
            total += w * st.capital_process()(s)
        return total

    return Strategy(
        name=f"mixture[{len(members)}]",
        kind="mixture",
        target=target,
        process=process,
        params={"weights": tuple(fmt_num(w) for w in wts)},
        members=members,
        weights=wts,
    )


def cap_at(strategy: Strategy, alpha: Number) -> Strategy:
    """Freeze the capital at ``alpha`` from the first time it reaches it."""
    if not alpha > 1:
        raise ValueError(f"cap must exceed the unit initial capital, got {alpha}")

    inner = strategy.capital_process()

    def process(s):
        s = as_bits(s)
        for k in range(len(s) + 1):
            if inner(s[:k]) >= alpha:
                return alpha
        return inner(s)

    return Strategy(
        name=f"cap({fmt_num(alpha)}) {strategy.name}",
        kind="cap",
        target=strategy.target,
        process=process,
        params={"alpha": alpha},
        members=(strategy,),
    )


def strictify(strategy: Strategy) -> Strategy:
    """Shift-and-halve transform making every bet strictly favourable to drop;
    unbounded on exactly the same paths as the original."""
    inner = strategy.capital_process()

    def process(s):
        s = as_bits(s)
        return (inner(s) + Fraction(1, len(s) + 1)) / 2

    return Strategy(
        name=f"strict {strategy.name}",
        kind="strictified",
        target=strategy.target,
        process=process,
        params={},
        members=(strategy,),
    )


# ---------------------------------------------------------------------------
# growth functions and crossing reports


@dataclass(frozen=True)
class GrowthFunction:
    """Closed-form non-decreasing unbounded time bound."""

    family: str
    params: tuple
    sigma: Optional[Callable[[int], int]] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        fam, p = self.family, self.params
        ok = {
            "affine": lambda: len(p) == 2 and p[0] >= 0 and p[1] > 0,
            "power": lambda: len(p) == 2 and p[0] > 0 and p[1] > 0,
            "log-scaled": lambda: len(p) == 2 and p[0] >= 0 and p[1] > 0,
            "exp-scaled": lambda: len(p) == 2 and p[0] > 0 and p[1] > 0,
            "selection-driven": lambda: len(p) >= 1 and p[0] > 0 and self.sigma is not None,
        }.get(fam)
        if ok is None:
            raise ValueError(f"unknown growth family {fam!r}")
        if not ok():
            raise ValueError(f"invalid parameters {p} for {fam} growth")

    def describe(self) -> str:
        return f"{self.family}({','.join(fmt_num(x) for x in self.params)})"

    def log_values(self, n_max: int):
        """log tau(n) for n = 0..n_max; -inf where tau vanishes."""
        a_b = self.params[:2] if len(self.params) >= 2 else (self.params[0], None)
        out = []
        if self.family == "selection-driven":
            c = float(self.params[0])
            acc = 0
            out.append(0.0)
            for k in range(1, n_max + 1):
                acc += 1 if self.sigma(k) else 0
                out.append(c * acc)
            return out
        a, b = float(a_b[0]), float(a_b[1])
        for n in range(n_max + 1):
            if self.family == "affine":
                v = a + b * n
                out.append(math.log(v) if v > 0 else -math.inf)
            elif self.family == "power":
                out.append(math.log(a) + b * math.log(n) if n > 0 else -math.inf)
            elif self.family == "log-scaled":
                v = a + b * math.log(n + 1)
                out.append(math.log(v) if v > 0 else -math.inf)
            else:  # exp-scaled
                out.append(math.log(a) + b * n)
        return out

    def value(self, n: int) -> float:
        return math.exp(self.log_values(n)[n])


def affine_growth(a, b) -> GrowthFunction:
    return GrowthFunction("affine", (a, b))


def selection_growth(rate, sigma: Callable[[int], int], label="sel") -> GrowthFunction:
    return GrowthFunction("selection-driven", (rate, label), sigma=sigma)


@dataclass(frozen=True)
class CrossingReport:
    """Where a capital trajectory meets or beats a growth function."""

    growth: str
    crossings: tuple
    strict_count: int
    max_log_excess: float
    max_log_ratio: float

    @property
    def count(self) -> int:
        return len(self.crossings)

    @property
    def first(self):
        return self.crossings[0] if self.crossings else None

    @property
    def last(self):
        return self.crossings[-1] if self.crossings else None

    @property
    def crossed(self) -> bool:
        return bool(self.crossings)

    def ratio_bounded_away(self, floor: float) -> bool:
        return self.max_log_ratio >= math.log(floor)

    def as_dict(self) -> dict:
        return {
            "growth": self.growth,
            "count": self.count,
            "first": self.first,
            "last": self.last,
            "strict_count": self.strict_count,
            "max_log_excess": self.max_log_excess,
        }


def exceeds_growth(trajectory, tau: GrowthFunction, start: int = 0) -> CrossingReport:
    """All n >= start where the capital meets tau(n), plus the variant stats.

    Three tests are reported: capital >= tau(n) (the crossings), capital
    strictly above the integerised bound floor(tau(n)), and the sup of
    log(capital/tau) as the ratio criterion.
    """
    logs = trajectory.log_capital
    n_max = len(logs) - 1
    logtau = tau.log_values(n_max)
    crossings = []
    strict = 0
    max_excess = -math.inf
    max_ratio = -math.inf
    for n in range(start, n_max + 1):
        if logs[n] == -math.inf and logtau[n] == -math.inf:
            excess = 0.0  # ruined capital against a vanished bound: tie
        else:
            excess = logs[n] - logtau[n]
        if excess >= 0:
            crossings.append(n)
        if excess > max_excess:
            max_excess = excess
        if logtau[n] > -math.inf:
            if excess > max_ratio:
                max_ratio = excess
            floor_tau = math.floor(math.exp(logtau[n]))
            if floor_tau <= 0 or logs[n] > math.log(floor_tau):
                strict += 1
        else:
            strict += 1
    return CrossingReport(
        growth=tau.describe(),
        crossings=tuple(crossings),
        strict_count=strict,
        max_log_excess=max_excess,
        max_log_ratio=max_ratio,
    )
