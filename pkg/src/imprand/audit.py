"""Randomness audits and the stationary-interval filter scan.

An audit runs a battery of declared strategies along a path and reports a
one-sided verdict: REFUTED when some strategy's capital betrays the target
system (bounded mode: max capital reaches the threshold; growth mode: the
trajectory meets its paired growth function inside the tail window), and
NOT-REFUTED otherwise -- never "random".

The filter scan audits every interval on a grid and assembles the surviving
family.  Two structural facts are enforced on every output: refutations
propagate to subintervals (a witness against a wide interval is a witness
against every narrower one, since shrinking the interval only shrinks the
betting constraints), and the running-frequency hull measured at grid
resolution must sit inside every survivor.  Overlapping survivors whose
intersection cell was refuted are flagged as finite-sample anomalies rather
than repaired: closure under intersection is only guaranteed in the limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from . import core
from .capital import (
    FLOAT_TOL,
    CapitalTrajectory,
    verify_multiplier_along,
    verify_supermartingale_along,
)
from .localmodels import IntervalForecast, LocalGamble, upper_ex
from .selections import SelectionProcess, bit_echo, every_step, parity
from .strategies import (
    START,
    GrowthFunction,
    Strategy,
    affine_growth,
    calibration_supermartingale,
    divergence_pair,
    exceeds_growth,
    fmt_num,
    periodic_forecasts,
    selection_growth,
)
from .systems import ForecastingSystem, as_bits, precise, stationary

BATTERY_VERSION = "default-1"
DEFAULT_THRESHOLD = 100.0
DEFAULT_EPS_GRID = (Fraction(2, 5), Fraction(1, 5), Fraction(1, 10), Fraction(1, 20))
DEFAULT_REFERENCES = (Fraction(1, 4), Fraction(3, 4))
GRID_CHOICES = (10, 20, 40, 100)

REFUTED = "REFUTED"
NOT_REFUTED = "NOT-REFUTED"

_PREV_CODES = ((START, 2), (0, 0), (1, 1))


def _np_bits(omega) -> np.ndarray:
    return np.asarray(as_bits(omega), dtype=np.uint8)


# ---------------------------------------------------------------------------
# battery construction


def standard_selections() -> list:
    return [every_step(), parity("even"), parity("odd"), bit_echo(0), bit_echo(1)]


def default_battery(
    target: ForecastingSystem,
    eps_grid: Sequence = DEFAULT_EPS_GRID,
    references: Sequence = DEFAULT_REFERENCES,
    include_divergence: bool = True,
) -> list:
    """Calibration bets over the standard selections and payoff directions,
    plus matched divergence bets against a few precise reference coins."""
    battery = []
    for h in (LocalGamble(1, 0), LocalGamble(-1, 0)):
        for sel in standard_selections():
            for eps in eps_grid:
                battery.append(calibration_supermartingale(target, h, sel, eps, 1))
    if include_divergence:
        for ref in references:
            try:
                t_side, _ = divergence_pair(target, precise(ref))
            except ValueError:
                continue  # reference not separated from the target here
            battery.append(t_side)
    return battery


def scan_battery_template(grid: int) -> Callable[[IntervalForecast], list]:
    """Default per-cell battery for a grid scan.

    The calibration drift levels extend down to a quarter of the grid step so
    neighbouring cells separated by real frequency drift get told apart.
    """
    extra = (Fraction(1, 2 * grid), Fraction(1, 4 * grid))
    eps_grid = tuple(dict.fromkeys(DEFAULT_EPS_GRID + extra))

    def template(interval: IntervalForecast) -> list:
        return default_battery(stationary(interval), eps_grid=eps_grid)

    return template


# ---------------------------------------------------------------------------
# lane compilation and trajectories


def _log_factor(value) -> float:
    v = float(value)
    if v < 0:
        raise ValueError(f"negative bet factor {value}")
    return math.log(v) if v > 0 else -math.inf


def compile_state_tables(battery: Sequence[Strategy]):
    K = len(battery)
    logf = np.empty((K, 12), dtype=np.float64)
    sel = np.zeros((K, 6), dtype=np.uint8)
    rates = np.zeros(K, dtype=np.float64)
    for j, st in enumerate(battery):
        tbl = st.state_table
        for par in (0, 1):
            for prev, code in _PREV_CODES:
                g = tbl.gambles[(par, prev)]
                logf[j, par * 6 + code * 2 + 0] = _log_factor(g.at_zero)
                logf[j, par * 6 + code * 2 + 1] = _log_factor(g.at_one)
                sel[j, par * 3 + code] = tbl.selected[(par, prev)]
        rates[j] = float(st.growth_rate) if st.growth_rate is not None else 0.0
    return logf, sel, rates


def _step_arrays(strategy: Strategy, n: int):
    """Per-depth log factors for a step-lane strategy, cached on the strategy."""
    cached = strategy.params.get("_step_cache")
    if cached is not None and cached[0] >= n:
        return cached[1][:n], cached[2][:n], cached[3][:n]
    tbl = strategy.step_table
    logf1 = np.empty(n, dtype=np.float64)
    logf0 = np.empty(n, dtype=np.float64)
    selarr = np.empty(n, dtype=np.uint8)
    for d in range(n):
        g = tbl.gamble_at_depth(d)
        logf1[d] = _log_factor(g.at_one)
        logf0[d] = _log_factor(g.at_zero)
        selarr[d] = 1 if tbl.selected_at_depth(d) else 0
    strategy.params["_step_cache"] = (n, logf1, logf0, selarr)
    return logf1, logf0, selarr


def _state_walk_logs(strategy: Strategy, bits) -> np.ndarray:
    tbl = strategy.state_table
    out = np.empty(len(bits) + 1, dtype=np.float64)
    out[0] = 0.0
    acc = 0.0
    prev = START
    for k, x in enumerate(bits):
        g = tbl.gambles[(k & 1, prev)]
        acc += _log_factor(g(x))
        out[k + 1] = acc
        prev = x
    return out


def trajectory_logs(strategy: Strategy, omega) -> np.ndarray:
    """Log-capital trajectory via the fastest applicable lane."""
    bits = as_bits(omega)
    if strategy.step_table is not None:
        logf1, logf0, _ = _step_arrays(strategy, len(bits))
        return core.step_product_run(_np_bits(bits), logf1, logf0)
    if strategy.state_table is not None:
        return _state_walk_logs(strategy, bits)
    if strategy.kind == "mixture":
        member_logs = [trajectory_logs(m, bits) for m in strategy.members]
        lw = np.log(np.array([float(w) for w in strategy.weights]))
        stack = np.vstack(member_logs) + lw[:, None]
        colmax = stack.max(axis=0)
        with np.errstate(invalid="ignore"):
            mix = colmax + np.log(np.exp(stack - colmax[None, :]).sum(axis=0))
        return np.where(colmax > -math.inf, mix, -math.inf)
    if strategy.kind == "cap":
        inner = trajectory_logs(strategy.members[0], bits)
        log_alpha = math.log(float(strategy.params["alpha"]))
        out = inner.copy()
        hit = np.nonzero(inner >= log_alpha)[0]
        if hit.size:
            out[hit[0] :] = log_alpha
        return out
    if strategy.kind == "strictified":
        inner = trajectory_logs(strategy.members[0], bits)
        k = np.arange(len(inner), dtype=np.float64)
        return np.logaddexp(inner, -np.log(k + 1.0)) - math.log(2.0)
    if strategy.multiplier is not None:
        from .capital import run_multiplier

        return np.array(run_multiplier(strategy.multiplier, bits).log_capital)
    from .capital import run_process

    return np.array(run_process(strategy.process, bits).log_capital)


def trajectory(strategy: Strategy, omega) -> CapitalTrajectory:
    return CapitalTrajectory(tuple(float(v) for v in trajectory_logs(strategy, omega)))


def selected_counts(strategy: Strategy, omega) -> np.ndarray:
    """Cumulative selected-step counts (for growth pairing); zeros when the
    strategy has no selection structure."""
    bits = as_bits(omega)
    n = len(bits)
    out = np.zeros(n + 1, dtype=np.int64)
    tbl = strategy.table()
    if tbl is None:
        return out
    acc = 0
    prev = START
    for k in range(n):
        s = (
            tbl.selected[(k & 1, prev)]
            if strategy.state_table is not None
            else tbl.selected_at_depth(k)
        )
        acc += 1 if s else 0
        out[k + 1] = acc
        prev = bits[k]
    return out


# ---------------------------------------------------------------------------
# self-verification


def verify_strategy(strategy: Strategy, phi: ForecastingSystem, omega, tol=FLOAT_TOL):
    """Check the claimed supermartingale property on the audited prefix.

    State tables are checked once per state against the matching forecast
    (which covers every situation the strategy can meet); step tables once
    per depth; general strategies along the path.  Combinators are verified
    through their members: blending, capping and the shift-and-halve
    transform all preserve the supermartingale property.
    """
    if strategy.members is not None:
        for member in strategy.members:
            verify_strategy(member, phi, omega, tol)
        return
    if strategy.state_table is not None:
        pf = periodic_forecasts(phi)
        if pf is not None:
            for (par, _prev), g in strategy.state_table.gambles.items():
                ub = upper_ex(pf[par], g)
                slack = tol if isinstance(ub, float) else 0
                if ub > 1 + slack:
                    raise ValueError(
                        f"{strategy.name}: bet at parity {par} has upper "
                        f"expected growth {float(ub):.6g} > 1"
                    )
            return
    bits = as_bits(omega)
    if strategy.step_table is not None and phi.depth_fn is not None:
        for d in range(len(bits)):
            g = strategy.step_table.gamble_at_depth(d)
            ub = upper_ex(phi.at_depth(d), g)
            slack = tol if isinstance(ub, float) else 0
            if ub > 1 + slack:
                raise ValueError(
                    f"{strategy.name}: bet at depth {d} has upper "
                    f"expected growth {float(ub):.6g} > 1"
                )
        return
    if strategy.multiplier is not None:
        report = verify_multiplier_along(strategy.multiplier, phi, bits, tol)
    else:
        report = verify_supermartingale_along(strategy.capital_process(), phi, bits, tol)
    if not report.ok:
        v = report.violations[0]
        raise ValueError(
            f"{strategy.name}: supermartingale property fails at step {v.step} "
            f"(excess {v.excess:.6g})"
        )


# ---------------------------------------------------------------------------
# audit


@dataclass(frozen=True)
class StrategyResult:
    name: str
    params: dict
    final_log_capital: float
    max_log_capital: float
    selcount: int
    crossings: tuple  # CrossingReport-like dicts

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "final_log_capital": self.final_log_capital,
            "max_log_capital": self.max_log_capital,
            "crossings": list(self.crossings),
        }


@dataclass(frozen=True)
class AuditReport:
    path_meta: dict
    mode: str
    battery: tuple
    verdict: str
    witnesses: tuple
    threshold: float
    church: tuple = ()
    battery_version: str = BATTERY_VERSION

    @property
    def refuted(self) -> bool:
        return self.verdict == REFUTED

    def as_dict(self) -> dict:
        return {
            "path_meta": self.path_meta,
            "mode": self.mode,
            "battery": [r.as_dict() for r in self.battery],
            "verdict": self.verdict,
            "witnesses": list(self.witnesses),
            "threshold": self.threshold,
            "church": [c.as_dict() for c in self.church],
            "battery_version": self.battery_version,
        }


def _json_params(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if k.startswith("_"):
            continue
        out[k] = fmt_num(v) if isinstance(v, Fraction) else v
    return out


def tail_start_index(n: int, tail_window: float) -> int:
    return max(1, n - int(tail_window * n) + 1)


def audit(
    omega,
    phi: ForecastingSystem,
    battery: Sequence[Strategy],
    growth: Sequence[GrowthFunction] = None,
    threshold: float = DEFAULT_THRESHOLD,
    mode: str = "bounded",
    tail_window: float = 0.5,
    church_selections: Sequence = None,
    path_meta: dict = None,
    verify: bool = True,
) -> AuditReport:
    """Run the battery along the path and return the one-sided verdict.

    Every battery strategy must declare ``phi`` as its target; the claimed
    supermartingale property is verified before anything is run.  Bounded
    mode refutes when some max capital reaches ``threshold``; growth mode
    ("schnorr") refutes when some trajectory meets its paired growth function
    inside the final ``tail_window`` fraction of steps.  NOT-REFUTED is the
    absence of a refutation, nothing stronger.
    """
    if mode not in ("bounded", "schnorr"):
        raise ValueError(f"unknown audit mode {mode!r}")
    bits = as_bits(omega)
    n = len(bits)
    for st in battery:
        if st.target != phi:
            raise ValueError(
                f"strategy {st.name!r} targets {st.target.describe()}, "
                f"not the audited system {phi.describe()}"
            )
        if verify:
            verify_strategy(st, phi, bits)

    tail_start = tail_start_index(n, tail_window)
    log_threshold = math.log(threshold)
    results = []
    witnesses = []

    if mode == "bounded" and battery and all(
        st.state_table is not None for st in battery
    ):
        logf, sel, rates = compile_state_tables(battery)
        stats = core.state_battery_run(
            _np_bits(bits), logf, sel, None, math.inf, rates, tail_start
        )
        for j, st in enumerate(battery):
            results.append(
                StrategyResult(
                    name=st.name,
                    params=_json_params(st.params),
                    final_log_capital=float(stats.final_log[j]),
                    max_log_capital=float(stats.max_log[j]),
                    selcount=int(stats.selcount[j]),
                    crossings=(),
                )
            )
            if stats.max_log[j] >= log_threshold:
                witnesses.append(st.name)
    else:
        growth_list = _paired_growth(battery, growth, omega)
        for st, tau in zip(battery, growth_list):
            logs = trajectory_logs(st, bits)
            traj = CapitalTrajectory(tuple(float(v) for v in logs))
            crossings = ()
            refuted_here = False
            if mode == "bounded":
                refuted_here = traj.max_log >= log_threshold
            else:
                report = exceeds_growth(traj, tau, start=tail_start)
                crossings = (report.as_dict(),)
                refuted_here = report.crossed
            results.append(
                StrategyResult(
                    name=st.name,
                    params=_json_params(st.params),
                    final_log_capital=traj.final_log,
                    max_log_capital=traj.max_log,
                    selcount=int(selected_counts(st, bits)[-1]),
                    crossings=crossings,
                )
            )
            if refuted_here:
                witnesses.append(st.name)

    church = ()
    if church_selections:
        from .selections import church_verdict

        pf = periodic_forecasts(phi)
        if pf is not None and pf[0] == pf[1]:
            church = tuple(church_verdict(pf[0], bits, church_selections, tail_window))

    meta = {"length": n}
    if path_meta:
        meta.update(path_meta)
    meta["system"] = phi.describe()
    return AuditReport(
        path_meta=meta,
        mode=mode,
        battery=tuple(results),
        verdict=REFUTED if witnesses else NOT_REFUTED,
        witnesses=tuple(witnesses),
        threshold=threshold,
        church=church,
    )


def _paired_growth(battery, growth, omega):
    """Growth pairing: explicit list, or the per-strategy defaults."""
    if growth is not None:
        growth = list(growth)
        if len(growth) == 1:
            return growth * len(battery)
        if len(growth) != len(battery):
            raise ValueError("growth list must pair one function per strategy")
        return growth
    paired = []
    for st in battery:
        if st.growth_rate is not None and st.table() is not None:
            counts = selected_counts(st, omega)
            rate = float(st.growth_rate)
            paired.append(
                selection_growth(
                    rate, lambda k, c=counts: int(c[k] - c[k - 1]), label=st.name
                )
            )
        else:
            paired.append(affine_growth(1, 1))
    return paired


# ---------------------------------------------------------------------------
# mixture statistics (capped blends over a battery)


def mixture_stats(
    omega,
    battery: Sequence[Strategy],
    weights: Sequence = None,
    cap: float = None,
    verify: bool = False,
):
    """(max, final, first step reaching cap) of the blended capital, in logs.

    Uses the compiled kernel when the whole battery is state-table driven.
    """
    bits = as_bits(omega)
    if weights is None:
        raw = [Fraction(1, 2**k) for k in range(len(battery))]
        total = sum(raw)
        weights = [w / total for w in raw]
    lw = np.log(np.array([float(w) for w in weights]))
    log_threshold = math.log(cap) if cap is not None else math.inf
    if verify:
        for st in battery:
            verify_strategy(st, st.target, bits)
    if battery and all(st.state_table is not None for st in battery):
        logf, sel, rates = compile_state_tables(battery)
        stats = core.state_battery_run(
            _np_bits(bits), logf, sel, lw, log_threshold, None, 1
        )
        return stats.mix_max_log, stats.mix_final_log, stats.mix_first_reach
    stack = np.vstack([trajectory_logs(st, bits) for st in battery]) + lw[:, None]
    colmax = stack.max(axis=0)
    with np.errstate(invalid="ignore"):
        mix = colmax + np.log(np.exp(stack - colmax[None, :]).sum(axis=0))
    mix = np.where(colmax > -math.inf, mix, -math.inf)
    reach = np.nonzero(mix >= log_threshold)[0]
    return float(mix.max()), float(mix[-1]), int(reach[0]) if reach.size else -1


# ---------------------------------------------------------------------------
# selection summaries shared by church verdicts and the scan


@dataclass(frozen=True)
class SelectionSummary:
    name: str
    count: int
    final_frequency: Optional[float]
    tail_min: Optional[float]
    tail_max: Optional[float]


def selection_summaries(omega, selections, tail_window: float = 0.5):
    """Tail-window running-frequency summaries, one pass per selection."""
    bits = as_bits(omega)
    out = []
    for sel in selections:
        fn = sel.fn if isinstance(sel, SelectionProcess) else sel.as_process().fn
        freqs = []
        ones = count = 0
        prefix = []
        for x in bits:
            if fn(prefix):
                count += 1
                ones += x
                freqs.append(ones / count)
            prefix.append(x)
        if count == 0:
            out.append(SelectionSummary(sel.describe(), 0, None, None, None))
            continue
        start = count - max(1, math.ceil(tail_window * count))
        tail = freqs[start:]
        out.append(
            SelectionSummary(
                sel.describe(), count, freqs[-1], min(tail), max(tail)
            )
        )
    return out


# ---------------------------------------------------------------------------
# the filter scan


@dataclass(frozen=True)
class CellVerdict:
    lo: Fraction
    hi: Fraction
    verdict: str
    witness: Optional[str]
    inherited: bool
    max_log_capital: float

    def as_dict(self) -> dict:
        return {
            "lo": float(self.lo),
            "hi": float(self.hi),
            "verdict": self.verdict,
            "witness": self.witness,
        }


@dataclass(frozen=True)
class Anomaly:
    first: tuple
    second: tuple
    intersection: tuple

    def as_dict(self) -> dict:
        return {
            "kind": "FINITE-SAMPLE-ANOMALY",
            "first": [float(x) for x in self.first],
            "second": [float(x) for x in self.second],
            "intersection": [float(x) for x in self.intersection],
        }


@dataclass(frozen=True)
class EmpiricalFilter:
    grid: int
    cells: tuple
    freq_tail_min: float
    freq_tail_max: float
    grid_freq_hull: tuple  # frequency proxies at grid resolution
    hull: tuple  # intersection of the surviving cells
    anomalies: tuple
    increasing_ok: bool
    containment_ok: bool

    def cell(self, lo, hi) -> CellVerdict:
        lo, hi = Fraction(lo), Fraction(hi)
        for c in self.cells:
            if c.lo == lo and c.hi == hi:
                return c
        raise KeyError(f"no grid cell [{lo}, {hi}]")

    def survivors(self) -> list:
        return [c for c in self.cells if c.verdict == NOT_REFUTED]

    def as_dict(self) -> dict:
        return {
            "grid": self.grid,
            "cells": [c.as_dict() for c in self.cells],
            "hull": [float(self.hull[0]), float(self.hull[1])],
            "freq_tail": [self.freq_tail_min, self.freq_tail_max],
            "grid_freq_hull": [float(x) for x in self.grid_freq_hull],
            "anomalies": [a.as_dict() for a in self.anomalies],
        }


def _grid_round(x: float, grid: int) -> Fraction:
    return Fraction(round(x * grid), grid)


def filter_scan(
    omega,
    grid: int,
    battery_template: Callable[[IntervalForecast], list] = None,
    mode: str = "bounded",
    threshold: float = DEFAULT_THRESHOLD,
    tail_window: float = 0.5,
    verify: bool = True,
) -> EmpiricalFilter:
    """Audit every stationary grid interval and assemble the survivors.

    ``grid`` is the step denominator (one of 10, 20, 40, 100).  Refutations
    propagate downward to subintervals with the witness inherited, which
    makes survivor increasingness hold by construction; the intersection
    verdicts of overlapping survivors are then re-checked and any refuted
    intersection is reported as an anomaly.
    """
    if grid not in GRID_CHOICES:
        raise ValueError(f"grid must be one of {GRID_CHOICES}, got {grid}")
    if mode != "bounded":
        raise ValueError("the scan currently runs bounded-mode audits only")
    bits = as_bits(omega)
    n = len(bits)
    template = battery_template or scan_battery_template(grid)
    log_threshold = math.log(threshold)
    npbits = _np_bits(bits)

    raw_refuted = {}
    raw_witness = {}
    max_logs = {}
    verified_tables = set()
    for i in range(grid + 1):
        for j in range(i, grid + 1):
            interval = IntervalForecast(Fraction(i, grid), Fraction(j, grid))
            battery = template(interval)
            if not battery or any(st.state_table is None for st in battery):
                raise ValueError("scan batteries must be state-table driven")
            if verify:
                target = battery[0].target
                key = (interval.lower, interval.upper)
                if key not in verified_tables:
                    for st in battery:
                        verify_strategy(st, target, ())
                    verified_tables.add(key)
            logf, sel, rates = compile_state_tables(battery)
            stats = core.state_battery_run(npbits, logf, sel, None, math.inf, rates, 1)
            hit = np.nonzero(stats.max_log >= log_threshold)[0]
            raw_refuted[(i, j)] = bool(hit.size)
            raw_witness[(i, j)] = battery[int(hit[0])].name if hit.size else None
            max_logs[(i, j)] = float(stats.max_log.max())

    # downward closure: a refuted superset refutes the subset
    closed = {}
    witness = {}
    inherited = {}
    for i in range(grid + 1):
        for j in range(grid, i - 1, -1):
            ref, wit, inh = raw_refuted[(i, j)], raw_witness[(i, j)], False
            if not ref and i > 0 and closed.get((i - 1, j)):
                ref, wit, inh = True, witness[(i - 1, j)], True
            if not ref and j < grid and closed.get((i, j + 1)):
                ref, wit, inh = True, witness[(i, j + 1)], True
            closed[(i, j)], witness[(i, j)], inherited[(i, j)] = ref, wit, inh

    cells = tuple(
        CellVerdict(
            lo=Fraction(i, grid),
            hi=Fraction(j, grid),
            verdict=REFUTED if closed[(i, j)] else NOT_REFUTED,
            witness=witness[(i, j)],
            inherited=inherited[(i, j)],
            max_log_capital=max_logs[(i, j)],
        )
        for i in range(grid + 1)
        for j in range(i, grid + 1)
    )

    # frequency proxies over the tail window
    ones = np.cumsum(npbits, dtype=np.int64)
    steps = np.arange(1, n + 1, dtype=np.float64)
    running = ones / steps
    tail = running[max(0, n - max(1, int(tail_window * n))) :]
    f_min, f_max = (float(tail.min()), float(tail.max())) if n else (0.0, 1.0)
    grid_hull = (_grid_round(f_min, grid), _grid_round(f_max, grid))

    survivors = [c for c in cells if c.verdict == NOT_REFUTED]
    hull = (
        max(c.lo for c in survivors),
        min(c.hi for c in survivors),
    )
    containment_ok = all(
        c.lo <= grid_hull[0] and grid_hull[1] <= c.hi for c in survivors
    ) and hull[0] <= hull[1]

    by_key = {(c.lo, c.hi): c for c in cells}
    anomalies = []
    for a in range(len(survivors)):
        for b in range(a + 1, len(survivors)):
            one, two = survivors[a], survivors[b]
            lo, hi = max(one.lo, two.lo), min(one.hi, two.hi)
            if lo > hi:
                continue
            meet = by_key[(lo, hi)]
            if meet.verdict == REFUTED:
                anomalies.append(
                    Anomaly((one.lo, one.hi), (two.lo, two.hi), (lo, hi))
                )

    # increasingness: one-step supersets of survivors must survive
    increasing_ok = True
    for c in survivors:
        i, j = int(c.lo * grid), int(c.hi * grid)
        if i > 0 and by_key[(c.lo - Fraction(1, grid), c.hi)].verdict == REFUTED:
            increasing_ok = False
        if j < grid and by_key[(c.lo, c.hi + Fraction(1, grid))].verdict == REFUTED:
            increasing_ok = False

    return EmpiricalFilter(
        grid=grid,
        cells=cells,
        freq_tail_min=f_min,
        freq_tail_max=f_max,
        grid_freq_hull=grid_hull,
        hull=hull,
        anomalies=tuple(anomalies),
        increasing_ok=increasing_ok,
        containment_ok=containment_ok,
    )
