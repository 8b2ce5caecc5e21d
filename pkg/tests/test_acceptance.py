"""Acceptance suite: one test per criterion, tolerances pinned, runtimes enforced.

Each test prints one line:  ACCEPTANCE <n> <name>: PASS (<elapsed>, budget <...>).
Statistical criteria run on seed sets frozen below.
"""

import math
import random
import time
from fractions import Fraction as F
from itertools import product

import pytest

import imprand as ir
from imprand import audit as am
from imprand import pathsim as ps
from imprand.capital import run_multiplier
from imprand.expectation import (
    HorizonGamble,
    lower_expectation_fh,
    upper_expectation_fh,
)
from imprand.lawfulness import LawAlgorithm, check_lawful_for
from imprand.localmodels import IntervalForecast, LocalGamble, ex_precise, lower_ex, upper_ex
from imprand.selections import from_time_function, parity, selected_frequency
from imprand.strategies import (
    calibration_certified_floor,
    calibration_supermartingale,
    divergence_pair,
    hellinger_gamble,
    hellinger_product_bound,
    lambda_count,
    rival_exploit_multipliers,
)
from imprand.systems import from_callable

from oracles import enumeration_expectation

# frozen seed sets
C1_SEEDS = tuple(range(1000, 1100))
C5_SEEDS = tuple(range(50_000, 51_000))
C6_SEED = 202
C7_SEED = 12
C9_FAIR_SEED = 777

REL = 1e-9


def _finish(num, name, budget, t0):
    elapsed = time.perf_counter() - t0
    assert elapsed < budget, f"criterion {num} blew its {budget}s budget: {elapsed:.2f}s"
    print(f"\nACCEPTANCE {num} {name}: PASS ({elapsed:.2f}s, budget {budget}s)")


# --------------------------------------------------------------------------
# 1. deterministic product bound of the matched divergence pair


def test_c1_divergence_product_bound():
    t0 = time.perf_counter()
    n = 5000
    target = ir.precise(F(1, 2))
    pair_target, pair_ref = divergence_pair(target, ir.near_half(), parity("odd"))
    log_bound = math.log((2 * n + 32) / 32)

    paths = [
        ps.sample_path(target, ps.policy("precise-as-given"), 2 * n, seed)
        for seed in C1_SEEDS
    ]
    paths.append(ps.sample_path(ir.vacuous(), ps.policy("oscillate-extremes"), 2 * n, 0))
    assert paths[-1] == (0, 1) * n  # the adversarial endpoint-oscillation path

    for bits in paths:
        lt = am.trajectory_logs(pair_target, bits)
        lr = am.trajectory_logs(pair_ref, bits)
        assert lt[-1] + lr[-1] >= log_bound * (1 - REL)
    _finish(1, "divergence product bound", 2.0, t0)


# --------------------------------------------------------------------------
# 2. divergence-gamble identities


def test_c2_hellinger_identities():
    t0 = time.perf_counter()
    rng = ps.SplitMix64(2)
    for _ in range(10_000):
        a = 0.01 + 0.98 * rng.next_unit()
        b = 0.01 + 0.98 * rng.next_unit()
        g = hellinger_gamble(a, b)
        h = hellinger_gamble(b, a)
        assert abs(ex_precise(a, g) - 1.0) <= 1e-12
        bound = hellinger_product_bound(a, b)
        assert g.at_one * h.at_one - bound >= -1e-12
        assert g.at_zero * h.at_zero - bound >= -1e-12
    _finish(2, "hellinger identities", 1.0, t0)


# --------------------------------------------------------------------------
# 3. the calibration capital floor


def test_c3_calibration_floor():
    t0 = time.perf_counter()
    rng = random.Random(0xACC3)
    triggers = 0
    for _ in range(1000):
        bound = F(rng.randint(4, 16), 4)  # rational in [1, 4]
        eps = bound * F(rng.randint(1, 19), 20)  # rational in (0, bound)
        v = bound * F(rng.randint(0, 20), 20)  # payoff variation <= bound
        h1 = F(rng.randint(-8, 8), 4)
        h = LocalGamble(h1, h1 - v if rng.random() < 0.5 else h1 + v)
        n = rng.randint(1, 200)
        ivs = []
        for _ in range(n):
            a, b = F(rng.randint(0, 16), 16), F(rng.randint(0, 16), 16)
            ivs.append(IntervalForecast(min(a, b), max(a, b)))
        phi = from_callable(
            lambda s, ivs=ivs: ivs[len(s)],
            params=("random-depth-forecasts",),
            depth_fn=lambda d, ivs=ivs: ivs[d],
        )
        selbits = [rng.randint(0, 1) for _ in range(n)]
        sel = from_time_function(lambda k, sb=selbits: sb[k - 1], name="rand").as_process()
        strategy = calibration_supermartingale(phi, h, sel, eps, bound)
        low_bit = 1 if h.at_one <= h.at_zero else 0
        adversarial = rng.random() < 0.5
        bits = tuple(
            low_bit if adversarial else rng.randint(0, 1) for _ in range(n)
        )
        traj = run_multiplier(strategy.multiplier, bits)
        total, count = F(0), 0
        for k, x in enumerate(bits):
            if selbits[k]:
                count += 1
                total += h(x) - lower_ex(ivs[k], h)
            if count and F(total, count) <= -eps:
                triggers += 1
                floor = calibration_certified_floor(eps, bound, count)
                assert traj.log_capital[k + 1] >= floor * (1 - REL) - 1e-12
    assert triggers >= 1000, "the randomized harness must actually trigger the bound"
    _finish(3, f"calibration floor ({triggers} triggers)", 5.0, t0)


# --------------------------------------------------------------------------
# 4. coherence, global properties, enumeration oracle -- all exact


def _rand_interval(rng, den=16):
    a, b = F(rng.randint(0, den), den), F(rng.randint(0, den), den)
    return IntervalForecast(min(a, b), max(a, b))


def _rand_payoff(rng):
    return F(rng.randint(-24, 24), rng.randint(1, 6))


def test_c4_coherence_exact():
    t0 = time.perf_counter()
    rng = random.Random(0xC4)

    # local coherence, 1000 randomized exact cases
    for _ in range(1000):
        I = _rand_interval(rng)
        f = LocalGamble(_rand_payoff(rng), _rand_payoff(rng))
        g = LocalGamble(_rand_payoff(rng), _rand_payoff(rng))
        lam = F(rng.randint(0, 12), rng.randint(1, 4))
        mu = _rand_payoff(rng)
        assert f.min() <= lower_ex(I, f) <= upper_ex(I, f) <= f.max()
        assert lower_ex(I, f.scaled(lam)) == lam * lower_ex(I, f)
        assert upper_ex(I, f.scaled(lam)) == lam * upper_ex(I, f)
        assert lower_ex(I, f + g) >= lower_ex(I, f) + lower_ex(I, g)
        assert upper_ex(I, f + g) <= upper_ex(I, f) + upper_ex(I, g)
        assert lower_ex(I, f + mu) == lower_ex(I, f) + mu
        assert upper_ex(I, f + mu) == upper_ex(I, f) + mu
        if f.at_one <= g.at_one and f.at_zero <= g.at_zero:
            assert lower_ex(I, f) <= lower_ex(I, g)
            assert upper_ex(I, f) <= upper_ex(I, g)
        assert upper_ex(I, f) == -lower_ex(I, -f)

    # global properties, 1000 randomized exact cases at horizons <= 8
    for _ in range(1000):
        n = rng.randint(1, 8)
        entries = {
            bits: _rand_interval(rng, den=8)
            for d in range(n)
            for bits in product((0, 1), repeat=d)
        }
        phi = ir.table(entries)
        f = HorizonGamble.from_function(n, lambda bits: _rand_payoff(rng))
        g = HorizonGamble.from_function(n, lambda bits: _rand_payoff(rng))
        lam = F(rng.randint(0, 8), rng.randint(1, 4))
        mu = _rand_payoff(rng)
        up_f, lo_f = upper_expectation_fh(phi, f), lower_expectation_fh(phi, f)
        up_g, lo_g = upper_expectation_fh(phi, g), lower_expectation_fh(phi, g)
        assert min(f.payoffs) <= lo_f <= up_f <= max(f.payoffs)
        scaled = HorizonGamble(n, tuple(lam * p for p in f.payoffs))
        assert upper_expectation_fh(phi, scaled) == lam * up_f
        assert lower_expectation_fh(phi, scaled) == lam * lo_f
        fg = HorizonGamble(n, tuple(a + b for a, b in zip(f.payoffs, g.payoffs)))
        up_fg, lo_fg = upper_expectation_fh(phi, fg), lower_expectation_fh(phi, fg)
        assert lo_f + lo_g <= lo_fg <= lo_f + up_g <= up_fg <= up_f + up_g
        shifted = HorizonGamble(n, tuple(p + mu for p in f.payoffs))
        assert upper_expectation_fh(phi, shifted) == up_f + mu
        assert lower_expectation_fh(phi, shifted) == lo_f + mu
        if all(a <= b for a, b in zip(f.payoffs, g.payoffs)):
            assert up_f <= up_g and lo_f <= lo_g

    # enumeration-oracle equality for precise rational systems, horizon <= 10
    for trial in range(25):
        n = rng.randint(1, 10) if trial else 10
        depth_probs = [F(rng.randint(0, 8), 8) for _ in range(n)]
        phi = from_callable(
            lambda s, dp=depth_probs: IntervalForecast.precise(dp[len(s)]),
            params=("precise-depth",),
            depth_fn=lambda d, dp=depth_probs: IntervalForecast.precise(dp[d]),
        )
        g = HorizonGamble.from_function(n, lambda bits: _rand_payoff(rng))
        oracle = enumeration_expectation(lambda s, dp=depth_probs: dp[len(s)], g)
        assert upper_expectation_fh(phi, g) == oracle
        assert lower_expectation_fh(phi, g) == oracle
    _finish(4, "coherence and global properties", 10.0, t0)


# --------------------------------------------------------------------------
# 5. calibration of the capped default-battery mixture (1000 frozen seeds)


def test_c5_ville_calibration():
    t0 = time.perf_counter()
    phi = ir.precise(F(1, 2))
    battery = am.default_battery(phi)
    for st in battery:
        am.verify_strategy(st, phi, ())
    cap = 50.0
    reached = 0
    for seed in C5_SEEDS:
        bits = ps.sample_path(phi, ps.policy("precise-as-given"), 10_000, seed)
        _, _, first = am.mixture_stats(bits, battery, cap=cap)
        if first >= 0:
            reached += 1
    fraction = reached / len(C5_SEEDS)
    limit = 1 / 50 + 3 * math.sqrt(0.02 * 0.98 / 1000)
    assert fraction <= limit, f"{fraction} > {limit}"
    _finish(5, f"ville calibration (fraction {fraction:.4f} <= {limit:.4f})", 30.0, t0)


# --------------------------------------------------------------------------
# 6. the oscillating-forecast phenomenon and its filter scan


@pytest.fixture(scope="module")
def alternating_scan():
    t0 = time.perf_counter()
    phi = ir.alternating(F(3, 10), F(7, 10))
    bits = ps.sample_path(phi, ps.policy("precise-as-given"), 100_000, C6_SEED)
    scan = am.filter_scan(bits, 20)
    return bits, scan, time.perf_counter() - t0


@pytest.fixture(scope="module")
def periodic_scan():
    return am.filter_scan((0, 1) * 10_000, 20)


@pytest.fixture(scope="module")
def fair_scan():
    bits = ps.sample_path(
        ir.precise(F(1, 2)), ps.policy("precise-as-given"), 100_000, C9_FAIR_SEED
    )
    return am.filter_scan(bits, 20)


def test_c6_alternating_phenomenon(alternating_scan):
    bits, scan, build_seconds = alternating_scan
    t0 = time.perf_counter() - build_seconds  # charge the sampling and scan here

    count, freq = selected_frequency(parity("odd"), bits)
    assert count == 50_000
    assert abs(freq - F(3, 10)) <= F(15, 1000)
    count, freq = selected_frequency(parity("even"), bits)
    assert abs(freq - F(7, 10)) <= F(15, 1000)
    assert abs(F(sum(bits), len(bits)) - F(1, 2)) <= F(1, 100)

    assert scan.cell(F(3, 10), F(7, 10)).verdict == am.NOT_REFUTED
    for cell in scan.cells:
        if cell.lo >= F(7, 20) or cell.hi <= F(13, 20):
            assert cell.verdict == am.REFUTED, (cell.lo, cell.hi)
    _finish(6, "alternating forecasts need the full interval", 60.0, t0)


# --------------------------------------------------------------------------
# 7. desk-scale dilution: the rival is refuted, the host interval is not


def test_c7_explain_away():
    t0 = time.perf_counter()
    host = (F(1, 5), F(4, 5))
    rival = ir.stationary((F(9, 20), F(11, 20)))
    ea = ir.explain_away(host, [rival])
    rival_side, host_side = rival_exploit_multipliers(ea, 0)

    n = 2**14
    bits = ps.sample_path(ea, ps.policy("precise-as-given"), n, C7_SEED)

    log_rival = am.trajectory_logs(rival_side, bits)
    log_host = am.trajectory_logs(host_side, bits)
    log_delta = math.log(float(rival_side.params["delta"]))
    log_bound = float(max(log_host))  # observed companion max
    for v in range(n + 1):
        floor = lambda_count(0, v) * log_delta - log_bound
        assert log_rival[v] >= floor - max(REL * abs(floor), 1e-9)

    report = am.audit(bits, rival, [rival_side] + am.default_battery(rival))
    assert report.verdict == am.REFUTED
    assert "rival-exploit m=0 side=rival" in report.witnesses

    host_sys = ir.stationary(host)
    report = am.audit(bits, host_sys, am.default_battery(host_sys))
    assert report.verdict == am.NOT_REFUTED
    _finish(7, "dilution: rival refuted, host interval survives", 30.0, t0)


# --------------------------------------------------------------------------
# 8. restriction-law checks in exact integer arithmetic


def test_c8_lawfulness():
    t0 = time.perf_counter()
    alg = LawAlgorithm(2, 2)
    report = check_lawful_for((0,) * 4000, alg, 1000)
    assert report.ok and report.m_checked == 1000
    report = check_lawful_for((1,) * 4000, alg, 1000)
    assert not report.ok
    assert report.failure.m == 0 and report.failure.condition == "iv"
    _finish(8, "lawfulness checks", 1.0, t0)


# --------------------------------------------------------------------------
# 9. filter structure on every scan in the corpus


def test_c9_filter_structure(alternating_scan, periodic_scan, fair_scan):
    t0 = time.perf_counter()
    corpus = {
        "alternating": alternating_scan[1],
        "periodic": periodic_scan,
        "fair": fair_scan,
    }  # every filter_scan output produced by this suite
    by = {}
    for name, scan in corpus.items():
        survivors = scan.survivors()
        assert survivors, name
        lookup = {(c.lo, c.hi): c for c in scan.cells}
        # increasingness, exactly: every superset of a survivor survives
        for c in survivors:
            for lo, hi in ((c.lo - F(1, 20), c.hi), (c.lo, c.hi + F(1, 20))):
                if 0 <= lo and hi <= 1:
                    assert lookup[(lo, hi)].verdict == am.NOT_REFUTED, (name, lo, hi)
        assert scan.increasing_ok
        # frequency-hull containment, exactly, at grid resolution
        lo_hull, hi_hull = scan.grid_freq_hull
        for c in survivors:
            assert c.lo <= lo_hull and hi_hull <= c.hi, (name, c.lo, c.hi)
        assert scan.containment_ok
        # survivors intersect: the minimal hull is a genuine interval
        assert scan.hull[0] <= scan.hull[1]
        assert not scan.anomalies
        by[name] = len(survivors)

    # documented endpoints of the corpus scans
    assert periodic_scan.survivors() == [periodic_scan.cell(0, 1)]
    assert fair_scan.hull == (F(1, 2), F(1, 2))
    for c in fair_scan.cells:
        if c.lo <= F(49, 100) and c.hi >= F(51, 100):
            assert c.verdict == am.NOT_REFUTED
    _finish(9, f"filter structure (survivors {by})", 120.0, t0)
