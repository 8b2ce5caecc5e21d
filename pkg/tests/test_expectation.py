from fractions import Fraction as F

import pytest

from imprand import stationary, precise, vacuous
from imprand.expectation import (
    HorizonGamble,
    lower_expectation_fh,
    lower_probability_fh,
    upper_expectation_fh,
    upper_probability_fh,
)
from imprand.systems import ResourceLimitError, table

from conftest import rand_fraction, rand_interval
from oracles import enumeration_expectation, extreme_systems_upper


def test_horizon_gamble_construction():
    g = HorizonGamble.ones_count(2)
    assert g.value("00") == 0 and g.value("11") == 2 and g.value("10") == 1
    with pytest.raises(ResourceLimitError):
        HorizonGamble.ones_count(21)
    with pytest.raises(ValueError):
        HorizonGamble(2, (1, 2, 3))


def test_first_bit_indicator():
    g = HorizonGamble.indicator(1, ["1"])
    assert upper_expectation_fh(vacuous(), g) == 1
    assert lower_expectation_fh(vacuous(), g) == 0
    assert upper_expectation_fh(stationary((F(1, 5), F(3, 5))), g) == F(3, 5)
    assert lower_expectation_fh(stationary((F(1, 5), F(3, 5))), g) == F(1, 5)


def test_fair_coin_ones_count():
    g = HorizonGamble.ones_count(2)
    phi = precise(F(1, 2))
    assert upper_expectation_fh(phi, g) == 1
    assert lower_expectation_fh(phi, g) == 1
    oracle = enumeration_expectation(lambda s: F(1, 2), g)
    assert oracle == 1


def test_constant_gamble():
    g = HorizonGamble.from_function(3, lambda bits: F(5, 7))
    assert upper_expectation_fh(vacuous(), g) == F(5, 7)
    assert lower_expectation_fh(vacuous(), g) == F(5, 7)


def test_probabilities():
    phi = vacuous()
    full = ["".join(map(str, bits)) for bits in __import__("itertools").product((0, 1), repeat=2)]
    assert upper_probability_fh(phi, 2, full) == 1
    assert lower_probability_fh(phi, 2, full) == 1
    assert upper_probability_fh(phi, 2, []) == 0
    assert upper_probability_fh(phi, 2, ["01"]) == 1
    assert lower_probability_fh(phi, 2, ["01"]) == 0


def test_enumeration_oracle_precise_rational(rng):
    # precise systems: upper = lower = the product-measure sum, exactly
    for _ in range(25):
        depth_probs = [rand_fraction(rng, den=8) for _ in range(10)]
        phi_fn = lambda s: depth_probs[len(s)]
        from imprand.systems import from_callable
        from imprand.localmodels import IntervalForecast

        phi = from_callable(
            lambda s: IntervalForecast.precise(depth_probs[len(s)]),
            params=("depth-probs",),
            depth_fn=lambda d: IntervalForecast.precise(depth_probs[d]),
        )
        n = rng.randint(1, 6)
        g = HorizonGamble.from_function(
            n, lambda bits: F(rng.randint(-16, 16), rng.randint(1, 8))
        )
        oracle = enumeration_expectation(phi_fn, g)
        assert upper_expectation_fh(phi, g) == oracle
        assert lower_expectation_fh(phi, g) == oracle


def test_extreme_selection_oracle_interval(rng):
    # interval systems, tiny horizons: backward induction equals the max over
    # every endpoint-selection of the situations
    for _ in range(10):
        entries = {}
        from itertools import product

        n = rng.randint(1, 3)
        for d in range(n):
            for bits in product((0, 1), repeat=d):
                entries[bits] = rand_interval(rng, den=8)
        phi = table(entries)
        g = HorizonGamble.from_function(
            n, lambda bits: F(rng.randint(-8, 8), rng.randint(1, 4))
        )
        oracle = extreme_systems_upper(lambda s: entries[s], g)
        assert upper_expectation_fh(phi, g) == oracle


def neg(g):
    return HorizonGamble(g.horizon, tuple(-p for p in g.payoffs))


def test_global_coherence_properties(rng):
    # E1-E5 hold exactly in rational mode
    from itertools import product

    for _ in range(60):
        n = rng.randint(1, 5)
        entries = {}
        for d in range(n):
            for bits in product((0, 1), repeat=d):
                entries[bits] = rand_interval(rng, den=8)
        phi = table(entries)
        rand_payoff = lambda bits: F(rng.randint(-12, 12), rng.randint(1, 4))
        f = HorizonGamble.from_function(n, rand_payoff)
        g = HorizonGamble.from_function(n, rand_payoff)
        lam = F(rng.randint(0, 8), rng.randint(1, 4))
        mu = F(rng.randint(-8, 8), rng.randint(1, 4))

        up_f, lo_f = upper_expectation_fh(phi, f), lower_expectation_fh(phi, f)
        up_g, lo_g = upper_expectation_fh(phi, g), lower_expectation_fh(phi, g)

        # E1 bounds
        assert min(f.payoffs) <= lo_f <= up_f <= max(f.payoffs)
        # E2 non-negative homogeneity
        scaled = HorizonGamble(n, tuple(lam * p for p in f.payoffs))
        assert upper_expectation_fh(phi, scaled) == lam * up_f
        assert lower_expectation_fh(phi, scaled) == lam * lo_f
        # E3 the sub/superadditivity sandwich
        fg = HorizonGamble(n, tuple(a + b for a, b in zip(f.payoffs, g.payoffs)))
        up_fg, lo_fg = upper_expectation_fh(phi, fg), lower_expectation_fh(phi, fg)
        assert lo_f + lo_g <= lo_fg <= lo_f + up_g <= up_fg <= up_f + up_g
        # E4 constant additivity
        shifted = HorizonGamble(n, tuple(p + mu for p in f.payoffs))
        assert upper_expectation_fh(phi, shifted) == up_f + mu
        assert lower_expectation_fh(phi, shifted) == lo_f + mu
        # E5 monotonicity
        if all(a <= b for a, b in zip(f.payoffs, g.payoffs)):
            assert up_f <= up_g and lo_f <= lo_g
        # conjugacy
        assert upper_expectation_fh(phi, neg(f)) == -lo_f


def test_monotone_in_conservativeness(rng):
    for _ in range(20):
        lo, hi = rand_interval(rng, den=8)
        wide_lo = lo * F(1, 2)
        wide_hi = hi + (1 - hi) * F(1, 2)
        narrow, wide = stationary((lo, hi)), stationary((wide_lo, wide_hi))
        n = rng.randint(1, 5)
        g = HorizonGamble.from_function(
            n, lambda bits: F(rng.randint(-10, 10), rng.randint(1, 4))
        )
        assert upper_expectation_fh(narrow, g) <= upper_expectation_fh(wide, g)
        assert lower_expectation_fh(narrow, g) >= lower_expectation_fh(wide, g)
