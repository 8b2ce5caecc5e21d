import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def rand_fraction(rng, lo=0, hi=1, den=64):
    """Uniform-ish rational in [lo, hi] with denominator up to ``den``."""
    d = rng.randint(1, den)
    n = rng.randint(0, d)
    return Fraction(lo) + (Fraction(hi) - Fraction(lo)) * Fraction(n, d)


def rand_interval(rng, den=64):
    a, b = rand_fraction(rng, den=den), rand_fraction(rng, den=den)
    return (a, b) if a <= b else (b, a)
