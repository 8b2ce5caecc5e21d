"""Reality: seeded path sampling and external bitstream ingestion.

Sampling uses splitmix64 so identical seeds give identical streams on every
platform: state advances by the golden-gamma constant, the output mixes with
two 64-bit multiply-xorshift rounds, and a uniform draw takes the top 53 bits
over 2^53.  A step emits 1 iff the uniform draw is strictly below the chosen
probability, which pins the degenerate cases p=0 and p=1.

The Reality policy picks the per-step sampling probability from inside the
current interval forecast; containment is asserted during sampling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .localmodels import IntervalForecast, Number
from .systems import ForecastingSystem, as_bits

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


class ParseError(ValueError):
    """Malformed external bitstream; carries the offending offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class SplitMix64:
    """The documented 64-bit stream; uniform draws are the top 53 bits / 2^53."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * MIX1) & MASK64
        z = ((z ^ (z >> 27)) * MIX2) & MASK64
        return z ^ (z >> 31)

    def next_unit(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53


def _mix_array(states: np.ndarray) -> np.ndarray:
    z = states.copy()
    with np.errstate(over="ignore"):
        z ^= z >> np.uint64(30)
        z *= np.uint64(MIX1)
        z ^= z >> np.uint64(27)
        z *= np.uint64(MIX2)
        z ^= z >> np.uint64(31)
    return z


def _u53_stream(seed: int, n: int) -> np.ndarray:
    """The first n uniform draws as 53-bit integers, vectorised."""
    with np.errstate(over="ignore"):
        states = np.uint64(seed & MASK64) + np.uint64(GAMMA) * np.arange(
            1, n + 1, dtype=np.uint64
        )
    return _mix_array(states) >> np.uint64(11)


POLICY_KINDS = (
    "precise-as-given",
    "lower-endpoint",
    "upper-endpoint",
    "midpoint",
    "oscillate-extremes",
    "fixed-sequence",
)


@dataclass(frozen=True)
class RealityPolicy:
    """Rule choosing the sampling probability inside the forecast interval."""

    kind: str
    probs: Optional[tuple] = None  # fixed-sequence only; cycled

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown reality policy {self.kind!r}")
        if self.kind == "fixed-sequence" and not self.probs:
            raise ValueError("fixed-sequence policy needs a probability sequence")

    def pick(self, forecast: IntervalForecast, depth: int) -> Number:
        if self.kind == "precise-as-given":
            if not forecast.is_precise:
                raise ValueError(
                    f"precise-as-given policy met interval forecast "
                    f"[{forecast.lower}, {forecast.upper}] at depth {depth}"
                )
            return forecast.lower
        if self.kind == "lower-endpoint":
            return forecast.lower
        if self.kind == "upper-endpoint":
            return forecast.upper
        if self.kind == "midpoint":
            return forecast.midpoint
        if self.kind == "oscillate-extremes":
            return forecast.lower if depth % 2 == 0 else forecast.upper
        p = self.probs[depth % len(self.probs)]
        if p not in forecast:
            raise ValueError(
                f"fixed-sequence probability {p} escapes the forecast "
                f"[{forecast.lower}, {forecast.upper}] at depth {depth}"
            )
        return p


def policy(kind: str, probs: Sequence[Number] = None) -> RealityPolicy:
    return RealityPolicy(kind, tuple(probs) if probs is not None else None)


def _dyadic_threshold(p: Number) -> Optional[int]:
    """p * 2^53 as an exact integer when p is dyadic with <= 53 fraction bits."""
    f = p if isinstance(p, Fraction) else None
    if isinstance(p, int):
        f = Fraction(p)
    if isinstance(p, float):
        f = Fraction(p)  # exact binary value
    if f is None:
        return None
    t = f * (1 << 53)
    return int(t) if t.denominator == 1 and 0 <= t <= (1 << 53) else None


def sample_path(
    phi: ForecastingSystem,
    reality: RealityPolicy,
    n: int,
    seed: int,
) -> tuple:
    """n outcomes drawn per-step from phi under the policy; pure in its args.

    A bit is 1 iff the uniform draw is < the picked probability.  Stationary
    precise dyadic targets go through the vectorised stream; the scalar loop
    is the reference for everything else and matches it bit for bit.
    """
    if n < 0:
        raise ValueError("length must be non-negative")

    # vector fast path: constant dyadic probability
    if phi.depth_fn is not None:
        f0, f1 = phi.at_depth(0), phi.at_depth(1)
        if f0 == f1 and (f0.is_precise or reality.kind != "precise-as-given"):
            p = reality.pick(f0, 0)
            if reality.kind != "oscillate-extremes" and reality.kind != "fixed-sequence":
                thr = _dyadic_threshold(p)
                if thr is not None:
                    draws = _u53_stream(seed, n)
                    return tuple(int(b) for b in (draws < np.uint64(thr)).astype(np.uint8))

    rng = SplitMix64(seed)
    bits = []
    buf: list = []
    depth_only = phi.depth_fn is not None
    for k in range(n):
        forecast = phi.at_depth(k) if depth_only else phi(tuple(buf))
        p = reality.pick(forecast, k)
        u = rng.next_unit()
        x = 1 if u < p else 0
        bits.append(x)
        if not depth_only:
            buf.append(x)
    return tuple(bits)


def ingest_bits(
    source: Union[str, Path, bytes],
    format: str = "ascii01",
    length: Optional[int] = None,
) -> tuple:
    """Bit sequence from a file path or raw bytes.

    ascii01: characters '0'/'1' with an optional trailing newline; anything
    else is a ParseError with its offset.  packed-bits: MSB-first bytes; an
    explicit length may trim padding, and a length past the data is an error.
    """
    if isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    else:
        data = bytes(source)

    if format == "ascii01":
        end = len(data)
        while end > 0 and data[end - 1 : end] in (b"\n", b"\r"):
            end -= 1
        out = []
        for i in range(end):
            c = data[i : i + 1]
            if c == b"0":
                out.append(0)
            elif c == b"1":
                out.append(1)
            else:
                raise ParseError(f"illegal character {c!r}", i)
        return tuple(out)

    if format == "packed-bits":
        total = 8 * len(data)
        want = total if length is None else length
        if want > total:
            raise ParseError(
                f"requested {want} bits but data holds only {total} (truncated byte)",
                len(data),
            )
        out = []
        for i in range(want):
            byte = data[i >> 3]
            out.append((byte >> (7 - (i & 7))) & 1)
        return tuple(out)

    raise ValueError(f"unknown bitstream format {format!r}")


def write_bits_ascii(bits, destination: Union[str, Path]) -> None:
    Path(destination).write_text("".join("1" if b else "0" for b in as_bits(bits)) + "\n")
