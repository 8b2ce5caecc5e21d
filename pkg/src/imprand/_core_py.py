"""Numpy implementation of the hot kernels; the import-time fallback.

Semantics match imprand._core exactly (same state encoding, same outputs);
the compiled twin only changes the constant factor.  State encoding per step
k with outcome bit x:

    parity   = k & 1
    prevcode = bits[k-1] for k > 0, else 2 (the start marker)
    bet index      = parity * 6 + prevcode * 2 + x     (12 cells)
    selection index = parity * 3 + prevcode            (6 cells)
"""

from __future__ import annotations

import math

import numpy as np

from ._stats import BatteryStats

BACKEND = "numpy"


def _codes(bits: np.ndarray):
    n = bits.shape[0]
    parity = np.arange(n, dtype=np.int64) & 1
    prev = np.empty(n, dtype=np.int64)
    if n:
        prev[0] = 2
        prev[1:] = bits[:-1]
    return parity * 6 + prev * 2 + bits, parity * 3 + prev


def step_product_run(bits: np.ndarray, logf1: np.ndarray, logf0: np.ndarray) -> np.ndarray:
    """Log-capital trajectory of a per-step bet: cumulative realised log factors."""
    n = bits.shape[0]
    out = np.empty(n + 1, dtype=np.float64)
    out[0] = 0.0
    if n:
        picked = np.where(bits.astype(bool), logf1[:n], logf0[:n])
        np.cumsum(picked, out=out[1:])
    return out


def state_battery_run(
    bits: np.ndarray,
    logf: np.ndarray,
    sel: np.ndarray,
    logw=None,
    log_threshold: float = math.inf,
    growth_c=None,
    tail_start: int = 1,
) -> BatteryStats:
    """Run K state-table bets along one path and gather their statistics.

    bits  uint8[n]; logf float64[K,12] log bet factors; sel uint8[K,6]
    selection flags; logw float64[K] log mixture weights or None;
    growth_c float64[K] selection-driven growth rates or None.
    """
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    logf = np.ascontiguousarray(logf, dtype=np.float64)
    sel = np.ascontiguousarray(sel, dtype=np.uint8)
    n = bits.shape[0]
    K = logf.shape[0]
    code, selcode = _codes(bits.astype(np.int64))

    L = np.empty((K, n + 1), dtype=np.float64)
    L[:, 0] = 0.0
    counts = np.zeros((K, n + 1), dtype=np.int64)
    for j in range(K):
        np.cumsum(logf[j, code], out=L[j, 1:])
        np.cumsum(sel[j, selcode], out=counts[j, 1:])

    final_log = L[:, -1].copy()
    max_log = L.max(axis=1)
    selcount = counts[:, -1].copy()

    cross_count = np.zeros(K, dtype=np.int64)
    last_cross = np.full(K, -1, dtype=np.int64)
    max_excess = np.full(K, -math.inf, dtype=np.float64)
    if growth_c is not None:
        growth_c = np.asarray(growth_c, dtype=np.float64)
        lo = max(1, tail_start)
        if lo <= n:
            window = L[:, lo:] - growth_c[:, None] * counts[:, lo:]
            hits = window >= 0.0
            cross_count = hits.sum(axis=1).astype(np.int64)
            max_excess = window.max(axis=1)
            rev = hits[:, ::-1].argmax(axis=1)
            has = hits.any(axis=1)
            last_cross = np.where(has, n - rev, -1).astype(np.int64)

    mix_max_log = -math.inf
    mix_first_reach = -1
    mix_final_log = -math.inf
    if logw is not None:
        logw = np.asarray(logw, dtype=np.float64)
        M = L + logw[:, None]
        col_max = M.max(axis=0)
        with np.errstate(invalid="ignore"):
            spread = np.exp(M - col_max[None, :]).sum(axis=0)
        mix = np.where(col_max > -math.inf, col_max + np.log(spread), -math.inf)
        mix_max_log = float(mix.max())
        mix_final_log = float(mix[-1])
        reached = mix >= log_threshold
        if reached.any():
            mix_first_reach = int(reached.argmax())
    return BatteryStats(
        final_log,
        max_log,
        selcount,
        cross_count,
        last_cross,
        max_excess,
        mix_max_log,
        mix_first_reach,
        mix_final_log,
    )
