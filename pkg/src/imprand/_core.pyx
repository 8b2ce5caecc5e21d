# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: battery stepping along bit paths.

State encoding and outputs match imprand._core_py; see there for the layout.
The mixture log-sum-exp is evaluated lazily: a column is only expanded when
its cheap upper bound (max term + log K) can beat the running maximum or the
reach threshold, which keeps the common case at one compare per strategy.
"""

from libc.math cimport log, exp, INFINITY

import numpy as np

from ._stats import BatteryStats

BACKEND = "cext"


def step_product_run(bits, logf1, logf0):
    """Log-capital trajectory of a per-step bet."""
    cdef const unsigned char[::1] b = np.ascontiguousarray(bits, dtype=np.uint8)
    cdef const double[::1] f1 = np.ascontiguousarray(logf1, dtype=np.float64)
    cdef const double[::1] f0 = np.ascontiguousarray(logf0, dtype=np.float64)
    cdef Py_ssize_t n = b.shape[0]
    out = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] o = out
    cdef double acc = 0.0
    cdef Py_ssize_t k
    o[0] = 0.0
    for k in range(n):
        acc += f1[k] if b[k] else f0[k]
        o[k + 1] = acc
    return out


def state_battery_run(bits, logf, sel, logw=None, double log_threshold=INFINITY,
                      growth_c=None, Py_ssize_t tail_start=1):
    """Run K state-table bets along one path and gather their statistics."""
    cdef const unsigned char[::1] b = np.ascontiguousarray(bits, dtype=np.uint8)
    cdef const double[:, ::1] f = np.ascontiguousarray(logf, dtype=np.float64)
    cdef const unsigned char[:, ::1] s = np.ascontiguousarray(sel, dtype=np.uint8)
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t K = f.shape[0]

    cdef bint want_growth = growth_c is not None
    gc_arr = np.zeros(K, dtype=np.float64) if growth_c is None else \
        np.ascontiguousarray(growth_c, dtype=np.float64)
    cdef const double[::1] gc = gc_arr

    cdef bint want_mix = logw is not None
    lw_arr = np.zeros(K, dtype=np.float64) if logw is None else \
        np.ascontiguousarray(logw, dtype=np.float64)
    cdef const double[::1] lw = lw_arr

    L_arr = np.zeros(K, dtype=np.float64)
    cdef double[::1] L = L_arr
    final_log = np.zeros(K, dtype=np.float64)
    max_log = np.zeros(K, dtype=np.float64)
    selcount = np.zeros(K, dtype=np.longlong)
    cross_count = np.zeros(K, dtype=np.longlong)
    last_cross = np.full(K, -1, dtype=np.longlong)
    max_excess = np.full(K, -INFINITY, dtype=np.float64)
    cdef double[::1] mxl = max_log
    cdef long long[::1] cnt = selcount
    cdef long long[::1] crs = cross_count
    cdef long long[::1] lst = last_cross
    cdef double[::1] exc = max_excess

    cdef double logK = log(<double> K) if K > 0 else 0.0
    cdef double mix_max = -INFINITY
    cdef double mix_final = -INFINITY
    cdef Py_ssize_t mix_first = -1
    cdef Py_ssize_t lo = tail_start if tail_start > 1 else 1

    cdef Py_ssize_t k, j, code, scode, parity, prev
    cdef double step, excess, colmax, acc, ls
    cdef bint need_exact

    if want_mix and K > 0:
        # trajectory index 0: every capital is 1, the mixture is sum of weights
        acc = 0.0
        for j in range(K):
            acc += exp(lw[j])
        mix_max = mix_final = log(acc)
        if mix_max >= log_threshold:
            mix_first = 0

    for k in range(n):
        parity = k & 1
        prev = b[k - 1] if k > 0 else 2
        code = parity * 6 + prev * 2 + b[k]
        scode = parity * 3 + prev
        colmax = -INFINITY
        for j in range(K):
            L[j] += f[j, code]
            if L[j] > mxl[j]:
                mxl[j] = L[j]
            if s[j, scode]:
                cnt[j] += 1
            if want_growth and k + 1 >= lo:
                excess = L[j] - gc[j] * cnt[j]
                if excess >= 0.0:
                    crs[j] += 1
                    lst[j] = k + 1
                if excess > exc[j]:
                    exc[j] = excess
            if want_mix:
                step = L[j] + lw[j]
                if step > colmax:
                    colmax = step
        if want_mix:
            if colmax > -INFINITY:
                need_exact = (colmax + logK > mix_max) or \
                    (mix_first < 0 and colmax + logK >= log_threshold) or (k == n - 1)
                if need_exact:
                    acc = 0.0
                    for j in range(K):
                        acc += exp(L[j] + lw[j] - colmax)
                    ls = colmax + log(acc)
                    if ls > mix_max:
                        mix_max = ls
                    if mix_first < 0 and ls >= log_threshold:
                        mix_first = k + 1
                    if k == n - 1:
                        mix_final = ls
            elif k == n - 1:
                mix_final = -INFINITY

    for j in range(K):
        final_log[j] = L[j]
    return BatteryStats(final_log, max_log, selcount, cross_count, last_cross,
                        max_excess, float(mix_max), int(mix_first), float(mix_final))
