"""Result records shared by the compiled kernel and its numpy fallback."""

from typing import NamedTuple

import numpy as np


class BatteryStats(NamedTuple):
    """Per-strategy trajectory statistics plus mixture tracking.

    Window statistics compare log-capital against the selection-driven bound
    c_j * (selected count); they cover trajectory indices from max(1,
    tail_start) to the end.  Mixture fields are -inf/-1 when no weights were
    supplied.
    """

    final_log: np.ndarray
    max_log: np.ndarray
    selcount: np.ndarray
    cross_count: np.ndarray
    last_cross: np.ndarray
    max_excess: np.ndarray
    mix_max_log: float
    mix_first_reach: int
    mix_final_log: float
