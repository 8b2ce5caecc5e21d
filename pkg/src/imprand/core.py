"""Kernel dispatch: compiled extension when available, numpy otherwise.

Set IMPRAND_PURE=1 in the environment to force the numpy fallback (used by
the benchmark and the agreement tests).
"""

from __future__ import annotations

import os

from . import _core_py

if os.environ.get("IMPRAND_PURE"):
    _impl = _core_py
    HAVE_EXT = False
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        HAVE_EXT = True
    except ImportError:  # pragma: no cover - build without a compiler
        _impl = _core_py
        HAVE_EXT = False

BACKEND = _impl.BACKEND
state_battery_run = _impl.state_battery_run
step_product_run = _impl.step_product_run
