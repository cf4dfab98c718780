"""Numeric reduction kernels behind the aggregation strategies.

Two interchangeable backends compute the same reductions over float64
arrays of one bay's valid assets:

  - ``_numba``: @njit compiled loops (default when numba imports)
  - ``_numpy``: vectorized numpy fallback

Selection happens once at import, driven by the HIAGG_KERNELS environment
variable: ``auto`` (default), ``numba``, or ``numpy``. ``numba`` fails hard
if numba is unavailable; ``auto`` falls back silently. Backends agree to
float rounding (~1e-12 relative); each backend is bitwise deterministic
run-to-run. ``benchmarks/kernel_bench.py`` compares the two.
"""
from __future__ import annotations

import os

_CHOICE = os.environ.get("HIAGG_KERNELS", "auto").strip().lower()

if _CHOICE not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"HIAGG_KERNELS must be auto, numba, or numpy; got {_CHOICE!r}"
    )

if _CHOICE == "numpy":
    from . import _numpy as _impl
else:
    try:
        from . import _numba as _impl  # type: ignore[no-redef]
    except ImportError:
        if _CHOICE == "numba":
            raise
        from . import _numpy as _impl  # type: ignore[no-redef]

weighted_sum = _impl.weighted_sum
weighted_mean = _impl.weighted_mean
power_mean = _impl.power_mean
min_value = _impl.min_value


def backend_name() -> str:
    """Name of the active backend: 'numba' or 'numpy'."""
    return _impl.BACKEND


def warm_up() -> str:
    """Force one compilation/dispatch of every kernel; returns the backend.

    The numba backend JIT-compiles on first call (cached on disk afterward),
    so latency-sensitive callers trigger that cost up front.
    """
    import numpy as np

    v = np.array([2.0, 4.0], dtype=np.float64)
    w = np.array([1.0, 3.0], dtype=np.float64)
    weighted_sum(v, w)
    weighted_mean(v, w)
    power_mean(v, w, -2.0)
    min_value(v)
    return backend_name()
