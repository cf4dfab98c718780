"""Pure-numpy kernel backend (fallback when numba is unavailable)."""
from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def weighted_sum(values: np.ndarray, weights: np.ndarray) -> float:
    return float((values * weights).sum())


def weighted_mean(values: np.ndarray, weights: np.ndarray) -> float:
    return float((values * weights).sum() / weights.sum())


def power_mean(values: np.ndarray, weights: np.ndarray, exponent: float) -> float:
    num = (weights * values**exponent).sum()
    return float((num / weights.sum()) ** (1.0 / exponent))


def min_value(values: np.ndarray) -> float:
    return float(values.min())
