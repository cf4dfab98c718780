"""Numba kernel backend: @njit sequential loops, disk-cached after the
first compile. fastmath stays off so results are reproducible run-to-run."""
from __future__ import annotations

from numba import njit

BACKEND = "numba"


@njit(cache=True)
def weighted_sum(values, weights):
    acc = 0.0
    for i in range(values.shape[0]):
        acc += values[i] * weights[i]
    return acc


@njit(cache=True)
def weighted_mean(values, weights):
    num = 0.0
    den = 0.0
    for i in range(values.shape[0]):
        num += values[i] * weights[i]
        den += weights[i]
    return num / den


@njit(cache=True)
def power_mean(values, weights, exponent):
    num = 0.0
    den = 0.0
    for i in range(values.shape[0]):
        num += weights[i] * values[i] ** exponent
        den += weights[i]
    return (num / den) ** (1.0 / exponent)


@njit(cache=True)
def min_value(values):
    m = values[0]
    for i in range(1, values.shape[0]):
        if values[i] < m:
            m = values[i]
    return m
