"""Normal-approximation confidence intervals."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import EmptyInput

Z95 = 1.96


class Interval(NamedTuple):
    mean: float
    halfwidth: float
    degenerate: bool = False


def ci95(samples) -> Interval:
    """Mean and 95% halfwidth ``1.96 * sd / sqrt(n)`` with the n-1 sample sd.

    A single sample has no spread estimate; its halfwidth is reported as 0
    and ``degenerate`` is set.
    """
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n == 0:
        raise EmptyInput("ci95 needs at least one sample")
    mean = float(x.mean())
    if n == 1:
        return Interval(mean, 0.0, True)
    sd = float(x.std(ddof=1))
    return Interval(mean, Z95 * sd / math.sqrt(n), False)


def ci95_columns(samples) -> tuple[np.ndarray, np.ndarray, bool]:
    """Column-wise :func:`ci95` for a ``(reps, k)`` array."""
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise EmptyInput("ci95_columns needs a non-empty (reps, k) array")
    n = x.shape[0]
    mean = x.mean(axis=0)
    if n == 1:
        return mean, np.zeros_like(mean), True
    return mean, Z95 * x.std(axis=0, ddof=1) / math.sqrt(n), False
