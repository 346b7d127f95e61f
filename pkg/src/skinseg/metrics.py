"""
Histogram distance functions.

All functions accept :class:`~skinseg.features.FeatureVector` instances or
plain 1-D sequences. ``distance`` dispatches on a metric name; the names are
the identifiers stored in model files and accepted on the command line.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

__all__ = [
    "Metric",
    "MetricConfigError",
    "INFINITE_DISTANCE",
    "euclidean",
    "gower",
    "bhattacharyya",
    "city_block",
    "soergel",
    "distance",
]

#: Returned for pairs with no overlap at all; greater than any finite threshold.
INFINITE_DISTANCE = math.inf


class Metric(str, Enum):
    GOWER = "gower"
    BHATTACHARYYA = "bhattacharyya"
    CITY_BLOCK = "city_block"
    SOERGEL = "soergel"
    EUCLIDEAN = "euclidean"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, name) -> Metric:
        try:
            return cls(name)
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown metric {name!r} (choose from {choices})") from None


class MetricConfigError(ValueError):
    """A range vector was missing for Gower, or supplied for another metric."""


def _pair(f1, f2) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(f1, dtype=np.float64)
    b = np.asarray(f2, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1:
        raise ValueError("distances are defined between 1-D vectors")
    if a.shape != b.shape:
        raise ValueError(f"vector lengths differ: {a.size} vs {b.size}")
    if a.size == 0:
        raise ValueError("vectors must not be empty")
    return a, b


def _require_nonnegative(*vectors):
    for v in vectors:
        if (v < 0).any():
            raise ValueError("histogram entries must be non-negative")


def euclidean(f1, f2) -> float:
    a, b = _pair(f1, f2)
    return float(np.sqrt(np.sum((a - b) ** 2)))


def gower(f1, f2, ranges) -> float:
    """Mean of per-dimension absolute differences, each scaled by its range."""
    a, b = _pair(f1, f2)
    r = np.asarray(ranges, dtype=np.float64)
    if r.shape != a.shape:
        raise ValueError(f"range vector has {r.size} entries, features have {a.size}")
    if not (r > 0).all():
        raise ValueError("range entries must be positive")
    return float(np.sum(np.abs(a - b) / r) / a.size)


def bhattacharyya(f1, f2) -> float:
    """Bhattacharyya distance after scaling each vector to unit L1 mass.

    Without the rescaling, concatenated 3-channel features (total mass 3)
    would give ``-ln 3`` for identical inputs. Vectors with disjoint support
    yield :data:`INFINITE_DISTANCE`.
    """
    a, b = _pair(f1, f2)
    _require_nonnegative(a, b)
    mass_a, mass_b = a.sum(), b.sum()
    if mass_a <= 0 or mass_b <= 0:
        raise ValueError("bhattacharyya needs vectors with positive mass")
    if np.array_equal(a, b):
        # exact coefficient 1; the normalized sum below can land a few ulps short
        return 0.0
    coefficient = float(np.sum(np.sqrt((a / mass_a) * (b / mass_b))))
    if coefficient <= 0.0:
        return INFINITE_DISTANCE
    # the coefficient is at most 1 (Cauchy-Schwarz); rounding can nudge it over
    return -math.log(min(coefficient, 1.0)) + 0.0


def city_block(f1, f2) -> float:
    a, b = _pair(f1, f2)
    return float(np.sum(np.abs(a - b)))


def soergel(f1, f2) -> float:
    a, b = _pair(f1, f2)
    _require_nonnegative(a, b)
    denominator = np.sum(np.maximum(a, b))
    if denominator <= 0:
        raise ValueError("soergel distance is undefined for two all-zero vectors")
    return float(np.sum(np.abs(a - b)) / denominator)


_UNRANGED = {
    Metric.EUCLIDEAN: euclidean,
    Metric.BHATTACHARYYA: bhattacharyya,
    Metric.CITY_BLOCK: city_block,
    Metric.SOERGEL: soergel,
}


def distance(metric: Metric | str, f1, f2, ranges=None) -> float:
    """Evaluate the named metric.

    ``ranges`` must be given for Gower and only for Gower.
    """
    metric = Metric.parse(metric)
    if metric is Metric.GOWER:
        if ranges is None:
            raise MetricConfigError("gower distance requires a range vector")
        return gower(f1, f2, ranges)
    if ranges is not None:
        raise MetricConfigError(f"{metric.value} distance does not take a range vector")
    return _UNRANGED[metric](f1, f2)
