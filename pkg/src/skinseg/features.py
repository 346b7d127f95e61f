"""Quantized per-channel color histograms used as window descriptors."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .imaging import Region

__all__ = [
    "Channel",
    "ChannelHistogram",
    "FeatureVector",
    "DEFAULT_QUANT",
    "channel_histogram",
    "quantize",
    "extract_features",
    "check_quant",
]

BINS = 256
DEFAULT_QUANT = 16
_SUM_TOL = 1e-9


class Channel(IntEnum):
    RED = 0
    GREEN = 1
    BLUE = 2


def check_quant(n: int) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise TypeError(f"quantization width must be an integer, got {n!r}")
    if n < 1 or BINS % n:
        raise ValueError(f"quantization width must divide 256, got {n}")
    return int(n)


@dataclass(frozen=True, eq=False)
class ChannelHistogram:
    counts: np.ndarray
    total: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (BINS,):
            raise ValueError(f"histogram needs {BINS} bins, got shape {counts.shape}")
        if (counts < 0).any():
            raise ValueError("histogram counts must be non-negative")
        if int(counts.sum()) != self.total:
            raise ValueError(f"counts sum to {int(counts.sum())}, total says {self.total}")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    def __eq__(self, other):
        if not isinstance(other, ChannelHistogram):
            return NotImplemented
        return self.total == other.total and np.array_equal(self.counts, other.counts)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Concatenated (red, green, blue) group masses, each channel summing to 1.

    ``values`` has ``3 * 256 // quant_n`` entries in [0, 1].
    """

    values: np.ndarray
    quant_n: int = DEFAULT_QUANT

    def __post_init__(self):
        n = check_quant(self.quant_n)
        values = np.array(self.values, dtype=np.float64)
        groups = BINS // n
        if values.shape != (3 * groups,):
            raise ValueError(
                f"feature vector for quant_n={n} needs {3 * groups} values, got shape {values.shape}"
            )
        if not np.isfinite(values).all() or (values < 0).any() or (values > 1).any():
            raise ValueError("feature values must lie in [0, 1]")
        sums = values.reshape(3, groups).sum(axis=1)
        if (np.abs(sums - 1.0) > _SUM_TOL).any():
            raise ValueError(f"per-channel masses must sum to 1, got {sums.tolist()}")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "quant_n", n)

    def __len__(self):
        return len(self.values)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def channel(self, channel: Channel) -> np.ndarray:
        groups = BINS // self.quant_n
        return self.values[channel * groups : (channel + 1) * groups]

    def __eq__(self, other):
        if not isinstance(other, FeatureVector):
            return NotImplemented
        return self.quant_n == other.quant_n and np.array_equal(self.values, other.values)

    __hash__ = None


def channel_histogram(region: Region, channel: Channel | int) -> ChannelHistogram:
    channel = Channel(channel)
    values = region.pixels[:, :, channel].ravel()
    return ChannelHistogram(np.bincount(values, minlength=BINS), int(values.size))


def quantize(histograms, n: int = DEFAULT_QUANT) -> FeatureVector:
    """Collapse three channel histograms into groups of ``n`` adjacent bins.

    Group ``g`` covers bins ``[g*n, (g+1)*n)`` and holds the fraction of the
    region's pixels falling there.
    """
    n = check_quant(n)
    histograms = tuple(histograms)
    if len(histograms) != 3:
        raise ValueError(f"expected red, green and blue histograms, got {len(histograms)}")
    total = histograms[0].total
    if any(h.total != total for h in histograms):
        raise ValueError("channel histograms disagree on pixel count")
    if total <= 0:
        raise ValueError("cannot quantize an empty histogram")
    grouped = np.concatenate([h.counts.reshape(-1, n).sum(axis=1) for h in histograms])
    return FeatureVector(grouped / total, n)


def extract_features(region: Region, n: int = DEFAULT_QUANT) -> FeatureVector:
    return quantize([channel_histogram(region, c) for c in Channel], n)
