"""Window classification against skin models and mask assembly."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .features import FeatureVector, extract_features
from .imaging import Image, WindowGrid, tile
from .metrics import Metric
from .model import SkinClassModel, SkinModelSet

__all__ = [
    "WindowDecision",
    "DetectionMask",
    "classify_window",
    "classify_window_multi",
    "detect",
    "format_decisions",
]


@dataclass(frozen=True)
class WindowDecision:
    window_index: int
    label: str | None
    per_class_distances: dict[str, float] = field(default_factory=dict)

    @property
    def is_skin(self) -> bool:
        return self.label is not None


@dataclass(frozen=True, eq=False)
class DetectionMask:
    """Per-pixel class map.

    ``labels`` holds 0 for non-skin and ``k`` for the k-th (1-based) entry of
    ``class_names``.
    """

    labels: np.ndarray
    class_names: tuple[str, ...]

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int32)
        if labels.ndim != 2:
            raise ValueError(f"mask labels must be 2-D, got shape {labels.shape}")
        if labels.size and (labels.min() < 0 or labels.max() > len(self.class_names)):
            raise ValueError("mask label outside the class range")
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "class_names", tuple(self.class_names))

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def skin(self) -> np.ndarray:
        return self.labels > 0

    def label_at(self, x: int, y: int) -> str | None:
        k = int(self.labels[y, x])
        return self.class_names[k - 1] if k else None

    def __eq__(self, other):
        if not isinstance(other, DetectionMask):
            return NotImplemented
        return self.class_names == other.class_names and np.array_equal(self.labels, other.labels)

    __hash__ = None


def classify_window(f: FeatureVector, model: SkinClassModel, metric: Metric | str) -> tuple[bool, float]:
    """Skin iff the distance to the class centroid does not exceed its threshold."""
    d = model.distance(f, metric)
    return d <= model.threshold, d


def _rank(d: float, threshold: float) -> float:
    # a zero-tolerance class only admits d == 0, which outranks every ratio
    return -math.inf if threshold == 0 else d / threshold


def classify_window_multi(f: FeatureVector, model_set: SkinModelSet, window_index: int = 0) -> WindowDecision:
    """Label a window with the qualifying class of smallest distance/threshold.

    Ties go to the class listed first. No qualifying class means non-skin.
    """
    metric = model_set.config.metric
    distances = {}
    best = None
    for order, model in enumerate(model_set.classes):
        qualifies, d = classify_window(f, model, metric)
        distances[model.class_name] = d
        if qualifies:
            key = (_rank(d, model.threshold), order)
            if best is None or key < best[0]:
                best = (key, model.class_name)
    return WindowDecision(window_index, best[1] if best else None, distances)


def detect(image: Image, model_set: SkinModelSet) -> tuple[DetectionMask, list[WindowDecision]]:
    cfg = model_set.config
    grid: WindowGrid = tile(image, cfg.window_w, cfg.window_h)
    decisions = [
        classify_window_multi(extract_features(region, cfg.quant_n), model_set, i)
        for i, region in enumerate(grid)
    ]
    codes = {name: k for k, name in enumerate(model_set.class_names, start=1)}
    window_codes = np.array([codes.get(d.label, 0) for d in decisions], dtype=np.int32)
    labels = window_codes[grid.index_map()]
    return DetectionMask(labels, model_set.class_names), decisions


def _format_distance(d: float) -> str:
    return "inf" if math.isinf(d) else repr(d)


def format_decisions(decisions, class_names) -> str:
    """Tab-separated sidecar: window index, label or ``-``, distances in class order."""
    lines = []
    for dec in decisions:
        cells = [str(dec.window_index), dec.label if dec.label is not None else "-"]
        cells += [_format_distance(dec.per_class_distances[name]) for name in class_names]
        lines.append("\t".join(cells))
    return "".join(line + "\n" for line in lines)
