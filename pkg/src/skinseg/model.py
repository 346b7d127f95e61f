"""Training of per-skin-type centroid models and their JSON persistence."""

from __future__ import annotations

import json
import math
import warnings
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .features import BINS, DEFAULT_QUANT, FeatureVector, check_quant, extract_features
from .imaging import Image, tile
from .metrics import Metric, distance

__all__ = [
    "TrainConfig",
    "SkinClassModel",
    "SkinModelSet",
    "ModelFormatError",
    "SlackWarning",
    "RANGE_FLOOR",
    "SCHEMA_VERSION",
    "average_vector",
    "dimension_ranges",
    "tune_threshold",
    "window_features",
    "train_class",
    "train_multi",
    "save_model",
    "load_model",
]

SCHEMA_VERSION = 1
RANGE_FLOOR = 1e-6


class ModelFormatError(ValueError):
    """A model file failed schema or invariant validation."""


class SlackWarning(UserWarning):
    pass


@dataclass(frozen=True)
class TrainConfig:
    window_w: int = 16
    window_h: int = 16
    quant_n: int = DEFAULT_QUANT
    metric: Metric = Metric.GOWER
    threshold_slack: float = 1.0

    def __post_init__(self):
        for name in ("window_w", "window_h"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        object.__setattr__(self, "quant_n", check_quant(self.quant_n))
        object.__setattr__(self, "metric", Metric.parse(self.metric))
        slack = self.threshold_slack
        if isinstance(slack, bool) or not isinstance(slack, (int, float)):
            raise ValueError(f"threshold_slack must be a number, got {slack!r}")
        if not math.isfinite(slack) or slack < 0:
            raise ValueError(f"threshold_slack must be finite and non-negative, got {slack}")
        object.__setattr__(self, "threshold_slack", float(slack))
        if slack < 1.0:
            warnings.warn(
                f"threshold_slack={slack} < 1: training windows may be rejected by their own model",
                SlackWarning,
                stacklevel=3,
            )

    @property
    def dims(self) -> int:
        return 3 * (BINS // self.quant_n)


@dataclass(frozen=True, eq=False)
class SkinClassModel:
    """Centroid, Gower ranges and admission threshold of one skin type."""

    class_name: str
    centroid: FeatureVector
    ranges: np.ndarray
    threshold: float
    train_window_count: int

    def __post_init__(self):
        if not isinstance(self.class_name, str) or not self.class_name:
            raise ValueError("class name must be a non-empty string")
        ranges = np.array(self.ranges, dtype=np.float64)
        if ranges.shape != self.centroid.values.shape:
            raise ValueError(
                f"ranges has {ranges.size} entries, centroid has {len(self.centroid)}"
            )
        if not (np.isfinite(ranges).all() and (ranges > 0).all()):
            raise ValueError("range entries must be positive and finite")
        threshold = float(self.threshold)
        if not math.isfinite(threshold) or threshold < 0:
            raise ValueError(f"threshold must be finite and non-negative, got {threshold}")
        if self.train_window_count < 1:
            raise ValueError("a class model needs at least one training window")
        ranges.flags.writeable = False
        object.__setattr__(self, "ranges", ranges)
        object.__setattr__(self, "threshold", threshold)

    def distance(self, features, metric: Metric | str) -> float:
        metric = Metric.parse(metric)
        ranges = self.ranges if metric is Metric.GOWER else None
        return distance(metric, features, self.centroid, ranges)

    def __eq__(self, other):
        if not isinstance(other, SkinClassModel):
            return NotImplemented
        return (
            self.class_name == other.class_name
            and self.centroid == other.centroid
            and np.array_equal(self.ranges, other.ranges)
            and self.threshold == other.threshold
            and self.train_window_count == other.train_window_count
        )

    __hash__ = None


@dataclass(frozen=True)
class SkinModelSet:
    config: TrainConfig
    classes: tuple[SkinClassModel, ...] = field(default_factory=tuple)

    def __post_init__(self):
        classes = tuple(self.classes)
        if not classes:
            raise ValueError("a model set needs at least one class")
        names = [c.class_name for c in classes]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ValueError(f"duplicate class names: {', '.join(duplicates)}")
        for c in classes:
            if c.centroid.quant_n != self.config.quant_n:
                raise ValueError(
                    f"class {c.class_name!r} uses quant_n={c.centroid.quant_n}, "
                    f"config says {self.config.quant_n}"
                )
        object.__setattr__(self, "classes", classes)

    @property
    def class_names(self) -> tuple[str, ...]:
        return tuple(c.class_name for c in self.classes)

    def __getitem__(self, name: str) -> SkinClassModel:
        for c in self.classes:
            if c.class_name == name:
                return c
        raise KeyError(name)

    def __len__(self):
        return len(self.classes)


# -- training ---------------------------------------------------------------


def _stack(features) -> tuple[np.ndarray, int | None]:
    """Stack vectors into rows; also return their shared quant_n (None for plain arrays)."""
    features = list(features)
    if not features:
        raise ValueError("need at least one feature vector")
    quant = {getattr(f, "quant_n", None) for f in features}
    if len(quant) != 1:
        raise ValueError("feature vectors mix quantization widths")
    rows = [np.asarray(f, dtype=np.float64) for f in features]
    if len({r.shape for r in rows}) != 1:
        raise ValueError("feature vectors differ in length")
    return np.stack(rows), quant.pop()


def average_vector(features):
    """Dimension-wise arithmetic mean of the given feature vectors.

    Returns a :class:`FeatureVector` when given feature vectors, else an array.
    """
    stacked, quant_n = _stack(features)
    mean = stacked.sum(axis=0) / len(stacked)
    return mean if quant_n is None else FeatureVector(mean, quant_n)


def dimension_ranges(features, floor: float = RANGE_FLOOR) -> np.ndarray:
    """Per-dimension ``max - min`` over ``features``, floored at ``floor``."""
    if not floor > 0:
        raise ValueError(f"range floor must be positive, got {floor}")
    stacked, _ = _stack(features)
    return np.maximum(stacked.max(axis=0) - stacked.min(axis=0), floor)


def tune_threshold(train_features, centroid, metric, ranges, slack: float = 1.0) -> float:
    """``slack`` times the largest training-window distance to ``centroid``."""
    metric = Metric.parse(metric)
    train_features = list(train_features)
    if not train_features:
        raise ValueError("threshold tuning needs at least one training window")
    r = ranges if metric is Metric.GOWER else None
    worst = 0.0
    for i, f in enumerate(train_features):
        d = distance(metric, f, centroid, r)
        if not math.isfinite(d):
            raise ValueError(
                f"training window {i} has infinite {metric.value} distance to the centroid"
            )
        worst = max(worst, d)
    return slack * worst


def window_features(image: Image, config: TrainConfig) -> list[FeatureVector]:
    grid = tile(image, config.window_w, config.window_h)
    return [extract_features(region, config.quant_n) for region in grid]


def train_class(name: str, images, config: TrainConfig | None = None) -> SkinClassModel:
    """Fit one skin type from pure-skin images.

    Every image is tiled with the configured window; the centroid, the
    ranges and the threshold are all computed over the pooled windows.
    """
    config = config or TrainConfig()
    images = list(images)
    if not images:
        raise ValueError(f"class {name!r} has no training images")
    features = [f for image in images for f in window_features(image, config)]
    centroid = average_vector(features)
    ranges = dimension_ranges(features)
    threshold = tune_threshold(features, centroid, config.metric, ranges, config.threshold_slack)
    return SkinClassModel(name, centroid, ranges, threshold, len(features))


def train_multi(class_images, config: TrainConfig | None = None) -> SkinModelSet:
    """Train one model per skin type.

    ``class_images`` is a mapping or a sequence of ``(name, images)`` pairs;
    order is preserved.
    """
    config = config or TrainConfig()
    pairs = list(class_images.items() if isinstance(class_images, Mapping) else class_images)
    if not pairs:
        raise ValueError("need at least one skin class")
    seen = set()
    for name, _ in pairs:
        if name in seen:
            raise ValueError(f"duplicate class name {name!r}")
        seen.add(name)
    return SkinModelSet(config, tuple(train_class(n, imgs, config) for n, imgs in pairs))


# -- persistence ------------------------------------------------------------

_TOP_FIELDS = {
    "schema_version": int,
    "window_w": int,
    "window_h": int,
    "quant_n": int,
    "metric": str,
    "threshold_slack": (int, float),
    "classes": list,
}
_CLASS_FIELDS = {
    "name": str,
    "train_window_count": int,
    "centroid": list,
    "ranges": list,
    "threshold": (int, float),
}


def save_model(model_set: SkinModelSet) -> bytes:
    cfg = model_set.config
    doc = {
        "schema_version": SCHEMA_VERSION,
        "window_w": cfg.window_w,
        "window_h": cfg.window_h,
        "quant_n": cfg.quant_n,
        "metric": cfg.metric.value,
        "threshold_slack": cfg.threshold_slack,
        "classes": [
            {
                "name": c.class_name,
                "train_window_count": c.train_window_count,
                "centroid": c.centroid.values.tolist(),
                "ranges": c.ranges.tolist(),
                "threshold": c.threshold,
            }
            for c in model_set.classes
        ],
    }
    # json writes floats with repr(), the shortest string that round-trips
    return (json.dumps(doc, indent=2, allow_nan=False) + "\n").encode("utf-8")


def _check_fields(obj, spec: dict, where: str):
    if not isinstance(obj, dict):
        raise ModelFormatError(f"{where}: expected a JSON object")
    unknown = sorted(set(obj) - set(spec))
    if unknown:
        raise ModelFormatError(f"{where}: unknown field(s) {', '.join(unknown)}")
    for key, kind in spec.items():
        if key not in obj:
            raise ModelFormatError(f"{where}: missing field {key!r}")
        value = obj[key]
        if isinstance(value, bool) or not isinstance(value, kind):
            raise ModelFormatError(f"{where}: field {key!r} has wrong type {type(value).__name__}")


def _numbers(values, where: str) -> list[float]:
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ModelFormatError(f"{where}: non-numeric entry {v!r}")
    return [float(v) for v in values]


def _reject_constant(token):
    raise ModelFormatError(f"non-finite number {token} in model file")


def load_model(data: bytes | str) -> SkinModelSet:
    try:
        text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
        doc = json.loads(text, parse_constant=_reject_constant)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"model file is not valid UTF-8 JSON: {exc}") from exc
    _check_fields(doc, _TOP_FIELDS, "model")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ModelFormatError(
            f"unsupported schema_version {doc['schema_version']} (expected {SCHEMA_VERSION})"
        )
    try:
        metric = Metric.parse(doc["metric"])
    except ValueError as exc:
        raise ModelFormatError(f"model: field 'metric': {exc}") from None
    with warnings.catch_warnings():
        # slack below 1 was already accepted when the model was trained
        warnings.simplefilter("ignore", SlackWarning)
        try:
            config = TrainConfig(
                doc["window_w"], doc["window_h"], doc["quant_n"], metric, doc["threshold_slack"]
            )
        except (TypeError, ValueError) as exc:
            raise ModelFormatError(f"model: invalid configuration: {exc}") from None

    classes = []
    for i, entry in enumerate(doc["classes"]):
        where = f"classes[{i}]"
        _check_fields(entry, _CLASS_FIELDS, where)
        try:
            centroid = FeatureVector(_numbers(entry["centroid"], f"{where}.centroid"), config.quant_n)
            classes.append(
                SkinClassModel(
                    entry["name"],
                    centroid,
                    _numbers(entry["ranges"], f"{where}.ranges"),
                    entry["threshold"],
                    entry["train_window_count"],
                )
            )
        except ModelFormatError:
            raise
        except ValueError as exc:
            raise ModelFormatError(f"{where}: {exc}") from None
    try:
        return SkinModelSet(config, tuple(classes))
    except ValueError as exc:
        raise ModelFormatError(f"model: {exc}") from None
