"""Window-level scoring of detections against ground-truth skin masks.

A window counts as skin if it holds at least one skin pixel. Ratios whose
denominator is zero are reported as ``None`` and printed as ``undefined``.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

import numpy as np

from .detection import detect
from .imaging import Image, WindowGrid, decode_pgm, encode_gray, tile
from .model import SkinModelSet

__all__ = [
    "GroundTruth",
    "ConfusionCounts",
    "EvaluationReport",
    "window_truth_labels",
    "confusion",
    "detection_rate",
    "sensitivity",
    "specificity",
    "evaluate",
    "format_report",
    "UNDEFINED_TEXT",
]

UNDEFINED_TEXT = "undefined"


@dataclass(frozen=True, eq=False)
class GroundTruth:
    skin: np.ndarray

    def __post_init__(self):
        skin = np.array(self.skin, dtype=bool)
        if skin.ndim != 2 or skin.size == 0:
            raise ValueError(f"ground truth must be a non-empty 2-D mask, got shape {skin.shape}")
        skin.flags.writeable = False
        object.__setattr__(self, "skin", skin)

    @property
    def width(self) -> int:
        return self.skin.shape[1]

    @property
    def height(self) -> int:
        return self.skin.shape[0]

    @classmethod
    def from_pgm(cls, data: bytes) -> GroundTruth:
        """Any non-zero gray level marks skin."""
        return cls(decode_pgm(data) != 0)

    def to_pgm(self) -> bytes:
        return encode_gray(self.skin.astype(np.uint8) * 255)

    def __eq__(self, other):
        if not isinstance(other, GroundTruth):
            return NotImplemented
        return np.array_equal(self.skin, other.skin)

    __hash__ = None


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def positives(self) -> int:
        return self.tp + self.fn

    @property
    def negatives(self) -> int:
        return self.tn + self.fp

    def __add__(self, other: ConfusionCounts) -> ConfusionCounts:
        return ConfusionCounts(
            self.tp + other.tp, self.tn + other.tn, self.fp + other.fp, self.fn + other.fn
        )


@dataclass(frozen=True)
class EvaluationReport:
    counts: ConfusionCounts
    detection_rate: float
    sensitivity: float | None
    specificity: float | None
    per_class: dict[str, ConfusionCounts] = field(default_factory=dict)


def window_truth_labels(truth: GroundTruth, grid: WindowGrid) -> list[bool]:
    image = grid.regions[0].image
    if (truth.width, truth.height) != (image.width, image.height):
        raise ValueError(
            f"truth is {truth.width}x{truth.height}, image is {image.width}x{image.height}"
        )
    return [
        bool(truth.skin[r.y0 : r.y0 + r.h, r.x0 : r.x0 + r.w].any()) for r in grid.regions
    ]


def _as_skin(label) -> bool:
    # class names count as skin; None/False as non-skin
    return label is not None and label is not False


def confusion(predicted, truth) -> ConfusionCounts:
    predicted = [_as_skin(p) for p in predicted]
    truth = [bool(t) for t in truth]
    if len(predicted) != len(truth):
        raise ValueError(f"{len(predicted)} predictions for {len(truth)} truth windows")
    tp = tn = fp = fn = 0
    for p, t in zip(predicted, truth):
        if p and t:
            tp += 1
        elif p:
            fp += 1
        elif t:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp, tn, fp, fn)


def detection_rate(c: ConfusionCounts) -> float:
    """Percentage of windows whose skin/non-skin call matches the truth."""
    if c.total == 0:
        raise ValueError("detection rate of an empty window grid is undefined")
    return 100.0 * (c.tn + c.tp) / c.total


def sensitivity(c: ConfusionCounts) -> float | None:
    return c.tp / c.positives if c.positives else None


def specificity(c: ConfusionCounts) -> float | None:
    return c.tn / c.negatives if c.negatives else None


def evaluate(image: Image, truth: GroundTruth, model_set: SkinModelSet) -> EvaluationReport:
    cfg = model_set.config
    grid = tile(image, cfg.window_w, cfg.window_h)
    truth_labels = window_truth_labels(truth, grid)
    _, decisions = detect(image, model_set)
    labels = [d.label for d in decisions]
    counts = confusion(labels, truth_labels)
    per_class = {
        name: confusion([lab == name or None for lab in labels], truth_labels)
        for name in model_set.class_names
    }
    return EvaluationReport(
        counts, detection_rate(counts), sensitivity(counts), specificity(counts), per_class
    )


def _cell(value) -> str:
    return UNDEFINED_TEXT if value is None else repr(float(value))


def _mean(values):
    values = [v for v in values if v is not None]
    return statistics.fmean(values) if values else None


def format_report(rows) -> str:
    """Render ``(path, EvaluationReport)`` rows as tab-separated text.

    A header line comes first and a ``summary`` line last. The summary holds
    summed counts, the mean rate, mean sensitivity and specificity over the
    images where they are defined, and the sample standard deviation of the
    per-image rates (``undefined`` for fewer than two images).
    """
    rows = list(rows)
    if not rows:
        raise ValueError("no evaluation rows to report")
    header = ["path", "tp", "tn", "fp", "fn", "rate", "sensitivity", "specificity", "rate_std"]
    lines = ["\t".join(header)]
    for path, rep in rows:
        c = rep.counts
        lines.append(
            "\t".join(
                [str(path), str(c.tp), str(c.tn), str(c.fp), str(c.fn),
                 _cell(rep.detection_rate), _cell(rep.sensitivity), _cell(rep.specificity), ""]
            )
        )
    reports = [rep for _, rep in rows]
    totals = reports[0].counts
    for rep in reports[1:]:
        totals = totals + rep.counts
    rates = [rep.detection_rate for rep in reports]
    std = statistics.stdev(rates) if len(rates) > 1 else None
    lines.append(
        "\t".join(
            ["summary", str(totals.tp), str(totals.tn), str(totals.fp), str(totals.fn),
             _cell(statistics.fmean(rates)),
             _cell(_mean(r.sensitivity for r in reports)),
             _cell(_mean(r.specificity for r in reports)),
             _cell(std)]
        )
    )
    return "".join(line + "\n" for line in lines)
