import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from helpers import uniform_image
from skinseg.detection import detect
from skinseg.evaluation import (
    ConfusionCounts,
    GroundTruth,
    confusion,
    detection_rate,
    evaluate,
    format_report,
    sensitivity,
    specificity,
    window_truth_labels,
)
from skinseg.imaging import Image, tile
from skinseg.model import train_multi

SKIN = (210, 150, 120)
BLUE = (0, 0, 255)

# 10 windows: 5 agree on skin, 3 agree on non-skin, then one fp and one fn
CRAFTED_PRED = ["s", "s", "s", "s", "s", None, None, None, "s", None]
CRAFTED_TRUTH = [True] * 5 + [False] * 3 + [False, True]


class TestWindowLabels:
    def grid(self, w=32, h=32):
        return tile(uniform_image(w, h, (0, 0, 0)), 16, 16)

    def test_empty_truth(self):
        truth = GroundTruth(np.zeros((32, 32)))
        assert window_truth_labels(truth, self.grid()) == [False] * 4

    def test_single_pixel(self):
        skin = np.zeros((32, 32), dtype=bool)
        skin[0, 0] = True
        assert window_truth_labels(GroundTruth(skin), self.grid()) == [True, False, False, False]

    def test_bottom_row(self):
        skin = np.zeros((32, 32), dtype=bool)
        skin[16:, :] = True
        assert window_truth_labels(GroundTruth(skin), self.grid()) == [False, False, True, True]

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            window_truth_labels(GroundTruth(np.zeros((16, 32))), self.grid())


class TestConfusion:
    def test_perfect(self):
        c = confusion(["a", None, "b"], [True, False, True])
        assert (c.fp, c.fn) == (0, 0)

    def test_total_disagreement(self):
        c = confusion(["a"] * 7, [False] * 7)
        assert (c.tp, c.tn, c.fn, c.fp) == (0, 0, 0, 7)

    def test_crafted(self):
        assert confusion(CRAFTED_PRED, CRAFTED_TRUTH) == ConfusionCounts(5, 3, 1, 1)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            confusion([None], [True, False])

    def test_matches_brute_force(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 64))
            p = rng.integers(0, 2, n).tolist()
            t = rng.integers(0, 2, n).tolist()
            c = confusion([bool(x) for x in p], t)
            assert (c.tp, c.tn, c.fp, c.fn) == oracles.confusion(p, t)
            assert c.total == n


class TestRates:
    def test_perfect(self):
        assert detection_rate(ConfusionCounts(3, 4, 0, 0)) == 100.0

    def test_crafted(self):
        assert detection_rate(ConfusionCounts(5, 3, 1, 1)) == 80.0

    def test_zero(self):
        assert detection_rate(ConfusionCounts(0, 0, 2, 3)) == 0.0

    def test_empty(self):
        with pytest.raises(ValueError):
            detection_rate(ConfusionCounts(0, 0, 0, 0))

    def test_sensitivity(self):
        assert sensitivity(ConfusionCounts(9, 0, 0, 1)) == 0.9

    def test_specificity(self):
        assert specificity(ConfusionCounts(0, 4, 0, 0)) == 1.0

    def test_undefined(self):
        assert sensitivity(ConfusionCounts(0, 5, 1, 0)) is None
        assert specificity(ConfusionCounts(5, 0, 0, 1)) is None

    @given(*[st.integers(0, 10**6)] * 4)
    def test_rate_identity(self, tp, tn, fp, fn):
        c = ConfusionCounts(tp, tn, fp, fn)
        if c.positives and c.negatives:
            want = 100 * (sensitivity(c) * c.positives + specificity(c) * c.negatives) / c.total
            assert abs(detection_rate(c) - want) <= 1e-12 * max(1.0, want)

    @given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1))
    def test_swap_roles(self, pairs):
        pred = [p for p, _ in pairs]
        truth = [t for _, t in pairs]
        c = confusion(pred, truth)
        s = confusion([not p for p in pred], [not t for t in truth])
        assert sensitivity(c) == specificity(s) and specificity(c) == sensitivity(s)
        assert detection_rate(c) == detection_rate(s)


class TestEvaluate:
    def halves(self):
        px = np.empty((32, 64, 3), dtype=np.uint8)
        px[:, :32] = SKIN
        px[:, 32:] = BLUE
        skin = np.zeros((32, 64), dtype=bool)
        skin[:, :32] = True
        return Image(px), GroundTruth(skin)

    def test_two_color_perfect(self):
        img, truth = self.halves()
        ms = train_multi({"skin": [uniform_image(16, 16, SKIN)]})
        rep = evaluate(img, truth, ms)
        assert rep.counts == ConfusionCounts(4, 4, 0, 0)
        assert (rep.detection_rate, rep.sensitivity, rep.specificity) == (100.0, 1.0, 1.0)
        assert rep.per_class == {"skin": rep.counts}

    def test_self_comparison(self, rng):
        img = Image(rng.integers(0, 256, size=(48, 40, 3), dtype=np.uint8))
        ms = train_multi({"a": [Image(img.pixels[:16, :16])]})
        mask, _ = detect(img, ms)
        assert evaluate(img, GroundTruth(mask.skin), ms).detection_rate == 100.0

    def test_pgm_truth_any_nonzero(self):
        data = b"P5 3 1 255\n" + bytes([0, 1, 255])
        assert GroundTruth.from_pgm(data).skin.tolist() == [[False, True, True]]
        t = GroundTruth(np.array([[True, False]]))
        assert GroundTruth.from_pgm(t.to_pgm()) == t


class TestReport:
    def report(self, counts):
        from skinseg.evaluation import EvaluationReport
        return EvaluationReport(counts, detection_rate(counts), sensitivity(counts),
                                specificity(counts))

    def test_rows_and_summary(self):
        rows = [("a.ppm", self.report(ConfusionCounts(5, 3, 1, 1))),
                ("b.ppm", self.report(ConfusionCounts(4, 0, 0, 0)))]
        lines = format_report(rows).splitlines()
        assert lines[0].split("\t")[:8] == ["path", "tp", "tn", "fp", "fn", "rate",
                                            "sensitivity", "specificity"]
        assert lines[1].split("\t") == ["a.ppm", "5", "3", "1", "1", "80.0",
                                        repr(5 / 6), repr(3 / 4), ""]
        assert lines[2].split("\t")[5:8] == ["100.0", "1.0", "undefined"]
        summary = lines[3].split("\t")
        assert summary[:6] == ["summary", "9", "3", "1", "1", "90.0"]
        assert float(summary[6]) == pytest.approx((5 / 6 + 1) / 2)
        assert summary[7] == repr(0.75)
        assert float(summary[8]) == pytest.approx(np.std([80.0, 100.0], ddof=1))

    def test_single_row_std_undefined(self):
        text = format_report([("x", self.report(ConfusionCounts(1, 1, 0, 0)))])
        assert text.splitlines()[-1].endswith("\tundefined")

    def test_empty(self):
        with pytest.raises(ValueError):
            format_report([])


class TestHeldOutCorpus:
    """Training and test skin drawn independently from the same distribution."""

    def run(self, slack, seed):
        from skinseg.model import TrainConfig
        from skinseg.synth import Patch, SynthSpec, generate
        train, _ = generate(SynthSpec(256, 256, [Patch(0, 0, 256, 256, SKIN, 10, True)], 1000 + seed))
        image, truth = generate(SynthSpec(
            256, 256, [Patch(0, 0, 128, 256, SKIN, 10, True), Patch(128, 0, 128, 256, BLUE, 10)], seed))
        return evaluate(image, truth, train_multi({"skin": [train]}, TrainConfig(threshold_slack=slack)))

    def test_zero_margin_threshold_misses_few_windows(self):
        # the max-distance rule has no margin: a fresh window can land just outside it
        for seed in range(3):
            rep = self.run(1.0, seed)
            assert rep.specificity == 1.0
            assert rep.sensitivity >= 0.97

    def test_slack_recovers_full_sensitivity(self):
        for seed in range(3):
            rep = self.run(2.0, seed)
            assert (rep.detection_rate, rep.sensitivity, rep.specificity) == (100.0, 1.0, 1.0)
