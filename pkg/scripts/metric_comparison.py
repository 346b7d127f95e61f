"""Compare the five distance metrics on a synthetic three-skin-type corpus.

Trains one model per skin type from held-out pure-skin images, scores a set
of random scenes and prints mean and sample standard deviation of the
per-image window detection rate, plus pooled sensitivity and specificity.

    python scripts/metric_comparison.py --images 20 --slack 1.0
"""

import argparse
import statistics

from scenes import corpus
from skinseg.evaluation import evaluate, sensitivity, specificity
from skinseg.metrics import Metric
from skinseg.model import TrainConfig, train_multi


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--images", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--slack", type=float, default=1.0)
    parser.add_argument("--quant", type=int, default=16)
    args = parser.parse_args()

    training, tests = corpus(args.seed, n_images=args.images)
    print(f"{'metric':<14}{'rate':>9}{'std':>7}{'sens':>8}{'spec':>8}")
    for metric in Metric:
        cfg = TrainConfig(metric=metric, quant_n=args.quant, threshold_slack=args.slack)
        model_set = train_multi(training, cfg)
        reports = [evaluate(img, truth, model_set) for img, truth in tests]
        rates = [r.detection_rate for r in reports]
        pooled = reports[0].counts
        for r in reports[1:]:
            pooled = pooled + r.counts
        print(f"{metric.value:<14}{statistics.fmean(rates):9.2f}{statistics.stdev(rates):7.2f}"
              f"{sensitivity(pooled):8.3f}{specificity(pooled):8.3f}")


if __name__ == "__main__":
    main()
