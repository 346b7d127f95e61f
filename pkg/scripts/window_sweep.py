"""Sweep window size and quantization width with the Gower metric.

    python scripts/window_sweep.py --windows 8 16 32 --quant 8 16 32
"""

import argparse
import statistics

from scenes import corpus
from skinseg.evaluation import evaluate
from skinseg.model import TrainConfig, train_multi


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--windows", type=int, nargs="+", default=[4, 8, 16, 32])
    parser.add_argument("--quant", type=int, nargs="+", default=[8, 16, 32])
    parser.add_argument("--images", type=int, default=10)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--slack", type=float, default=1.0)
    args = parser.parse_args()

    training, tests = corpus(args.seed, n_images=args.images)
    print("window  " + "".join(f"N={n:<8}" for n in args.quant))
    for size in args.windows:
        cells = []
        for n in args.quant:
            cfg = TrainConfig(window_w=size, window_h=size, quant_n=n, threshold_slack=args.slack)
            model_set = train_multi(training, cfg)
            rates = [evaluate(img, truth, model_set).detection_rate for img, truth in tests]
            cells.append(f"{statistics.fmean(rates):<10.2f}")
        print(f"{size:>2}x{size:<4}" + "".join(cells))


if __name__ == "__main__":
    main()
