"""Command-line front end: ``skinseg {train,detect,eval,synth}``.

Exit status is 0 on success, 2 for usage errors and unreadable input files,
1 for invalid data (decode failures, bad model files, training errors).
Outputs are written to temporary files and renamed into place only once
every output of the command is ready.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
import warnings
from pathlib import Path

from .detection import detect, format_decisions
from .evaluation import GroundTruth, evaluate, format_report
from .imaging import PnmError, decode_ppm, encode_pgm, encode_ppm
from .metrics import Metric
from .model import TrainConfig, load_model, save_model, train_multi
from .synth import generate, parse_spec


class CliError(Exception):
    def __init__(self, message: str, status: int = 1):
        super().__init__(message)
        self.status = status


def _window(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError(f"window dimensions must be positive, got {text!r}")
    return w, h


def _class_spec(text: str) -> tuple[str, list[str]]:
    name, sep, paths = text.partition("=")
    files = [p for p in paths.split(",") if p]
    if not sep or not name or not files:
        raise argparse.ArgumentTypeError(f"expected NAME=path[,path...], got {text!r}")
    return name, files


def _read(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", status=2) from None


def _read_image(path):
    try:
        return decode_ppm(_read(path))
    except PnmError as exc:
        raise CliError(f"{path}: {exc}") from None


def _read_truth(path):
    try:
        return GroundTruth.from_pgm(_read(path))
    except PnmError as exc:
        raise CliError(f"{path}: {exc}") from None


def _read_model(path):
    try:
        return load_model(_read(path))
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from None


def _write_outputs(outputs: dict) -> None:
    """Write every ``path -> bytes`` entry, or none of them."""
    staged, done = [], []
    try:
        for path, data in outputs.items():
            path = Path(path)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
            staged.append((tmp, path))
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
        for tmp, path in staged:
            os.replace(tmp, path)
            done.append(path)
    except OSError as exc:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)
        for path in done:
            path.unlink(missing_ok=True)
        raise CliError(f"cannot write {exc.filename or 'output'}: {exc.strerror or exc}", 2) from None


def run_train(args) -> None:
    overrides = {}
    if args.window:
        overrides["window_w"], overrides["window_h"] = args.window
    if args.quant is not None:
        overrides["quant_n"] = args.quant
    if args.metric is not None:
        overrides["metric"] = args.metric
    if args.slack is not None:
        overrides["threshold_slack"] = args.slack
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            config = TrainConfig(**overrides)
        except ValueError as exc:
            raise CliError(str(exc), status=2) from None
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)

    classes = [(name, [_read_image(p) for p in paths]) for name, paths in args.classes]
    try:
        model_set = train_multi(classes, config)
    except ValueError as exc:
        raise CliError(f"training failed: {exc}") from None
    _write_outputs({args.out: save_model(model_set)})
    for c in model_set.classes:
        print(f"{c.class_name}\twindows={c.train_window_count}\tthreshold={c.threshold!r}")


def run_detect(args) -> None:
    image = _read_image(args.image)
    model_set = _read_model(args.model)
    try:
        mask, decisions = detect(image, model_set)
    except ValueError as exc:
        raise CliError(f"{args.image}: {exc}") from None
    outputs = {args.out: encode_pgm(mask)}
    if args.decisions:
        outputs[args.decisions] = format_decisions(decisions, model_set.class_names).encode("utf-8")
    _write_outputs(outputs)
    skin = sum(d.is_skin for d in decisions)
    print(f"{skin}/{len(decisions)} windows labeled skin")


def run_eval(args) -> None:
    if not args.pairs:
        raise CliError("eval needs at least one --pair IMAGE TRUTH", status=2)
    model_set = _read_model(args.model)
    rows = []
    for image_path, truth_path in args.pairs:
        image = _read_image(image_path)
        truth = _read_truth(truth_path)
        if (truth.width, truth.height) != (image.width, image.height):
            raise CliError(
                f"dimension mismatch: {image_path} is {image.width}x{image.height}, "
                f"{truth_path} is {truth.width}x{truth.height}"
            )
        try:
            rows.append((image_path, evaluate(image, truth, model_set)))
        except ValueError as exc:
            raise CliError(f"{image_path}: {exc}") from None
    report = format_report(rows)
    _write_outputs({args.out: report.encode("utf-8")})
    sys.stdout.write(report.splitlines()[-1] + "\n")


def run_synth(args) -> None:
    try:
        text = _read(args.spec).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CliError(f"{args.spec}: not UTF-8 text ({exc.reason})") from None
    try:
        spec = parse_spec(text)
    except ValueError as exc:
        raise CliError(f"{args.spec}: {exc}") from None
    image, truth = generate(spec)
    _write_outputs({args.out: encode_ppm(image), args.truth: truth.to_pgm()})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skinseg", description="Histogram-retrieval skin segmentation."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit skin-type models from pure-skin PPM images")
    p.add_argument("--class", dest="classes", action="append", type=_class_spec, required=True,
                   metavar="NAME=path[,path...]", help="one skin type and its images (repeatable)")
    p.add_argument("--window", type=_window, metavar="WxH", help="window size (default 16x16)")
    p.add_argument("--quant", type=int, metavar="N", help="bins per feature group (default 16)")
    p.add_argument("--metric", choices=[m.value for m in Metric], help="distance (default gower)")
    p.add_argument("--slack", type=float, metavar="X", help="threshold multiplier (default 1.0)")
    p.add_argument("--out", required=True, metavar="PATH", help="model JSON to write")
    p.set_defaults(func=run_train)

    p = sub.add_parser("detect", help="segment a PPM image into a PGM mask")
    p.add_argument("image", help="input PPM")
    p.add_argument("--model", required=True, metavar="PATH")
    p.add_argument("--out", required=True, metavar="PATH", help="mask PGM to write")
    p.add_argument("--decisions", metavar="PATH", help="also write per-window decisions (TSV)")
    p.set_defaults(func=run_detect)

    p = sub.add_parser("eval", help="score detections against ground-truth masks")
    p.add_argument("--model", required=True, metavar="PATH")
    p.add_argument("--pair", dest="pairs", nargs=2, action="append", default=[],
                   metavar=("IMAGE", "TRUTH"), help="PPM image and its PGM truth (repeatable)")
    p.add_argument("--out", required=True, metavar="PATH", help="TSV report to write")
    p.set_defaults(func=run_eval)

    p = sub.add_parser("synth", help="render a synthetic image and truth mask from a patch spec")
    p.add_argument("spec", help="patch specification text file")
    p.add_argument("--out", required=True, metavar="PATH", help="PPM image to write")
    p.add_argument("--truth", required=True, metavar="PATH", help="PGM truth mask to write")
    p.set_defaults(func=run_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CliError as exc:
        print(f"skinseg {args.command}: error: {exc}", file=sys.stderr)
        return exc.status
    return 0


if __name__ == "__main__":
    sys.exit(main())
