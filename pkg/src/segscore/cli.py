"""segscore command line: eval, curve, simulate, match.

Exit codes: 0 success, 2 unreadable or invalid input, 3 canvas mismatch,
4 truncated simulation trace.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .classic import threshold_range
from .instances import Canvas, InstanceSet, ParseError, parse_label_map_pgm, parse_rle_json, write_rle_json
from .matching import greedy_match, unique_match
from .overlap import CanvasMismatchError, build_overlap_table, iou_matrix
from .report import METRIC_NAMES, build_report, compute_scores, digest, fmt12, report_to_json
from .simulate import gen_scene, run_incremental_falses, run_object_erosion, run_pixel_removal, trace_to_csv
from .sortedap import curve_to_rows, sorted_ap_from_matrix

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CANVAS = 3
EXIT_TRUNCATED = 4

SYNTHETIC_CANVAS = Canvas(512, 512)
SYNTHETIC_SIZE_RANGE = (60, 300)


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load_instance_set(path: str) -> tuple[InstanceSet, bytes]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"{path}: cannot read file: {exc}", EXIT_INPUT) from exc
    suffix = Path(path).suffix.lower()
    try:
        if suffix == ".json":
            return parse_rle_json(data), data
        if suffix == ".pgm":
            return parse_label_map_pgm(data), data
    except ParseError as exc:
        raise CliError(f"{path}: {exc}", EXIT_INPUT) from exc
    raise CliError(f"{path}: unsupported extension {suffix!r} (expected .json or .pgm)", EXIT_INPUT)


def _load_pair(gt_path: str, pred_path: str):
    gt, gt_bytes = _load_instance_set(gt_path)
    pred, pred_bytes = _load_instance_set(pred_path)
    if gt.canvas != pred.canvas:
        raise CliError(
            f"canvas mismatch: {gt_path} is {gt.canvas.width}x{gt.canvas.height}, "
            f"{pred_path} is {pred.canvas.width}x{pred.canvas.height}",
            EXIT_CANVAS,
        )
    return gt, gt_bytes, pred, pred_bytes


def _parse_thresholds(spec: str):
    try:
        start, stop, step = (float(v) for v in spec.split(":"))
        return threshold_range(start, stop, step)
    except ValueError as exc:
        raise CliError(f"invalid threshold range {spec!r}: {exc}", EXIT_INPUT) from exc


def _parse_metrics(spec: str):
    names = tuple(name.strip() for name in spec.split(",") if name.strip())
    unknown = [n for n in names if n not in METRIC_NAMES]
    if unknown:
        raise CliError(f"unknown metric name(s): {', '.join(unknown)}", EXIT_INPUT)
    if not names:
        raise CliError("empty metric list", EXIT_INPUT)
    return names


def _threads_cap() -> int:
    # SEGSCORE_THREADS caps evaluation parallelism; 0 means auto. The
    # current evaluator is sequential, so any value behaves like 1.
    raw = os.environ.get("SEGSCORE_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        raise CliError(f"SEGSCORE_THREADS must be an integer, got {raw!r}", EXIT_INPUT) from None
    if cap < 0:
        raise CliError(f"SEGSCORE_THREADS must be >= 0, got {cap}", EXIT_INPUT)
    return cap


def cmd_eval(args) -> int:
    _threads_cap()
    gt, gt_bytes, pred, pred_bytes = _load_pair(args.gt, args.pred)
    thresholds = _parse_thresholds(args.iou_thresholds)
    metrics = _parse_metrics(args.metrics)
    scores, summary = compute_scores(pred, gt, metrics=metrics, thresholds=thresholds, matcher=args.matcher)
    report = build_report(scores, summary, thresholds, args.matcher, digest(gt_bytes), digest(pred_bytes))
    if args.output:
        Path(args.output).write_bytes(report_to_json(report))
    for name, value in report["metrics"].items():
        if name == "pq":
            for sub in ("pq", "rq", "sq"):
                print(f"{sub}={fmt12(value[sub])}")
        else:
            print(f"{name}={fmt12(value)}")
    return EXIT_OK


def cmd_curve(args) -> int:
    gt, _, pred, _ = _load_pair(args.gt, args.pred)
    matrix = iou_matrix(build_overlap_table(pred, gt))
    rows = curve_to_rows(sorted_ap_from_matrix(matrix).curve)
    lines = ["iou,ap"] + [f"{fmt12(t)},{fmt12(ap)}" for t, ap in rows]
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.base is not None:
        base, _ = _load_instance_set(args.base)
    elif args.synthetic is not None:
        base = gen_scene(SYNTHETIC_CANVAS, args.synthetic, SYNTHETIC_SIZE_RANGE, args.seed)
    else:
        raise CliError("one of --base or --synthetic is required", EXIT_INPUT)

    if args.mode == "incremental-falses":
        trace = run_incremental_falses(base, args.steps, args.seed)
    elif args.mode == "object-erosion":
        trace = run_object_erosion(base, args.steps, args.seed)
    elif args.mode == "pixel-removal":
        trace = run_pixel_removal(base, args.fraction, args.steps, args.seed)
    else:
        raise CliError(f"invalid mode {args.mode!r}", EXIT_INPUT)

    Path(args.out).write_text(trace_to_csv(trace), encoding="utf-8")
    if args.snapshot_dir:
        snap = Path(args.snapshot_dir)
        snap.mkdir(parents=True, exist_ok=True)
        for step in trace.steps:
            (snap / f"step_{step.index:04d}_gt.json").write_bytes(write_rle_json(step.scene.gt))
            (snap / f"step_{step.index:04d}_pred.json").write_bytes(write_rle_json(step.scene.pred))
    if trace.truncated:
        print(f"trace truncated: {trace.stop_reason}", file=sys.stderr)
        return EXIT_TRUNCATED
    return EXIT_OK


def cmd_match(args) -> int:
    gt, _, pred, _ = _load_pair(args.gt, args.pred)
    if not (0.0 < args.threshold < 1.0):
        raise CliError(f"threshold must lie in (0,1), got {args.threshold}", EXIT_INPUT)
    matrix = iou_matrix(build_overlap_table(pred, gt))
    match_fn = unique_match if args.matcher == "unique" else greedy_match
    match = match_fn(matrix, args.threshold)
    dump = {
        "threshold": args.threshold,
        "matcher": args.matcher,
        "pairs": [{"pred": i, "gt": j, "iou": float(fmt12(v))} for i, j, v in match.pairs],
        "fp": list(match.fp),
        "fn": list(match.fn),
    }
    print(json.dumps(dump, separators=(",", ":")))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="segscore", description=__doc__)
    parser.add_argument("--version", action="version", version=f"segscore {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate metrics for a gt/pred pair")
    p_eval.add_argument("--gt", required=True)
    p_eval.add_argument("--pred", required=True)
    p_eval.add_argument("--metrics", default=",".join(METRIC_NAMES))
    p_eval.add_argument("--iou-thresholds", default="0.5:0.95:0.05")
    p_eval.add_argument("--matcher", choices=("unique", "greedy"), default="unique")
    p_eval.add_argument("--output")
    p_eval.set_defaults(func=cmd_eval)

    p_curve = sub.add_parser("curve", help="export the sortedAP drop curve as CSV")
    p_curve.add_argument("--gt", required=True)
    p_curve.add_argument("--pred", required=True)
    p_curve.add_argument("--out", required=True)
    p_curve.set_defaults(func=cmd_curve)

    p_sim = sub.add_parser("simulate", help="run a degradation trace")
    p_sim.add_argument("--mode", required=True, choices=("incremental-falses", "object-erosion", "pixel-removal"))
    p_sim.add_argument("--base")
    p_sim.add_argument("--synthetic", type=int)
    p_sim.add_argument("--steps", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--fraction", type=float, default=0.05)
    p_sim.add_argument("--out", required=True)
    p_sim.add_argument("--snapshot-dir")
    p_sim.set_defaults(func=cmd_simulate)

    p_match = sub.add_parser("match", help="dump a match result as JSON")
    p_match.add_argument("--gt", required=True)
    p_match.add_argument("--pred", required=True)
    p_match.add_argument("--threshold", type=float, required=True)
    p_match.add_argument("--matcher", choices=("unique", "greedy"), default="unique")
    p_match.set_defaults(func=cmd_match)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"segscore: {exc}", file=sys.stderr)
        return exc.code
    except CanvasMismatchError as exc:
        print(f"segscore: {exc}", file=sys.stderr)
        return EXIT_CANVAS


if __name__ == "__main__":
    sys.exit(main())
