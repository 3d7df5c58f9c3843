"""Command-line entry point tying the pipeline together.

Subcommands: synth, features, train, eval, stats, report, classify,
serve.  Machine-readable results go to files; a short human summary goes
to standard output.  Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import (DatasetError, SynthesisError, read_dataset,
                      synthesize_dataset, write_dataset)
from .evaluation import (EvalReport, run_cross_subject, run_inverse,
                         run_kfold)
from .features import (FEATURE_COUNT, read_feature_table,
                       write_feature_table)
from .forest import (ModelFormatError, TrainConfig, load_model,
                     serialize_model, train_forest)
from .kinematics import ChainFormatError, KinematicChain, load_default_chain
from .measures import MEASURES, analyze_measure
from .report import (render_confusion_svg, render_measure_svg,
                     write_confusion_csv, write_measure_csv)
from .service import StrokeError, TooShortError

_USAGE_EXIT = 1
_DATA_EXIT = 2


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(_USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _load_chain(path):
    if path is None:
        return load_default_chain()
    return KinematicChain.from_file(path)


def _cmd_synth(args):
    dataset = synthesize_dataset(n_participants=args.participants,
                                 trials=args.trials, base_seed=args.seed,
                                 chain=_load_chain(args.chain))
    write_dataset(dataset, args.out)
    print(f"wrote {len(dataset.recordings)} recordings "
          f"({args.participants} participants x 4 gestures x "
          f"{args.trials} trials, seed {args.seed}) to {args.out}")
    return 0


def _cmd_features(args):
    dataset = read_dataset(args.data)
    write_feature_table(dataset, args.out)
    print(f"wrote {len(dataset.recordings)} x {FEATURE_COUNT} feature "
          f"table to {args.out}")
    return 0


def _cmd_train(args):
    X, y, _, _ = read_feature_table(args.features)
    config = TrainConfig(n_trees=args.trees, seed=args.seed)
    from .evaluation import CLASS_LABELS
    model = train_forest(X, [g.value for g in y], CLASS_LABELS, config)
    Path(args.out).write_bytes(serialize_model(model))
    print(f"trained {config.n_trees}-tree forest on {len(X)} rows "
          f"(seed {args.seed}); saved to {args.out}")
    return 0


def _cmd_eval(args):
    X, y, participants, trials = read_feature_table(args.features)
    if args.protocol == "kfold":
        report = run_kfold(X, y, participants, trials, k=args.k,
                           seed=args.seed)
    elif args.protocol == "inverse":
        report = run_inverse(X, y, participants, trials,
                             train_fraction=args.train_fraction,
                             seed=args.seed, single_draw=args.single_draw)
    else:
        report = run_cross_subject(X, y, participants, trials,
                                   n_folds=args.groups, seed=args.seed)
    Path(args.out).write_text(report.to_json() + "\n", encoding="utf-8")
    folds = " ".join(f"{v:.3f}" for v in report.fold_f1)
    print(f"{args.protocol}: mean macro-f1 {report.mean_f1:.4f} "
          f"(folds: {folds}); report written to {args.out}")
    return 0


def _cmd_stats(args):
    dataset = read_dataset(args.data)
    analysis = analyze_measure(dataset, _load_chain(args.chain),
                               args.measure)
    unit = "s" if args.measure == "duration" else "m"
    print(f"{args.measure} by gesture (median / IQR, {unit}):")
    for label, med, iqr in zip(analysis.gesture_labels, analysis.medians,
                               analysis.iqrs):
        print(f"  {label}: {med:.3f} / {iqr:.3f}")
    fr = analysis.friedman
    print(f"Friedman: chi2({fr.df}) = {fr.statistic:.2f}, "
          f"p = {fr.p_raw:.3g}, N = {fr.n}")
    print("pairwise Wilcoxon (Bonferroni-corrected):")
    for a, b, r in analysis.pairwise:
        print(f"  {a} vs {b}: W = {r.statistic:.1f}, Z = {r.z:.2f}, "
              f"p = {r.p_corrected:.3g}, r = {r.effect_size_r:.2f}")
    if args.out:
        write_measure_csv(analysis, args.out + ".csv")
        render_measure_svg(analysis, args.out + ".svg")
        print(f"wrote {args.out}.csv and {args.out}.svg")
    return 0


def _cmd_report(args):
    report = EvalReport.from_json(Path(args.eval).read_text("utf-8"))
    csv_path = args.out + "_confusion.csv"
    svg_path = args.out + "_confusion.svg"
    write_confusion_csv(report.confusion, report.class_labels, csv_path)
    render_confusion_svg(
        report.confusion, report.class_labels, svg_path,
        title=f"Confusion matrix ({report.protocol}, "
              f"mean macro-f1 {report.mean_f1:.2f})")
    print(f"wrote {csv_path} and {svg_path}")
    return 0


def _cmd_classify(args):
    from .service import classify_stroke, read_stroke_log
    model = load_model(Path(args.model).read_bytes())
    points = read_stroke_log(args.stroke)
    recording, pred = classify_stroke(points, model,
                                      chain=_load_chain(args.chain))
    from .telemetry import duration, max_displacement
    votes = ",".join(str(int(v)) for v in pred.votes)
    print(f"label {pred.label}  votes [{votes}]  "
          f"duration {duration(recording):.2f} s  "
          f"max displacement "
          f"{max_displacement(recording, _load_chain(args.chain)):.3f} m")
    return 0


def _cmd_serve(args):
    import uvicorn
    from .service import create_app
    model = load_model(Path(args.model).read_bytes())
    app = create_app(model, chain=_load_chain(args.chain),
                     static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port,
                log_level=os.environ.get("ARMGEST_LOG", "info"))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="armgest",
                     description="Robot-arm gesture pipeline: synthesize "
                                 "telemetry, extract features, train and "
                                 "evaluate a classifier, analyze measures, "
                                 "and serve the live loop.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--participants", type=int, default=16)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--chain", help="chain definition JSON (default bundled)")
    p.add_argument("--out", required=True, help="output dataset directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("features", help="extract the 84-feature table")
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("train", help="fit and save a forest model")
    p.add_argument("--features", required=True, help="feature table CSV")
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output model JSON path")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="run an evaluation protocol")
    p.add_argument("--protocol", required=True,
                   choices=["kfold", "inverse", "cross-subject"])
    p.add_argument("--features", required=True, help="feature table CSV")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=5, help="folds for kfold")
    p.add_argument("--train-fraction", type=float, default=0.2,
                   help="train share for the inverse protocol")
    p.add_argument("--single-draw", action="store_true",
                   help="inverse: evaluate one draw instead of all folds")
    p.add_argument("--groups", type=int, default=2,
                   help="participant groups for cross-subject")
    p.add_argument("--out", required=True, help="output report JSON path")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("stats", help="per-gesture measure statistics")
    p.add_argument("--measure", required=True, choices=list(MEASURES))
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--chain")
    p.add_argument("--out", help="prefix for .csv table and .svg figure")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("report", help="render confusion CSV + SVG heatmap")
    p.add_argument("--eval", required=True, help="eval report JSON")
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("classify", help="classify a logged stroke offline")
    p.add_argument("--model", required=True, help="model JSON path")
    p.add_argument("--stroke", required=True, help="stroke log CSV (t_ms,u,v)")
    p.add_argument("--chain")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("serve", help="start the live WebSocket service")
    p.add_argument("--model", required=True, help="model JSON path")
    p.add_argument("--chain")
    p.add_argument("--static", help="static frontend directory to serve")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, SynthesisError, ModelFormatError,
            ChainFormatError, StrokeError, TooShortError,
            FileNotFoundError, NotADirectoryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
