"""Command line entry point: ``mtcf eval | bench | synth | split-stats``.

Exit codes: 0 ok, 1 usage or I/O error, 2 parallel output disagreed with the
sequential baseline.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from typing import Sequence

from . import __version__
from .bench import DigestMismatchError, machine_info, run_bench, speedup_table
from .evaluation import RelevanceThreshold, sweep_sparsity, sweep_top_n
from .ingest import RatingsFormatError, SplitSpec, parse_movielens, split, write_ratings
from .similarity import SimilarityMeasure
from .synth import generate_ratings

EVAL_COLUMNS = ("measure", "n", "mae", "precision", "recall", "f1", "tp", "fp", "fn", "tn",
                "n_predictions", "fallback_user_mean", "fallback_global_mean")
BENCH_COLUMNS = ("measure", "workers", "wall_ms", "speedup", "n_test", "digest")

log = logging.getLogger("mtcf")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _measures(text: str) -> list[SimilarityMeasure]:
    try:
        return [SimilarityMeasure.parse(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_data_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input data")
    g.add_argument("--data", help="ratings file (MovieLens .dat or headered .csv)")
    g.add_argument("--format", choices=("dat", "csv", "synthetic"), default=None,
                   help="input format; inferred from the file extension when omitted, "
                        "'synthetic' generates planted-cluster data instead of reading a file")
    g.add_argument("--n-users", type=int, default=1000, help="synthetic users (default: %(default)s)")
    g.add_argument("--n-items", type=int, default=500, help="synthetic items (default: %(default)s)")
    g.add_argument("--density", type=float, default=0.05, help="synthetic density (default: %(default)s)")
    g.add_argument("--clusters", type=int, default=8, help="synthetic taste clusters (default: %(default)s)")
    g.add_argument("--synth-seed", type=int, default=42, help="synthetic structure seed (default: %(default)s)")
    g.add_argument("--seed", type=int, default=42, help="train/test split seed (default: %(default)s)")
    g.add_argument("--train-fraction", type=float, default=0.9, help="(default: %(default)s)")


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", "-o", help="report path (default: standard output)")
    p.add_argument("--output-format", choices=("csv", "json"), default=None,
                   help="report format; inferred from --output extension, else csv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mtcf", description="Parallel user-based collaborative filtering experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="MAE / precision / recall / F1 over a top-N (or sparsity) sweep")
    _add_data_args(p)
    p.add_argument("--measure", type=_measures, default=_measures("pcc"),
                   help="comma list of jaccard, cosine, pcc (default: pcc)")
    p.add_argument("--top-n", type=_int_list, default=[5, 10, 20, 40],
                   help="ascending neighborhood sizes (default: 5,10,20,40)")
    p.add_argument("--threshold", type=float, default=4.0,
                   help="ratings at or above this count as good (default: %(default)s)")
    p.add_argument("--workers", type=int, default=1, help="(default: %(default)s)")
    p.add_argument("--keep-fractions", type=_float_list, default=None,
                   help="run a sparsity sweep over these ascending training keep fractions "
                        "(uses the first --top-n value); adds a keep_fraction column")
    p.add_argument("--backend", choices=("process", "thread"), default=None,
                   help="worker pool kind (default: process where fork exists)")
    _add_output_args(p)

    p = sub.add_parser("bench", help="sequential vs parallel timing with output checksums")
    _add_data_args(p)
    p.add_argument("--measure", type=_measures, default=_measures("jaccard,cosine,pcc"),
                   help="comma list (default: jaccard,cosine,pcc)")
    p.add_argument("--workers", type=_int_list, default=[1, 2, 4, 8],
                   help="worker counts, must include 1 (default: 1,2,4,8)")
    p.add_argument("--top-n", type=int, default=20, help="(default: %(default)s)")
    p.add_argument("--repeats", type=int, default=3, help="timed runs per cell, minimum kept (default: %(default)s)")
    p.add_argument("--backend", choices=("process", "thread"), default=None,
                   help="worker pool kind (default: process where fork exists)")
    _add_output_args(p)

    p = sub.add_parser("synth", help="write a planted-cluster synthetic ratings file")
    p.add_argument("--n-users", type=int, default=1000, help="(default: %(default)s)")
    p.add_argument("--n-items", type=int, default=500, help="(default: %(default)s)")
    p.add_argument("--density", type=float, default=0.05, help="(default: %(default)s)")
    p.add_argument("--clusters", type=int, default=8, help="(default: %(default)s)")
    p.add_argument("--seed", type=int, default=42, help="(default: %(default)s)")
    p.add_argument("--format", choices=("dat", "csv"), default=None,
                   help="inferred from the output extension when omitted")
    p.add_argument("--output", "-o", required=True)

    p = sub.add_parser("split-stats", help="report the train/test split without running anything")
    _add_data_args(p)
    _add_output_args(p)
    return parser


def _load_ratings(args):
    if args.format == "synthetic":
        return generate_ratings(args.n_users, args.n_items, args.density, args.synth_seed, args.clusters)
    if not args.data:
        raise UsageError("--data is required unless --format synthetic")
    parsed = parse_movielens(args.data, args.format)
    if parsed.duplicates:
        print(f"warning: {parsed.duplicates} duplicate ratings in {args.data}, kept the last", file=sys.stderr)
    return parsed.ratings


def _load_dataset(args):
    ratings = _load_ratings(args)
    try:
        spec = SplitSpec(args.train_fraction, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return ratings, split(ratings, spec), spec


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _emit(rows: list[dict], columns: Sequence[str], args, extra: dict | None = None) -> None:
    fmt = args.output_format
    if fmt is None:
        fmt = "json" if args.output and args.output.lower().endswith(".json") else "csv"
    if fmt == "json":
        doc = dict(extra or {}, rows=rows) if extra else rows
        text = json.dumps(doc, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
        text = buf.getvalue()
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _eval_row(measure, n, rep) -> dict:
    return {
        "measure": measure.name, "n": n, "mae": rep.mae,
        "precision": rep.precision, "recall": rep.recall, "f1": rep.f1,
        "tp": rep.tp, "fp": rep.fp, "fn": rep.fn, "tn": rep.tn,
        "n_predictions": rep.n_predictions,
        "fallback_user_mean": rep.fallback_counts.get("user_mean", 0),
        "fallback_global_mean": rep.fallback_counts.get("global_mean", 0),
    }


def cmd_eval(args) -> int:
    if not args.top_n or any(n < 1 for n in args.top_n):
        raise UsageError("--top-n needs positive integers")
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    try:
        t = RelevanceThreshold(args.threshold)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ratings, dataset, spec = _load_dataset(args)
    rows = []
    columns = EVAL_COLUMNS
    for measure in args.measure:
        if args.keep_fractions:
            n = args.top_n[0]
            for frac, rep in sweep_sparsity(ratings, args.keep_fractions, n, measure, t, args.seed,
                                            args.workers, spec, args.backend):
                rows.append(dict(keep_fraction=frac, **_eval_row(measure, n, rep)))
            columns = ("keep_fraction",) + EVAL_COLUMNS
        else:
            for n, rep in sweep_top_n(dataset, measure, args.top_n, t, args.workers, args.backend):
                rows.append(_eval_row(measure, n, rep))
            log.info("%s done", measure.name)
    _emit(rows, columns, args)
    return 0


def cmd_bench(args) -> int:
    if 1 not in args.workers:
        raise UsageError("--workers must include 1 (the sequential baseline)")
    if any(w < 1 for w in args.workers) or args.repeats < 1 or args.top_n < 1:
        raise UsageError("--workers, --repeats and --top-n must be positive")
    _, dataset, _ = _load_dataset(args)
    info = machine_info()
    for key, value in info.items():
        print(f"# {key}: {value}", file=sys.stderr)
    records = run_bench(dataset, args.measure, args.workers, args.top_n, args.repeats, args.backend)
    speedups = speedup_table(records)
    rows = [{"measure": r.measure, "workers": r.workers, "wall_ms": r.wall_ms, "speedup": s.speedup,
             "n_test": r.n_test, "digest": r.output_digest} for r, s in zip(records, speedups)]
    _emit(rows, BENCH_COLUMNS, args, extra={"machine": info, "phase": records[0].phase if records else None})
    return 0


def cmd_synth(args) -> int:
    try:
        ratings = generate_ratings(args.n_users, args.n_items, args.density, args.seed, args.clusters)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_ratings(args.output, ratings, args.format)
    print(f"wrote {len(ratings)} ratings to {args.output}", file=sys.stderr)
    return 0


def cmd_split_stats(args) -> int:
    ratings, dataset, spec = _load_dataset(args)
    row = {
        "n_ratings": len(ratings), "n_users": dataset.n_users, "n_items": dataset.n_items,
        "n_train": dataset.n_train, "n_test": len(dataset.test), "n_dropped": dataset.n_dropped,
        "train_fraction": spec.train_fraction, "seed": spec.seed,
    }
    _emit([row], tuple(row), args)
    return 0


COMMANDS = {"eval": cmd_eval, "bench": cmd_bench, "synth": cmd_synth, "split-stats": cmd_split_stats}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except DigestMismatchError as exc:
        print(f"mtcf: correctness failure: {exc}", file=sys.stderr)
        return 2
    except (UsageError, RatingsFormatError, ValueError) as exc:
        print(f"mtcf: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        name = exc.filename if exc.filename is not None else ""
        print(f"mtcf: error: {exc.strerror or exc}: {name}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
