"""Command-line front end.

    gameinteract generate FAMILY COUNT [--seed S] [--out FILE]
    gameinteract exact MODEL [--span SPAN] [--semantics ...] [--components]
    gameinteract estimate MODEL [--span SPAN] [--seed S] [--epochs K1] ...
    gameinteract eval --protocol accuracy|error|instability|convergence --dataset FILE ...

Exit codes: 0 success, 2 usage or format error, 3 capacity exceeded,
4 numeric degeneracy.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .estimator import EPS, EstimatorConfig, derive_seed, estimate_T
from .evaluation import (
    METHODS,
    accuracy_table,
    convergence_trace,
    error_vs_exact,
    instability_sweep,
)
from .exact import EXACT_MAX_PLAYERS, SEMANTICS, exact_T
from .exceptions import CapacityError, DegenerateError, FormatError
from .game import model_from_json
from .reports import accuracy_rows, trace_rows, write_csv, write_json
from .synthetic import FAMILIES, SyntheticModel, generate_dataset, read_manifest, write_manifest

logger = logging.getLogger("gameinteract")

EXIT_OK, EXIT_USAGE, EXIT_CAPACITY, EXIT_DEGENERATE = 0, 2, 3, 4


def parse_span(text: str | None) -> list[int] | None:
    """``"2-5"`` (inclusive) or ``"2,3,4,5"``; players are 0-based."""
    if text is None:
        return None
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise FormatError(f"empty span {text!r}")
    return sorted(set(out))


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def read_model(path: str, index: int = 0):
    """Game and default span from a model JSON file or a JSON-lines manifest.

    For a manifest, ``index`` picks the line; its span becomes the default.
    """
    with open(path) as fh:
        text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not 0 <= index < len(lines):
            raise FormatError(f"{path}: no model at line index {index}") from None
        try:
            obj = json.loads(lines[index])
        except json.JSONDecodeError as err:
            raise FormatError(f"{path}: invalid JSON on line {index + 1} ({err})") from err
    if not isinstance(obj, dict):
        raise FormatError(f"{path}: expected a JSON object")
    span = obj.get("A") if "model" in obj else None
    return model_from_json(obj.get("model", obj)), span


def run_config(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "verbose")}
    cfg["version"] = __version__
    return cfg


def estimator_config(args) -> EstimatorConfig:
    return EstimatorConfig(
        n_epochs=args.epochs,
        n_partition_samples=args.partition_samples,
        n_subset_samples=args.subset_samples,
        learning_rate=args.lr,
        seed=args.seed,
        semantics=args.semantics,
        eps=args.eps,
        final_partition_samples=args.final_samples,
    )


def cmd_generate(args) -> int:
    models = generate_dataset(args.family, args.count, args.seed)
    if args.out in (None, "-"):
        for m in models:
            sys.stdout.write(json.dumps(m.to_json(), sort_keys=True) + "\n")
    else:
        write_manifest(models, args.out)
    logger.info("wrote %d %s models", len(models), args.family)
    return EXIT_OK


def cmd_exact(args) -> int:
    game, span = read_model(args.model, args.index)
    members = parse_span(args.span) or span or list(range(game.n))
    rep = exact_T(game, members, semantics=args.semantics, contiguous_only=args.contiguous,
                  components=args.components, max_players=args.max_players)
    write_json(args.out, rep.to_json(), run_config(args))
    return EXIT_OK


def cmd_estimate(args) -> int:
    game, span = read_model(args.model, args.index)
    members = parse_span(args.span) or span or list(range(game.n))
    rep = estimate_T(game, members, estimator_config(args))
    cfg = run_config(args)
    write_json(args.out, rep.to_json(), cfg)
    if args.trace_csv:
        for direction, trace in (("max", rep.trace_max), ("min", rep.trace_min)):
            if trace is not None:
                header, rows = trace_rows(trace)
                write_csv(f"{args.trace_csv}.{direction}.csv", header, rows, cfg)
    return EXIT_OK


def _load_datasets(paths) -> dict[str, list[SyntheticModel]]:
    out: dict[str, list[SyntheticModel]] = {}
    for path in paths:
        try:
            models = read_manifest(path)
        except (json.JSONDecodeError, KeyError, TypeError) as err:
            raise FormatError(f"{path}: not a dataset manifest ({err})") from err
        if not models:
            raise FormatError(f"{path}: empty dataset")
        name = models[0].family
        if name in out:
            name = path
        out[name] = models
    return out


def _emit(args, header, rows, record: dict) -> None:
    cfg = run_config(args)
    if args.out and args.out.endswith(".json"):
        write_json(args.out, record, cfg)
    else:
        write_csv(args.out, header, rows, cfg)


def cmd_eval(args) -> int:
    datasets = _load_datasets(args.dataset)
    config = estimator_config(args)
    n_jobs = args.workers
    if args.protocol == "accuracy":
        methods = args.method or ["ours"]
        table = accuracy_table(datasets, methods, config, n_jobs=n_jobs)
        header, rows = accuracy_rows(table)
        record = {"accuracy": {m: {d: r.to_json() for d, r in row.items()} for m, row in table.items()}}
        _emit(args, header, rows, record)
        return EXIT_OK

    models = [m for ds in datasets.values() for m in ds]
    if args.limit is not None:
        models = models[: args.limit]
    if args.protocol == "error":
        curve = error_vs_exact(models, config, args.checkpoints)
        rel = curve.relative_errors
        rows = [[gid, e, y] for gid, e, _, y in curve.rows()]
        rows += [["median", e, float(np.median(rel[:, ci]))] for ci, e in enumerate(curve.epochs)]
        record = {"epochs": curve.epochs, "T_truth": curve.T_truth, "T_hat": curve.T_hat,
                  "relative_errors": rel, "median": np.median(rel, axis=0)}
        _emit(args, ["game_id", "x", "y"], rows, record)
    elif args.protocol == "instability":
        sweep = instability_sweep(models, args.budgets, args.repeats, config)
        rows = [[gi, b, float(sweep.per_game[gi, bi])] for gi in range(len(models))
                for bi, b in enumerate(sweep.budgets)]
        rows += [["median", b, v] for b, v in zip(sweep.budgets, sweep.medians)]
        record = {"budgets": sweep.budgets, "medians": sweep.medians,
                  "n_degenerate": sweep.n_degenerate, "per_game": sweep.per_game}
        _emit(args, ["game_id", "x", "y"], rows, record)
    else:
        rows, record = [], {"traces": []}
        for gi, model in enumerate(models):
            tr = convergence_trace(model, replace(config, seed=derive_seed(config.seed, 50, gi)))
            for b, label in enumerate(tr.labels):
                rows += [[gi, b + 1, label, e, float(tr.p[e, b])] for e in range(tr.p.shape[0])]
            record["traces"].append({"game_id": gi, "labels": tr.labels, "final": tr.final,
                                     "non_converging": tr.non_converging})
        _emit(args, ["game_id", "boundary", "label", "x", "y"], rows, record)
    return EXIT_OK


def _estimator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="64-bit root seed (default: 0)")
    p.add_argument("--epochs", type=int, default=100, help="gradient steps K1 (default: 100)")
    p.add_argument("--partition-samples", type=int, default=8, help="boundary draws per step K2 (default: 8)")
    p.add_argument("--subset-samples", type=int, default=256, help="subset draws per partition K3 (default: 256)")
    p.add_argument("--lr", type=float, default=0.1, help="learning rate (default: 0.1)")
    p.add_argument("--eps", type=float, default=EPS, help="probability clamp (default: %(default)s)")
    p.add_argument("--final-samples", type=int, default=None,
                   help="partition draws for the final re-estimate (default: 4 x K2)")
    p.add_argument("--semantics", choices=SEMANTICS, default="exclusive")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gameinteract", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic dataset manifest")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("count", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-", help="manifest path (default: stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("exact", help="exact interaction analysis by enumeration")
    p.add_argument("model", help="model JSON file or dataset manifest")
    p.add_argument("--index", type=int, default=0, help="manifest line to analyze")
    p.add_argument("--span", help="target players, e.g. 2-5 or 1,3,4 (0-based)")
    p.add_argument("--semantics", choices=SEMANTICS, default="exclusive")
    p.add_argument("--contiguous", action=argparse.BooleanOptionalAction, default=True,
                   help="search contiguous partitions only (default: on)")
    p.add_argument("--components", action="store_true", help="include elementary components")
    p.add_argument("--max-players", type=int, default=EXACT_MAX_PLAYERS)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("estimate", help="sampling estimate of interaction significance")
    p.add_argument("model")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--span")
    _estimator_flags(p)
    p.add_argument("--out", default="-")
    p.add_argument("--trace-csv", help="prefix for PREFIX.max.csv / PREFIX.min.csv traces")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("eval", help="benchmark protocols on dataset manifests")
    p.add_argument("--protocol", choices=("accuracy", "error", "instability", "convergence"),
                   default="accuracy")
    p.add_argument("--method", action="append", choices=METHODS,
                   help="repeatable; accuracy protocol only (default: ours)")
    p.add_argument("--dataset", action="append", required=True, help="manifest path, repeatable")
    p.add_argument("--limit", type=int, help="use only the first N models (curve protocols)")
    p.add_argument("--checkpoints", type=_int_list, default=[0, 10, 25, 50, 100])
    p.add_argument("--budgets", type=_int_list, default=[100, 500, 1000, 2000, 5000])
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--ordered-reduce", action="store_true",
                   help="accepted for compatibility; results are always reduced in dataset order")
    _estimator_flags(p)
    p.add_argument("--out", default="-", help="CSV by default, JSON if the name ends in .json")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CapacityError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CAPACITY
    except DegenerateError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ValueError, OSError, KeyError, TypeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
