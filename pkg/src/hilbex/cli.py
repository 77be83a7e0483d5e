"""Command-line driver for the experiment suites.

Subcommands: ``gen``, ``profile``, ``power``, ``query-bench``, ``plot-data``.
Output is CSV (one ``#`` timestamp comment line first) unless ``--markdown``.

Exit codes: 0 success, 2 input error, 3 verification failure, 4 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import datetime
import io
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis, bench, data, reference
from .errors import CalibrationError, ConfigurationError, InputError, VerificationError
from .index import DEFAULT_LEAF_CAPACITY, check_strategy
from .metrics import get_metric

log = logging.getLogger("hilbex")

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_CONFIG = 0, 2, 3, 4


def _add_dataset_args(p, need_metric=True):
    p.add_argument("--data", type=Path, help="vector file (text or HLBX1 binary)")
    p.add_argument("--space", help="space label, e.g. euc_10; generates data when --data is absent")
    p.add_argument("--n", type=int, default=100_000, help="points to generate with --space (default 100000)")
    p.add_argument("--seed", type=int, default=42)
    if need_metric:
        p.add_argument("--metric", help="metric name; defaults to the space label's metric")
    p.add_argument("--out", type=Path, help="output file (default stdout)")
    p.add_argument("--force", action="store_true", help="overwrite --out if it exists")
    p.add_argument("--markdown", action="store_true", help="render a markdown table instead of CSV")


def _add_threshold_args(p, multiple=True):
    p.add_argument("--threshold", action="append" if multiple else "store",
                   help="numeric threshold or label t1..t32 (repeatable)" if multiple else "numeric or t1..t32")
    p.add_argument("--per-million", type=float, action="append" if multiple else "store",
                   help="calibrate a threshold returning this many results per million")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hilbex", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic dataset")
    g.add_argument("--space", required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--out", type=Path, required=True, help=".txt for text, anything else for binary")
    g.add_argument("--force", action="store_true")

    p = sub.add_parser("profile", help="intrinsic dimensionality and t1..t32")
    _add_dataset_args(p)
    p.add_argument("--pairs", type=int, default=200_000, help="distance pairs sampled for IDIM")
    p.add_argument("--queries", type=int, help="held-out calibration queries (default: automatic)")

    w = sub.add_parser("power", help="exclusion-power table")
    _add_dataset_args(w)
    _add_threshold_args(w)
    w.add_argument("--trials", type=int, default=1_000_000, help="maximum trials per column")
    w.add_argument("--rel-sem", type=float, default=0.01, help="stop when SEM < this fraction of the mean")

    q = sub.add_parser("query-bench", help="mean distance calls per query for GHT/MHT")
    _add_dataset_args(q)
    _add_threshold_args(q)
    q.add_argument("--tree", action="append", choices=("ght", "mht"))
    q.add_argument("--strategy", action="append", choices=("hyperbolic", "hilbert", "cover"))
    q.add_argument("--leaf-capacity", type=int, default=DEFAULT_LEAF_CAPACITY)
    q.add_argument("--queries", type=int, default=1000)
    q.add_argument("--verify", action="store_true", help="check every result set against a linear scan")

    d = sub.add_parser("plot-data", help="planar exclusion picture for 500 points and one pivot pair")
    _add_dataset_args(d)
    _add_threshold_args(d, multiple=False)
    d.add_argument("--points", type=int, default=500)
    return parser


# -- helpers ---------------------------------------------------------------------

def _load(args):
    """Return (Dataset, metric, space label)."""
    if args.data is None and args.space is None:
        raise InputError("give --data or --space")
    space = args.space or ""
    metric_name = getattr(args, "metric", None)
    if args.data is not None:
        ds = data.load_vectors(args.data)
        if not space:
            space = args.data.stem if "_" in args.data.stem else ""
    else:
        ds = data.generate_space(space, args.n, args.seed)
    if metric_name:
        metric = get_metric(metric_name)
    elif space:
        metric = data.parse_space(space)[0]
    else:
        raise InputError("cannot infer the metric; pass --metric or --space")
    ds = data.prepare_for_metric(ds, metric)
    if not space:
        space = f"{metric.name}_{ds.dim}"
    return ds, metric, space


def _thresholds(args, ds, metric, space, multiple=True) -> dict:
    raw = args.threshold if multiple else ([args.threshold] if args.threshold else [])
    pm = args.per_million if multiple else ([args.per_million] if args.per_million else [])
    raw, pm = raw or [], pm or []
    if not raw and not pm:
        raise InputError("give at least one --threshold or --per-million")
    out = {}
    for item in raw:
        if item in reference.T_TARGETS:
            if space in reference.PROFILES:
                out[item] = reference.threshold(space, item)
            else:
                out[item] = analysis.calibrate_threshold(ds.vectors, metric, reference.T_TARGETS[item], args.seed)
        else:
            try:
                value = float(item)
            except ValueError:
                raise InputError(f"bad threshold {item!r}") from None
            if not value > 0:
                raise InputError("thresholds must be positive")
            out[f"{value:g}"] = value
    for k in pm:
        out[f"pm{k:g}"] = analysis.calibrate_threshold(ds.vectors, metric, k, args.seed)
    return out


def _markdown(text: str) -> str:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    if not rows:
        return ""
    lines = ["| " + " | ".join(rows[0]) + " |", "|" + "---|" * len(rows[0])]
    lines += ["| " + " | ".join(r) + " |" for r in rows[1:]]
    return "\n".join(lines) + "\n"


def _emit(args, writer, payload, command):
    buf = io.StringIO()
    writer(payload, buf)
    text = buf.getvalue()
    if getattr(args, "markdown", False):
        text = _markdown(text)
    else:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
        text = f"# hilbex {command} generated {stamp}\n" + text
    out = getattr(args, "out", None)
    if out is None:
        sys.stdout.write(text)
        return
    _check_overwrite(out, args.force)
    out.write_text(text)


def _check_overwrite(path: Path, force: bool):
    if path.exists() and not force:
        raise InputError(f"{path} exists; pass --force to overwrite")


# -- commands ----------------------------------------------------------------------

def cmd_gen(args):
    _check_overwrite(args.out, args.force)
    ds = data.generate_space(args.space, args.n, args.seed)
    data.save_vectors(ds, args.out)
    log.info("wrote %d x %d vectors to %s", len(ds), ds.dim, args.out)


def cmd_profile(args):
    ds, metric, space = _load(args)
    prof = analysis.profile_space(ds.vectors, metric, args.seed, args.pairs, args.queries, space)
    _emit(args, analysis.write_profile_csv, [prof], "profile")


def cmd_power(args):
    ds, metric, space = _load(args)
    ts = _thresholds(args, ds, metric, space)
    results = analysis.power_table(ds.vectors, metric, ts, args.seed, max_trials=args.trials,
                                   rel_sem=args.rel_sem, space=space)
    value = analysis.idim(ds.vectors, metric, seed=args.seed)
    for r in results:
        r.idim = value
    _emit(args, analysis.write_power_csv, results, "power")


def cmd_query_bench(args):
    ds, metric, space = _load(args)
    strategies = bench.strategies_from_names(args.strategy or ["hyperbolic", "hilbert"])
    for s in strategies:
        check_strategy(metric, s)  # fail before any heavy work
    if args.leaf_capacity < 1:
        raise InputError("--leaf-capacity must be positive")
    if not 0 < args.queries < len(ds):
        raise InputError(f"--queries must lie in (0, {len(ds)})")
    ts = _thresholds(args, ds, metric, space)
    rows = bench.cost_benchmark(ds.vectors, metric, ts, trees=args.tree or ["ght", "mht"], strategies=strategies,
                                n_queries=args.queries, seed=args.seed, leaf_capacity=args.leaf_capacity,
                                verify=args.verify, space=space)
    _emit(args, bench.write_cost_csv, rows, "query-bench")
    bad = sum(r.mismatches or 0 for r in rows)
    if bad or any(r.dominance is False for r in rows):
        raise VerificationError(f"{bad} result-set mismatches; dominance "
                                f"{'violated' if any(r.dominance is False for r in rows) else 'ok'}")


def cmd_plot_data(args):
    ds, metric, space = _load(args)
    ts = _thresholds(args, ds, metric, space, multiple=False)
    t = next(iter(ts.values()))
    if len(ds) < args.points + 2:
        raise InputError(f"need at least {args.points + 2} points")
    rng = np.random.default_rng(args.seed)
    pick = rng.choice(len(ds), size=args.points + 2, replace=False)
    pts = ds.vectors
    rows = analysis.power_plot_data(pts[pick[2:]], pts[pick[0]], pts[pick[1]], metric, t)
    _emit(args, analysis.write_plot_csv, rows, "plot-data")


COMMANDS = {
    "gen": cmd_gen,
    "profile": cmd_profile,
    "power": cmd_power,
    "query-bench": cmd_query_bench,
    "plot-data": cmd_plot_data,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        COMMANDS[args.command](args)
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InputError, CalibrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
