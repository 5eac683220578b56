"""Command-line front end: ``tclevy {fit,simulate,surface,stats,pipeline}``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure (including MLE non-convergence).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .empirics import IncrementPanel, write_surface_csv
from .errors import ConfigError, DataError, TCLevyError
from .ingest import align, ingest, stats_report, write_stats_csv
from .pipeline import (
    RunConfig,
    fit_params,
    load_config,
    model_from_params,
    pipeline_run,
    read_params,
    simulate_replications,
    stage,
    surface_from_panel,
    write_params,
    write_path_csv,
)

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERICAL = 0, 2, 3, 4


def _inputs(p):
    p.add_argument("--input1", required=True, help="tick CSV of the first asset")
    p.add_argument("--input2", required=True, help="tick CSV of the second asset")
    p.add_argument("--bin-minutes", type=float, default=30.0)
    p.add_argument("--day-gap-hours", type=float, default=4.0,
                   help="a gap longer than this starts a new trading day")


def _sim(p, seed_required):
    p.add_argument("--seed", type=int, required=seed_required)
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--truncation-r", type=float, default=None)
    p.add_argument("--workers", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tclevy", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="copula MLE on trade counts and moment fit of returns")
    _inputs(p)
    p.add_argument("--threshold", type=float, default=None,
                   help="jump threshold c on per-bin trade counts")
    p.add_argument("--threshold-percentile", type=float, default=10.0)
    p.add_argument("--output", default="params.json")

    p = sub.add_parser("simulate", help="simulate model paths from a params.json")
    p.add_argument("--params", required=True)
    _sim(p, seed_required=True)
    p.add_argument("--horizon-bins", type=int, default=None,
                   help="override the horizon stored in params.json")
    p.add_argument("--output-dir", default="out")

    p = sub.add_parser("surface", help="empirical Levy copula of binned returns")
    _inputs(p)
    p.add_argument("--surface-points", type=int, default=10)
    p.add_argument("--output", default="surface.csv")

    p = sub.add_parser("stats", help="descriptive statistics of binned returns and trade counts")
    _inputs(p)
    p.add_argument("--output", default="stats.csv")

    p = sub.add_parser("pipeline", help="fit, simulate and re-estimate in one run")
    p.add_argument("--config", default=None, help="flat key=value file of run settings")
    p.add_argument("--input1", default=None)
    p.add_argument("--input2", default=None)
    p.add_argument("--bin-minutes", type=float, default=None)
    p.add_argument("--day-gap-hours", type=float, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--threshold-percentile", type=float, default=None)
    p.add_argument("--params", default=None, help="reuse a params.json instead of refitting")
    p.add_argument("--surface-points", type=int, default=None)
    p.add_argument("--output-dir", default=None)
    _sim(p, seed_required=True)
    return parser


def _aligned(args):
    with stage("ingest"):
        s1 = ingest(args.input1, args.bin_minutes, args.day_gap_hours)
        s2 = ingest(args.input2, args.bin_minutes, args.day_gap_hours)
        return s1, s2, align(s1, s2)


def cmd_fit(args):
    _, _, (_, r1, r2, c1, c2) = _aligned(args)
    params = fit_params(c1, c2, r1, r2, len(r1), args.threshold, args.threshold_percentile)
    write_params(args.output, params)
    print(json.dumps(params, sort_keys=True))


def cmd_simulate(args):
    params = read_params(args.params)
    with stage("simulate"):
        model, horizon = model_from_params(params)
        if args.horizon_bins is not None:
            horizon = args.horizon_bins
        results = simulate_replications(model, horizon, args.seed, args.replications or 1,
                                        args.truncation_r, args.workers or 1)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for k, (t, z, x, _) in enumerate(results):
        write_path_csv(out / f"paths_{k:04d}.csv", t, z, x)
    print(f"wrote {len(results)} path file(s) to {out}")


def cmd_surface(args):
    _, _, (_, r1, r2, _, _) = _aligned(args)
    with stage("surface"):
        g1, g2, m = surface_from_panel(IncrementPanel(1.0, r1, r2), args.surface_points)
    write_surface_csv(args.output, g1, g2, m)
    print(f"wrote {args.output}")


def cmd_stats(args):
    s1, s2, (_, r1, r2, c1, c2) = _aligned(args)
    rows = {"returns1": stats_report(r1), "returns2": stats_report(r2),
            "trades1": stats_report(c1), "trades2": stats_report(c2)}
    write_stats_csv(args.output, rows)
    for name, report in (("input1", s1.report), ("input2", s2.report)):
        print(f"{name}: rows={report.rows_read} days={report.days} "
              f"bins={report.bins_retained} dropped={report.bins_dropped}")


PIPELINE_KEYS = ("input1", "input2", "bin_minutes", "day_gap_hours", "threshold",
                 "threshold_percentile", "params", "surface_points", "output_dir",
                 "seed", "replications", "truncation_r", "workers")


def cmd_pipeline(args):
    overrides = {k: getattr(args, k) for k in PIPELINE_KEYS}
    if args.config is not None:
        config = load_config(args.config, **overrides)
    else:
        config = RunConfig(**{k: v for k, v in overrides.items() if v is not None}).validate()
    result = pipeline_run(config)
    for f in result.files:
        print(f)


COMMANDS = {"fit": cmd_fit, "simulate": cmd_simulate, "surface": cmd_surface,
            "stats": cmd_stats, "pipeline": cmd_pipeline}


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, DataError):
        return EXIT_DATA
    return EXIT_NUMERICAL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    np.seterr(all="ignore")
    try:
        COMMANDS[args.command](args)
    except TCLevyError as exc:
        print(f"tclevy {args.command}: {exc}", file=sys.stderr)
        return exit_code(exc)
    except OSError as exc:
        print(f"tclevy {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
