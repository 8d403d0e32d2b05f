"""Command-line front end: data tests, simulations, limit tables, profiles.

Exit codes: 0 success, 2 bad flags or design schema, 3 data ingestion
failure, 4 computational failure. Errors are written to stderr as a single
JSON object.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .adf import variance_profile
from .bootstrap import MULTIPLIERS, BootstrapConfig, run_bootstrap_test
from .exceptions import ConfigError, EnrichmentUnavailableError, LassorootError
from .knot_tests import (
    LagRule,
    LimitSimConfig,
    TestConfig,
    asymptotic_decision,
    auto_k_max,
    ensure_table,
    save_table,
    simulate_limit_null,
    tau_statistic,
)
from .series import Series
from .simlab import parse_design, run_mc

EXIT_FLAGS = 2
EXIT_INGEST = 3
EXIT_COMPUTE = 4

REPORT_SCHEMA = "lassoroot-report/1"
DEFAULT_CACHE = ".lassoroot-cache"


class IngestionError(Exception):
    pass


@dataclass
class DataTable:
    columns: dict  # name -> list of raw strings
    source: str

    def numeric(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise IngestionError(
                f"column {name!r} not found; available: {sorted(self.columns)}"
            )
        values = []
        for lineno, cell in self.columns[name]:
            try:
                x = float(cell)
            except ValueError:
                raise IngestionError(
                    f"{self.source}:{lineno}: non-numeric value {cell!r} "
                    f"in column {name!r}"
                ) from None
            if not np.isfinite(x):
                raise IngestionError(
                    f"{self.source}:{lineno}: non-finite value in column {name!r}"
                )
            values.append(x)
        return np.asarray(values)

    def labels(self, name: str) -> list[str]:
        if name not in self.columns:
            raise IngestionError(
                f"column {name!r} not found; available: {sorted(self.columns)}"
            )
        return [cell for _, cell in self.columns[name]]


def read_csv(path: str | Path) -> DataTable:
    path = Path(path)
    if not path.exists():
        raise IngestionError(f"input file {path} does not exist")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: empty file (header row required)") from None
        columns = {name.strip(): [] for name in header}
        names = [name.strip() for name in header]
        for lineno, row in enumerate(reader, 2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(names):
                raise IngestionError(
                    f"{path}:{lineno}: expected {len(names)} cells, got {len(row)}"
                )
            for name, cell in zip(names, row):
                columns[name].append((lineno, cell.strip()))
    return DataTable(columns, str(path))


def _subsample(values: np.ndarray, labels, args) -> np.ndarray:
    lo, hi = 0, values.size
    if args.date_column:
        if args.row_from is not None or args.row_to is not None:
            raise IngestionError("use either row-based or label-based subsampling")
        if args.from_ is not None:
            if args.from_ not in labels:
                raise IngestionError(f"label {args.from_!r} not in {args.date_column}")
            lo = labels.index(args.from_)
        if args.to is not None:
            if args.to not in labels:
                raise IngestionError(f"label {args.to!r} not in {args.date_column}")
            hi = labels.index(args.to) + 1
    else:
        if args.from_ is not None or args.to is not None:
            raise IngestionError("--from/--to need --date-column; use --row-from/--row-to")
        if args.row_from is not None:
            lo = args.row_from
        if args.row_to is not None:
            hi = args.row_to + 1
    if not 0 <= lo < hi <= values.size:
        raise IngestionError(f"subsample range [{lo}, {hi}) invalid for {values.size} rows")
    return values[lo:hi]


def _fail(code: int, kind: str, message: str) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def _emit(report: dict, fmt: str, out_path: str | None):
    if fmt == "json":
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    elif fmt == "csv":
        keys = sorted(report)
        flat = {k: json.dumps(report[k]) if isinstance(report[k], (dict, list)) else report[k]
                for k in keys}
        text = ",".join(keys) + "\n" + ",".join(str(flat[k]) for k in keys) + "\n"
    else:
        width = max(len(k) for k in report)
        text = "\n".join(f"{k.ljust(width)}  {report[k]}" for k in sorted(report)) + "\n"
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_test(args) -> int:
    try:
        table = read_csv(args.input)
        labels = table.labels(args.date_column) if args.date_column else None
        values = _subsample(table.numeric(args.column), labels, args)
        y = Series(values, label=args.column)
    except (IngestionError, LassorootError) as exc:
        return _fail(EXIT_INGEST, "ingestion", str(exc))

    try:
        if args.test == "tau-breve":
            # no enrichment provider ships with the CLI
            raise EnrichmentUnavailableError(
                "enrichment unavailable: tau-breve needs a registered provider"
            )
        k_max = auto_k_max(y.T) if args.kmax == "auto" else int(args.kmax)
        lag = LagRule(method=args.lag, k_max=k_max, fixed=k_max)
        cfg = TestConfig(detrend=args.det, lag=lag)
        report = {
            "schema": REPORT_SCHEMA,
            "version": __version__,
            "input": str(args.input),
            "column": args.column,
            "n_obs": int(y.values.size),
            "detrend": args.det,
            "test": args.test,
            "method": args.method,
            "lag_method": args.lag,
            "k_max": k_max,
            "seed": args.seed,
        }
        if args.method == "bootstrap":
            bs_cfg = BootstrapConfig(
                B=args.B,
                q="auto" if args.q == "auto" else int(args.q),
                multiplier=args.multiplier,
                seed=args.seed,
            )
            result = run_bootstrap_test(y, cfg, bs_cfg)
            report.update(
                statistic=result.observed.statistic,
                p_value=result.p_value,
                critical_value=result.cv,
                reject_5pct=result.reject,
                lag_p=result.observed.lag_p,
                q=result.q,
                B=args.B,
                multiplier=args.multiplier,
                failed_replicates=result.n_failed,
            )
        else:
            result = tau_statistic(y, cfg)
            sim_cfg = LimitSimConfig(
                steps=2000, reps=args.limit_reps, detrend=args.det, seed=7
            )
            limit = ensure_table(sim_cfg, args.cache_dir)
            reject, p = asymptotic_decision(result, 0.05, limit)
            report.update(
                statistic=result.statistic,
                p_value=p,
                critical_value=limit.quantile(0.95),
                reject_5pct=reject,
                lag_p=result.lag_p,
                limit_steps=sim_cfg.steps,
                limit_reps=sim_cfg.reps,
            )
    except LassorootError as exc:
        return _fail(EXIT_COMPUTE, "computation", str(exc))
    _emit(report, args.out, args.out_file)
    return 0


def cmd_simulate(args) -> int:
    try:
        design = parse_design(args.design)
    except (ConfigError, OSError) as exc:
        return _fail(EXIT_FLAGS, "design", str(exc))
    try:
        report = run_mc(design, cache_dir=args.cache_dir)
    except LassorootError as exc:
        return _fail(EXIT_COMPUTE, "computation", str(exc))
    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    Path(f"{prefix}.csv").write_text(report.to_csv())
    Path(f"{prefix}.md").write_text(report.to_markdown())
    print(f"wrote {prefix}.csv and {prefix}.md ({len(report.cells)} cells)")
    return 0


def cmd_limitsim(args) -> int:
    try:
        cfg = LimitSimConfig(
            steps=args.steps, reps=args.reps, detrend=args.det, c=args.c, seed=args.seed
        )
    except LassorootError as exc:
        return _fail(EXIT_FLAGS, "flags", str(exc))
    try:
        table = simulate_limit_null(cfg)
    except LassorootError as exc:
        return _fail(EXIT_COMPUTE, "computation", str(exc))
    save_table(table, args.out)
    qs = ", ".join(f"{q:.0%}: {table.quantiles[q]:.4f}" for q in sorted(table.quantiles))
    print(f"wrote {args.out} ({qs})")
    return 0


def cmd_varprofile(args) -> int:
    try:
        table = read_csv(args.input)
        labels = table.labels(args.date_column) if args.date_column else None
        values = _subsample(table.numeric(args.column), labels, args)
        if values.size < 10:
            raise IngestionError("need at least 10 observations")
    except (IngestionError, LassorootError) as exc:
        return _fail(EXIT_INGEST, "ingestion", str(exc))
    try:
        # AR(1) in levels with intercept; residuals feed the profile
        x, z = values[:-1], values[1:]
        X = np.column_stack((np.ones(x.size), x))
        beta, *_ = np.linalg.lstsq(X, z, rcond=None)
        resid = z - X @ beta
        eta = variance_profile(resid)
    except LassorootError as exc:
        return _fail(EXIT_COMPUTE, "computation", str(exc))
    grid = np.linspace(0.0, 1.0, 201)
    lines = ["s,eta_hat,reference"]
    for s, e in zip(grid, eta(grid)):
        lines.append(f"{s:.6f},{float(e)!r},{s:.6f}")
    text = "\n".join(lines) + "\n"
    if args.out_file:
        Path(args.out_file).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _add_subsample_flags(p: argparse.ArgumentParser):
    p.add_argument("--date-column", default=None,
                   help="label column used for --from/--to subsampling")
    p.add_argument("--from", dest="from_", default=None,
                   help="first label (inclusive) on --date-column")
    p.add_argument("--to", default=None, help="last label (inclusive) on --date-column")
    p.add_argument("--row-from", type=int, default=None,
                   help="first data row index (0-based, inclusive)")
    p.add_argument("--row-to", type=int, default=None,
                   help="last data row index (0-based, inclusive)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lassoroot",
        description="Adaptive-lasso activation-knot unit root tests",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run a unit root test on a CSV column")
    p.add_argument("input", help="input CSV file (header row required)")
    p.add_argument("--column", required=True, help="numeric column to test")
    _add_subsample_flags(p)
    p.add_argument("--det", choices=["constant", "trend"], default="constant")
    p.add_argument("--test", choices=["tau", "tau-breve"], default="tau")
    p.add_argument("--method", choices=["asymptotic", "bootstrap"], default="bootstrap")
    p.add_argument("--B", type=int, default=4999, help="bootstrap replications")
    p.add_argument("--q", default="auto", help="recolouring lag: auto or an integer")
    p.add_argument("--kmax", default="auto",
                   help="maximum lag order: auto = floor(12*(100/T)^0.25)")
    p.add_argument("--lag", choices=["rsmaic", "maic", "fixed"], default="rsmaic")
    p.add_argument("--multiplier", choices=list(MULTIPLIERS), default="gaussian")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", choices=["json", "csv", "text"], default="json")
    p.add_argument("--out-file", default=None, help="write the report here instead of stdout")
    p.add_argument("--cache-dir", default=DEFAULT_CACHE)
    p.add_argument("--limit-reps", type=int, default=100_000,
                   help="replications for the asymptotic critical-value table")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("simulate", help="run a Monte Carlo design file")
    p.add_argument("design", help="flat key-value design file")
    p.add_argument("--out-prefix", default="mc_report")
    p.add_argument("--cache-dir", default=DEFAULT_CACHE)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("limitsim", help="simulate asymptotic critical values")
    p.add_argument("--det", choices=["none", "constant", "trend"], default="constant")
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--reps", type=int, default=100_000)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output quantile table file")
    p.set_defaults(func=cmd_limitsim)

    p = sub.add_parser("varprofile", help="export the estimated variance profile")
    p.add_argument("input")
    p.add_argument("--column", required=True)
    _add_subsample_flags(p)
    p.add_argument("--out-file", default=None)
    p.set_defaults(func=cmd_varprofile)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
