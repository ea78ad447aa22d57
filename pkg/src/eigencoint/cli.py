"""Command-line front end.

Four commands::

    eigencoint analyze  --input panel.csv [--j0 5] [--methods ratio,ic]
                        [--penalty omega2] [--level 0.05] [--seed 0] [--out report.json]
    eigencoint simulate (--plan plan.json | --preset example2) [--reps 200]
                        [--cells 6,2;10,4] [--n 300,1000] [--estimators ratio,...]
                        [--seed 0] [--parallelism 1] [--out report.csv]
                        [--format csv|json] [--replicates-out reps.csv]
    eigencoint crit     --dim 1..3 [--level 0.05] [--T 1000] [--reps 6000]
                        [--seed 0] --out cache.json
    eigencoint version

Exit codes: 0 success, 2 usage or input error, 3 numerical failure.  All
numeric work is delegated to the library modules; this layer only parses
arguments and files and formats output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .baselines import (
    CriticalTable,
    sequential_unit_root,
    trace_critical_table,
    unit_root_critical_table,
)
from .errors import EigencointError
from .harness import ESTIMATORS, load_plan, preset_plan, run_plan, emit_report, emit_replicates
from .ranksel import PenaltySpec, fit, penalty, rank_ic, rank_ratio, split

_ANALYZE_METHODS = ("ratio", "ic", "unitroot")


@dataclass(frozen=True)
class AnalyzeConfig:
    """Validated arguments of the ``analyze`` command."""

    input: str
    j0: int = 5
    methods: tuple = ("ratio", "ic")
    penalty: PenaltySpec = PenaltySpec("omega2")
    level: float = 0.05
    seed: int = 0
    out: str = ""

    def __post_init__(self):
        if self.j0 < 0:
            raise ValueError(f"need j0 >= 0, got {self.j0}")
        if not 0.0 < self.level < 0.5:
            raise ValueError(f"need level in (0, 0.5), got {self.level}")
        if not self.methods:
            raise ValueError("need at least one method")
        for m in self.methods:
            if m not in _ANALYZE_METHODS:
                raise ValueError(f"unknown method {m!r}; expected {_ANALYZE_METHODS}")


class _InputError(Exception):
    """User-facing input problem; maps to exit code 2."""


def _read_panel_csv(path: str) -> np.ndarray:
    """Parse a panel CSV: optional header row, then rows = time points.

    Raises
    ------
    _InputError
        With the offending line (and row/column for bad cells) named.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln.rstrip("\n").rstrip("\r") for ln in fh]
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    rows = [(i + 1, ln.split(",")) for i, ln in enumerate(lines) if ln.strip() != ""]
    if not rows:
        raise _InputError(f"{path}: no data rows")

    def numeric(fields):
        try:
            [float(f) for f in fields]
            return True
        except ValueError:
            return False

    start = 0
    if not numeric(rows[0][1]):
        start = 1  # header row
        if len(rows) == 1:
            raise _InputError(f"{path}: header only, no data rows")
    width = len(rows[start][1])
    data = []
    for lineno, fields in rows[start:]:
        if len(fields) != width:
            raise _InputError(
                f"{path}: line {lineno} has {len(fields)} fields, expected {width}"
            )
        values = []
        for col, field in enumerate(fields, start=1):
            try:
                values.append(float(field))
            except ValueError:
                raise _InputError(
                    f"{path}: non-numeric cell {field!r} at row {lineno}, "
                    f"column {col}"
                ) from None
        data.append(values)
    return np.array(data, dtype=float)


def _derived_paths(config: AnalyzeConfig):
    out = config.out
    if not out:
        stem = os.path.splitext(config.input)[0]
        out = stem + "_report.json"
    xhat = os.path.splitext(out)[0] + "_xhat.csv"
    return out, xhat


def cmd_analyze(config: AnalyzeConfig) -> int:
    y = _read_panel_csv(config.input)
    n, p = y.shape
    if n <= config.j0 + 1:
        raise _InputError(
            f"{config.input}: {n} rows is too short for j0={config.j0} "
            f"(need n > j0 + 1)"
        )
    fitted = fit(y, config.j0)
    report = {
        "input": config.input,
        "n": n,
        "p": p,
        "j0": config.j0,
        "eigenvalues": [float(v) for v in fitted.eigen.values],
    }
    ranks = {}
    if "ratio" in config.methods:
        ranks["ratio"] = rank_ratio(fitted.eigen, n)
    if "ic" in config.methods:
        omega = penalty(config.penalty, n, fitted.eigen.values[-1])
        ranks["ic"] = rank_ic(fitted.eigen, omega)
        report["penalty"] = {
            "variant": config.penalty.variant,
            "omega": float(omega),
        }
    if "unitroot" in config.methods:
        crit = unit_root_critical_table(
            n=n, levels=(config.level,), seed=config.seed
        )
        ranks["unitroot"] = sequential_unit_root(fitted.x_hat, config.level, crit)
        report["level"] = config.level
    report["ranks"] = ranks
    # A2 uses the rank of the first requested method.
    r_sel = ranks[config.methods[0]]
    a2 = split(fitted, r_sel)[1]
    report["selected_r"] = r_sel
    report["a2"] = [[float(v) for v in row] for row in a2]

    out, xhat_path = _derived_paths(config)
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    header = ",".join(f"x{i + 1}" for i in range(p))
    body = "\n".join(
        ",".join(repr(float(v)) for v in row) for row in fitted.x_hat
    )
    with open(xhat_path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n" + body + "\n")
    print(f"wrote {out} and {xhat_path}")
    return 0


def _print_tables(report) -> None:
    """Benchmark-style layout: per scenario, estimator rows x sample-size
    columns, a block of correct-rank frequencies then one of mean distances."""
    n_grid = list(report.plan.n_grid)
    by_key = {(c.scenario, c.estimator, c.n): c for c in report.cells}
    names = []
    for tpl in report.plan.scenarios:
        if tpl.name not in names:
            names.append(tpl.name)
    width = max([len(e) for e in report.plan.estimators] + [9])
    for name in names:
        tpl = next(t for t in report.plan.scenarios if t.name == name)
        print(f"scenario {name} (p={tpl.p}, r={tpl.r})")
        header = " " * (width + 2) + "".join(f"{'n=' + str(n):>10}" for n in n_grid)
        for label, attr in (("correct-rank frequency", "freq_correct"),
                            ("mean distance", "dist_mean")):
            print(f"  {label}")
            print(header)
            for est in report.plan.estimators:
                cells = [by_key.get((name, est, n)) for n in n_grid]
                row = "".join(
                    f"{getattr(c, attr):>10.3f}" if c is not None else f"{'--':>10}"
                    for c in cells
                )
                print(f"  {est:<{width}}{row}")
        print()


def cmd_simulate(args) -> int:
    if (args.plan is None) == (args.preset is None):
        raise _InputError("simulate needs exactly one of --plan or --preset")
    try:
        if args.plan is not None:
            plan = load_plan(args.plan)
            overrides = {}
            if args.reps is not None:
                overrides["reps"] = args.reps
            if args.seed is not None:
                overrides["master_seed"] = args.seed
            if args.parallelism is not None:
                overrides["parallelism"] = args.parallelism
            if overrides:
                data = plan.to_dict()
                data.update(overrides)
                plan = load_plan(data)
        else:
            kwargs = {}
            if args.cells:
                kwargs["cells"] = [
                    tuple(int(v) for v in cell.split(","))
                    for cell in args.cells.split(";")
                ]
            if args.n:
                kwargs["n_grid"] = tuple(int(v) for v in args.n.split(","))
            if args.estimators:
                kwargs["estimators"] = tuple(args.estimators.split(","))
            plan = preset_plan(
                args.preset,
                reps=args.reps if args.reps is not None else 200,
                master_seed=args.seed if args.seed is not None else 0,
                parallelism=args.parallelism if args.parallelism is not None else 1,
                **kwargs,
            )
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        raise _InputError(f"invalid plan: {exc}") from exc

    report = run_plan(plan)
    _print_tables(report)
    out = args.out or f"simulation_report.{args.format}"
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(emit_report(report, format=args.format))
    written = [out]
    if args.replicates_out:
        with open(args.replicates_out, "w", encoding="utf-8") as fh:
            fh.write(emit_replicates(report))
        written.append(args.replicates_out)
    print("wrote " + " and ".join(written))
    return 0


def _parse_dims(text: str):
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(v) for v in text.split(","))


def cmd_crit(args) -> int:
    if args.reps < 1000:
        raise _InputError(f"need reps >= 1000, got {args.reps}")
    try:
        dims = _parse_dims(args.dim)
    except ValueError as exc:
        raise _InputError(f"bad --dim {args.dim!r}: {exc}") from exc
    table = trace_critical_table(
        dims=dims, levels=(args.level,), T=args.T, reps=args.reps, seed=args.seed
    )
    if os.path.exists(args.out):
        try:
            with open(args.out, encoding="utf-8") as fh:
                existing = CriticalTable.from_dict(json.load(fh))
            table = existing.merged(table)
        except (ValueError, KeyError, json.JSONDecodeError):
            pass  # incompatible or corrupt cache: replace it
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(table.to_json())
    print(f"wrote {args.out} (dims {list(table.dims)}, levels {list(table.levels)})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigencoint",
        description="Cointegration analysis by eigenanalysis of a quadratic "
        "lag-covariance matrix.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="estimate cointegration rank and space "
                        "from a CSV panel (rows = time points)")
    pa.add_argument("--input", required=True, help="panel CSV path")
    pa.add_argument("--j0", type=int, default=5, help="max lag (default 5)")
    pa.add_argument("--methods", default="ratio,ic",
                    help="comma list from ratio,ic,unitroot (default ratio,ic)")
    pa.add_argument("--penalty", default="omega2",
                    help="omega1|omega2|omega3|custom=VALUE (default omega2)")
    pa.add_argument("--level", type=float, default=0.05,
                    help="unit-root test size (default 0.05)")
    pa.add_argument("--seed", type=int, default=0,
                    help="seed for the unit-root critical-value simulation")
    pa.add_argument("--out", default="",
                    help="report JSON path (default <input>_report.json; the "
                    "transformed panel goes to <out>_xhat.csv)")

    ps = sub.add_parser("simulate", help="run a Monte Carlo experiment plan")
    ps.add_argument("--plan", help="plan JSON path")
    ps.add_argument("--preset", help="benchmark preset: example1|example2|example3")
    ps.add_argument("--reps", type=int, help="replicates per cell")
    ps.add_argument("--cells", help="preset cell subset, e.g. '6,2;10,4'")
    ps.add_argument("--n", help="sample-size subset, e.g. '300,1000'")
    ps.add_argument("--estimators", help="comma list, e.g. 'ratio,ic_omega2'")
    ps.add_argument("--seed", type=int, help="master seed (default 0)")
    ps.add_argument("--parallelism", type=int, help="worker processes (default 1)")
    ps.add_argument("--out", default="", help="report path (default "
                    "simulation_report.<format>)")
    ps.add_argument("--format", choices=("csv", "json"), default="csv")
    ps.add_argument("--replicates-out", default="",
                    help="also write per-replicate distances CSV (boxplot data)")

    pc = sub.add_parser("crit", help="simulate and cache trace critical values")
    pc.add_argument("--dim", required=True,
                    help="dimensions: '3', '1,2,3', or '1..3'")
    pc.add_argument("--level", type=float, default=0.05)
    pc.add_argument("--T", type=int, default=1000, help="inner sample length")
    pc.add_argument("--reps", type=int, default=6000)
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--out", required=True, help="cache JSON path")

    sub.add_parser("version", help="print version and exit")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "version":
            print(__version__)
            return 0
        if args.command == "analyze":
            try:
                spec = _parse_penalty(args.penalty)
                config = AnalyzeConfig(
                    input=args.input,
                    j0=args.j0,
                    methods=tuple(m.strip() for m in args.methods.split(",") if m.strip()),
                    penalty=spec,
                    level=args.level,
                    seed=args.seed,
                    out=args.out,
                )
            except ValueError as exc:
                raise _InputError(str(exc)) from exc
            return cmd_analyze(config)
        if args.command == "simulate":
            return cmd_simulate(args)
        return cmd_crit(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EigencointError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


def _parse_penalty(text: str) -> PenaltySpec:
    if text.startswith("custom="):
        try:
            value = float(text.split("=", 1)[1])
        except ValueError:
            raise ValueError(f"bad custom penalty {text!r}") from None
        return PenaltySpec("custom", value)
    return PenaltySpec(text)


if __name__ == "__main__":
    sys.exit(main())
