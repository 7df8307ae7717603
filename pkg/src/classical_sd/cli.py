"""Command-line front end.

Exit codes: 0 on success (a market that does not trade is a result, not a
failure), 1 on usage or input errors, 2 when a Leontief economy is not
productive.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from classical_sd.aggregation import run_convergence, run_convexity_emergence
from classical_sd.leontief import LeontiefEconomy, NonProductiveError, labor_values, productivity_check, relative_prices
from classical_sd.relations import read_profiles_csv, relation_table
from classical_sd.scenario import ScenarioError, SmoothModel, arange_inclusive, parse_scenario, parse_smooth
from classical_sd.schedules import build_demand, build_supply, cross, default_grid, max_surplus
from classical_sd.smooth import second_differences

EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def parse_grid(spec: str) -> list[float]:
    """``start:stop:step`` (stop inclusive) or a comma-separated list of prices."""
    try:
        if ":" in spec:
            start, stop, step = (float(x) for x in spec.split(":"))
            return arange_inclusive(start, stop, step)
        grid = [float(x) for x in spec.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --grid {spec!r}: {exc}") from exc
    if not grid or any(not math.isfinite(p) or p < 0 for p in grid):
        raise UsageError(f"bad --grid {spec!r}: prices must be finite and >= 0")
    return sorted(set(grid))


def cmd_schedule(args) -> int:
    sc = parse_scenario(args.scenario)
    demand, supply = build_demand(sc.values), build_supply(sc.costs)
    sides = ["demand", "supply"] if args.side == "both" else [args.side]
    chosen = {"demand": demand, "supply": supply}
    if args.format == "json":
        _emit(_json({side: chosen[side].to_dict() for side in sides}), args.out)
        return 0
    grid = parse_grid(args.grid) if args.grid else default_grid(*(chosen[s] for s in sides))
    header = ["price"] + [f"{s}_qty" for s in sides]
    rows = ([p] + [int(chosen[s](p)) for s in sides] for p in grid)
    _emit(_csv(header, rows), args.out)
    return 0


def cmd_equilibrium(args) -> int:
    sc = parse_scenario(args.scenario)
    result = cross(build_demand(sc.values), build_supply(sc.costs))
    out = result.to_dict()
    out["surplus"] = max_surplus(sc.values, sc.costs)
    _emit(_json(out), args.out)
    return 0


def _smooth_model(args) -> SmoothModel:
    if args.scenario:
        sc = parse_scenario(args.scenario)
        if sc.smooth is None:
            raise UsageError(f"{args.scenario} has no smooth block")
        return sc.smooth
    block = {"side": args.side, "family": args.family, "capacity": args.capacity, "power": args.power}
    if args.support:
        block["low"], block["high"] = args.support
    elif args.vmax is not None:
        block["high"] = args.vmax
    else:
        raise UsageError("give --vmax or --support (or a scenario with a smooth block)")
    if args.density:
        block["density"] = [float(x) for x in args.density.split(",")]
    return parse_smooth(block, "smooth")


def cmd_smooth(args) -> int:
    model = _smooth_model(args)
    grid = parse_grid(args.grid) if args.grid else arange_inclusive(0.0, model.high, (model.high - model.low) / 100)
    x = np.asarray(grid)
    q = model.schedule(x)
    sign = -1.0 if model.side == "demand" else 1.0
    inside = (x > model.low) & (x < model.high)
    slopes = [sign * model.capacity * float(model.pdf(p)) if ok else None for p, ok in zip(x, inside)]
    d2 = [None] + [float(v) for v in second_differences(x, q)] + [None] if x.size >= 3 else [None] * x.size
    rows = zip(x.tolist(), q.tolist(), slopes, d2)
    _emit(_csv(["price", "quantity", "slope", "second_difference"], rows), args.out)
    return 0


def _read_numeric_csv(path: str) -> tuple[list[str] | None, list[list[float]]]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if any(cell.strip() for cell in r)]
    header = None
    if rows:
        try:
            [float(c) for c in rows[0]]
        except ValueError:
            header, rows = [c.strip() for c in rows[0]], rows[1:]
    try:
        data = [[float(c) for c in r] for r in rows]
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc
    return header, data


def cmd_leontief(args) -> int:
    goods: list[str] = []
    if args.scenario:
        sc = parse_scenario(args.scenario)
        if sc.leontief is None:
            raise UsageError(f"{args.scenario} has no leontief block")
        economy, goods = sc.leontief, sc.goods
    else:
        if not args.labor:
            raise UsageError("give --labor (and --matrix) or a scenario with a leontief block")
        _, labor_rows = _read_numeric_csv(args.labor)
        labor = [x for row in labor_rows for x in row]
        n = len(labor)
        if args.matrix:
            header, matrix = _read_numeric_csv(args.matrix)
            goods = header or []
        else:
            matrix = [[0.0] * n for _ in range(n)]
        if len(matrix) != n or any(len(r) != n for r in matrix):
            raise UsageError(f"dimension mismatch: matrix must be {n}x{n} to match the labor vector")
        try:
            economy = LeontiefEconomy(np.array(matrix), np.array(labor))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    goods = goods or [f"good{i + 1}" for i in range(economy.n)]
    values = labor_values(economy)
    check = productivity_check(economy.A)
    out = {
        "goods": goods,
        "labor_values": values.tolist(),
        "relative_prices": relative_prices(values).tolist() if np.all(values > 0) else None,
        "spectral_radius": check.spectral_radius,
    }
    _emit(_json(out), args.out)
    return 0


def cmd_aggregate(args) -> int:
    sc = parse_scenario(args.scenario)
    if sc.experiment is None:
        raise UsageError(f"{args.scenario} has no experiment block; aggregate needs one")
    cfg = sc.experiment_config(seed=args.seed)
    report = run_convergence(cfg, workers=args.workers)
    out = report.to_dict()
    out["model"] = {
        "side": cfg.model.side,
        "family": cfg.model.family,
        "low": cfg.model.low,
        "high": cfg.model.high,
        "capacity": cfg.model.capacity,
        "power": cfg.model.power,
    }
    if cfg.model.side == "demand":
        out["convexity"] = run_convexity_emergence(cfg).to_dict()
    _emit(_json(out), args.out)
    csv_path = args.csv
    if csv_path is None and args.out not in (None, "-"):
        csv_path = str(Path(args.out).with_suffix(".csv"))
    if csv_path:
        _emit(report.to_csv(), csv_path)
    return 0


def cmd_relations(args) -> int:
    profiles = read_profiles_csv(args.profiles)
    table = relation_table(profiles)
    _emit(_json({"relations": [r.to_dict() for r in table]}), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="classical-sd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("schedule", help="demand and supply step schedules")
    p.add_argument("scenario")
    p.add_argument("--side", choices=["demand", "supply", "both"], default="both")
    p.add_argument("--grid", help="start:stop:step or comma list; default: breakpoints and midpoints")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("equilibrium", help="competitive crossing and maximal surplus")
    p.add_argument("scenario")
    p.add_argument("--out")
    p.set_defaults(func=cmd_equilibrium)

    p = sub.add_parser("smooth", help="large-market schedule on a price grid")
    p.add_argument("scenario", nargs="?")
    p.add_argument("--family", choices=["triangular", "uniform", "pyramidal", "custom"], default="pyramidal")
    p.add_argument("--side", choices=["demand", "supply"], default="demand")
    p.add_argument("--vmax", type=float)
    p.add_argument("--support", type=float, nargs=2, metavar=("LOW", "HIGH"))
    p.add_argument("--capacity", type=float, default=1.0)
    p.add_argument("--power", type=float, default=2.0)
    p.add_argument("--density", help="custom family: polynomial coefficients, lowest order first")
    p.add_argument("--grid")
    p.add_argument("--out")
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("leontief", help="labor values of a Leontief economy")
    p.add_argument("scenario", nargs="?")
    p.add_argument("--matrix", help="CSV of input coefficients, row-major, header optional")
    p.add_argument("--labor", help="CSV of direct labor per unit")
    p.add_argument("--out")
    p.set_defaults(func=cmd_leontief)

    p = sub.add_parser("aggregate", help="Monte Carlo smoothing and convexity experiments")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--csv", help="per-replication KS table; default: --out with .csv suffix")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("relations", help="classify commodity pairs from demand profiles")
    p.add_argument("--profiles", required=True, help="CSV with columns scenario,commodity,quantity")
    p.add_argument("--out")
    p.set_defaults(func=cmd_relations)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NonProductiveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UsageError, ScenarioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
