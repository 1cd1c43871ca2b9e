"""Batch command line: generate instances, run methods, compare results.

    bicutstock generate 1d --class S --m 40 --seed 7 --out instances/
    bicutstock solve instances/*.txt --method all --colgen dynamic --out results/
    bicutstock compare results/ --out report/

``solve`` writes one front JSON, one run-stats JSON and one plain-text
trace per (instance, method), a union front when several methods ran, a
metrics CSV, and a front figure per instance.  Front JSON files contain
no timing, so identical configurations reproduce them byte for byte.
``compare`` unions fronts per instance and emits sigma tables, profile
CSVs and the matching figures.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .colgen import ColgenConfig
from .front import Front, FrontPoint, metrics, nondominated_filter, performance_profile, union_fronts
from .instances import Gen1DParams, Gen2DParams, generate_1d, generate_2d, read_instance, write_instance
from .model import Instance, IntegerSolution, check_feasible
from .plots import save_front_figure, save_profile_figure
from .scalarize import FrontResult, MethodConfig, solve_method
from .solver import SolveLimits

SCHEMA_VERSION = "1.0"
METHOD_ORDER = ("lec", "fpa", "awt")
CSV_HEADER = ["instance", "method", "colgen", "sigma1", "sigma2", "sigma3_o",
              "sigma3_c", "sigma4", "sigma5", "sigma6", "nc", "tt", "it"]


def _capacity_spec(text: str):
    if text == "dmax":
        return "dmax"
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("capacity must be >= 1 or 'dmax'")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bicutstock",
                                     description="bi-objective cutting stock toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write deterministic instances")
    gen_sub = gen.add_subparsers(dest="dimension", required=True)
    g1 = gen_sub.add_parser("1d")
    g1.add_argument("--class", dest="length_class", required=True,
                    choices=("S", "M", "G"))
    g1.add_argument("--m", type=int, required=True)
    g1.add_argument("--L", type=int, default=10_000)
    g1.add_argument("--dbar", type=float, default=100.0)
    g1.add_argument("--capacity", type=_capacity_spec, default=7)
    g1.add_argument("--seed", type=int, default=0)
    g1.add_argument("--count", type=int, default=1)
    g1.add_argument("--out", type=Path, default=Path("instances"))
    g2 = gen_sub.add_parser("2d")
    g2.add_argument("--shape", type=int, required=True,
                    choices=(1, 3, 6, 11, 14))
    g2.add_argument("--m", type=int, required=True, choices=(20, 30, 50, 100))
    g2.add_argument("--capacity", type=_capacity_spec, default=7)
    g2.add_argument("--no-rotation", action="store_true")
    g2.add_argument("--seed", type=int, default=0)
    g2.add_argument("--count", type=int, default=1)
    g2.add_argument("--out", type=Path, default=Path("instances"))

    sol = sub.add_parser("solve", help="run scalarization methods")
    sol.add_argument("instances", nargs="+", type=Path)
    sol.add_argument("--method", choices=("lec", "fpa", "awt", "all"),
                     default="all")
    sol.add_argument("--colgen", choices=("static", "dynamic"), default="dynamic")
    sol.add_argument("--capacity", type=_capacity_spec, default=None,
                     help="override the instance saw capacity (number or dmax)")
    sol.add_argument("--permutation", choices=("12", "21"), default="21")
    sol.add_argument("--zeta", type=float, default=0.3)
    sol.add_argument("--eps", type=float, default=1.0)
    sol.add_argument("--rho", type=float, default=1e-4)
    sol.add_argument("--time-limit-pricing", type=float, default=15.0)
    sol.add_argument("--time-limit-master", type=float, default=60.0)
    sol.add_argument("--gap-pricing", type=float, default=0.01)
    sol.add_argument("--gap-master", type=float, default=0.0001)
    sol.add_argument("--no-limits", action="store_true",
                     help="exact mode: no time limits, zero gaps")
    sol.add_argument("--no-cycle-rows", action="store_true",
                     help="drop the redundant cycle-cover rows")
    sol.add_argument("--seed", type=int, default=0,
                     help="recorded in the config for provenance")
    sol.add_argument("--jobs", type=int, default=1)
    sol.add_argument("--out", type=Path, default=Path("results"))

    cmp_ = sub.add_parser("compare", help="union fronts and profiles")
    cmp_.add_argument("results", type=Path)
    cmp_.add_argument("--out", type=Path, default=None,
                      help="default: the results directory itself")
    return parser


# -- generate ---------------------------------------------------------------

def cmd_generate(args) -> int:
    args.out.mkdir(parents=True, exist_ok=True)
    manifest_path = args.out / "manifest.json"
    manifest = {}
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    for k in range(args.count):
        seed = args.seed + k
        if args.dimension == "1d":
            params = Gen1DParams(m=args.m, length_class=args.length_class,
                                 object_length=args.L, mean_demand=args.dbar,
                                 capacity=args.capacity, seed=seed)
            instance = generate_1d(params)
        else:
            params = Gen2DParams(m=args.m, shape_id=args.shape,
                                 capacity=args.capacity,
                                 allow_rotation=not args.no_rotation, seed=seed)
            instance = generate_2d(params)
        name = f"{params.identifier}.txt"
        write_instance(instance, args.out / name)
        entry = dataclasses.asdict(params)
        entry["dimension"] = args.dimension
        manifest[name] = entry
        print(f"wrote {args.out / name}  (m={instance.m}, p={instance.capacity})")
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")
    return 0


# -- solve ------------------------------------------------------------------

def _method_config(args, method: str) -> MethodConfig:
    if args.no_limits:
        pricing = SolveLimits()
        master = SolveLimits()
    else:
        pricing = SolveLimits(time_limit=args.time_limit_pricing, gap=args.gap_pricing)
        master = SolveLimits(time_limit=args.time_limit_master, gap=args.gap_master)
    colgen = ColgenConfig(mode=args.colgen, pricing_limits=pricing,
                          master_limits=master)
    permutation = (1, 2) if args.permutation == "12" else (2, 1)
    return MethodConfig(method=method, colgen=colgen, permutation=permutation,
                        zeta=args.zeta, epsilon=args.eps, rho=args.rho,
                        use_cycle_rows=not args.no_cycle_rows)


def _config_json(args, method: str) -> dict:
    return {
        "method": method,
        "colgen": args.colgen,
        "capacity_override": args.capacity,
        "permutation": args.permutation,
        "zeta": args.zeta,
        "epsilon": args.eps,
        "rho": args.rho,
        "no_limits": args.no_limits,
        "time_limit_pricing": None if args.no_limits else args.time_limit_pricing,
        "time_limit_master": None if args.no_limits else args.time_limit_master,
        "gap_pricing": 0.0 if args.no_limits else args.gap_pricing,
        "gap_master": 0.0 if args.no_limits else args.gap_master,
        "cycle_rows": not args.no_cycle_rows,
        "seed": args.seed,
    }


def _point_json(pt: FrontPoint) -> dict:
    entry = {"f1": int(pt.f1), "f2": int(pt.f2), "proven": pt.proven,
             "method": pt.method}
    if pt.solution is not None:
        entry["solution"] = {"x": list(pt.solution.x), "y": list(pt.solution.y)}
    return entry


def front_to_json(result: FrontResult, config: dict) -> dict:
    active = [j for j in range(len(result.patterns))
              if any(pt.solution and (pt.solution.x[j] or pt.solution.y[j])
                     for pt in result.front)]
    remap = {j: k for k, j in enumerate(active)}
    points = []
    for pt in result.front:
        entry = _point_json(pt)
        if pt.solution is not None:
            entry["solution"] = {
                "x": [pt.solution.x[j] for j in active],
                "y": [pt.solution.y[j] for j in active],
            }
        points.append(entry)
    return {
        "schema_version": SCHEMA_VERSION,
        "instance": result.instance_id,
        "method": result.method,
        "colgen": result.colgen_mode,
        "config": config,
        "zL1": list(result.zL1) if result.zL1 else None,
        "zL2": list(result.zL2) if result.zL2 else None,
        "aborted": result.aborted,
        "counting": result.counting,
        "patterns": [list(result.patterns[j].counts) for j in active],
        "pattern_index": {str(k): j for j, k in remap.items()},
        "points": points,
    }


def front_from_json(payload: dict) -> tuple[Front, dict]:
    major = str(payload.get("schema_version", "")).split(".")[0]
    if major != SCHEMA_VERSION.split(".")[0]:
        raise ValueError(f"unsupported front schema version "
                         f"{payload.get('schema_version')!r}")
    pts = []
    for entry in payload["points"]:
        sol = None
        if "solution" in entry:
            sol = IntegerSolution(tuple(entry["solution"]["x"]),
                                  tuple(entry["solution"]["y"]))
        pts.append(FrontPoint(entry["f1"], entry["f2"], sol,
                              entry.get("method", payload["method"]),
                              entry.get("proven", True)))
    return nondominated_filter(pts, payload["instance"]), payload


def _dump_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _load_instance(path: Path, capacity_spec) -> Instance:
    instance = read_instance(path)
    if capacity_spec is None:
        return instance
    cap = max(instance.demands) if capacity_spec == "dmax" else capacity_spec
    return dataclasses.replace(instance, capacity=cap)


def _solve_one_instance(instance: Instance, methods, args):
    """Run every requested method; returns (results, failures)."""
    results: list[FrontResult] = []
    failures: list[str] = []
    for method in methods:
        config = _method_config(args, method)
        try:
            result = solve_method(instance, config)
        except Exception as exc:  # solver numeric failure etc.
            failures.append(f"{instance.identifier}/{method}: {exc}")
            continue
        for pt in result.front:
            if pt.solution is not None:
                ok, row = check_feasible(instance, result.patterns, pt.solution)
                if not ok:
                    failures.append(f"{instance.identifier}/{method}: "
                                    f"infeasible point violates {row}")
        results.append(result)
    return results, failures


def cmd_solve(args) -> int:
    for path in args.instances:
        if not path.exists():
            print(f"error: instance file not found: {path}", file=sys.stderr)
            return 2
    methods = list(METHOD_ORDER) if args.method == "all" else [args.method]
    args.out.mkdir(parents=True, exist_ok=True)

    try:
        instances = [_load_instance(p, args.capacity) for p in args.instances]
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    def work(instance):
        return _solve_one_instance(instance, methods, args)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(work, instances))
    else:
        outcomes = [work(inst) for inst in instances]

    rows = []
    any_failure = False
    any_front = False
    for instance, (results, failures) in zip(instances, outcomes):
        for msg in failures:
            any_failure = True
            print(f"warning: {msg}", file=sys.stderr)
        if not results:
            continue
        inst_dir = args.out / instance.identifier
        inst_dir.mkdir(parents=True, exist_ok=True)
        fronts = {}
        reference_pool = [pt for r in results for pt in r.front]
        if reference_pool:
            reference = (max(pt.f1 for pt in reference_pool) + 1.0,
                         max(pt.f2 for pt in reference_pool) + 1.0)
        else:
            reference = (1.0, 1.0)
        for result in results:
            any_front = any_front or len(result.front) > 0
            any_failure = any_failure or result.aborted
            stem = f"{result.method}_{result.colgen_mode}"
            _dump_json(front_to_json(result, _config_json(args, result.method)),
                       inst_dir / f"{stem}.front.json")
            _dump_json({"instance": result.instance_id, "method": result.method,
                        "colgen": result.colgen_mode, "elapsed": result.elapsed,
                        "subproblems": result.subproblems,
                        "columns": result.columns,
                        "initial_columns": result.initial_column_count,
                        "colgen_iterations": result.colgen_iterations,
                        "aborted": result.aborted},
                       inst_dir / f"{stem}.run.json")
            (inst_dir / f"{stem}.trace.txt").write_text(
                "\n".join(result.trace) + "\n", encoding="utf-8")
            rep = metrics(result.front, result, reference)
            rows.append({"instance": instance.identifier,
                         "method": result.method, "colgen": result.colgen_mode,
                         **rep.as_row(), "nc": result.columns,
                         "tt": round(result.elapsed, 3),
                         "it": result.colgen_iterations})
            fronts[result.method] = result.front
        if len(results) > 1:
            union = union_fronts([r.front for r in results])
            _dump_json({"schema_version": SCHEMA_VERSION,
                        "instance": instance.identifier, "method": "union",
                        "colgen": args.colgen,
                        "points": [_point_json(pt) for pt in union]},
                       inst_dir / f"union_{args.colgen}.front.json")
            fronts["union"] = union
        save_front_figure(fronts, inst_dir / f"front_{args.colgen}.png",
                          title=instance.identifier)

    metrics_path = args.out / "metrics.csv"
    with metrics_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_HEADER)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    print(f"wrote {metrics_path} ({len(rows)} runs)")
    if not any_front or not rows:
        return 1 if rows else 2
    return 1 if any_failure else 0


# -- compare ----------------------------------------------------------------

def cmd_compare(args) -> int:
    results_dir = args.results
    if not results_dir.is_dir():
        print(f"error: not a directory: {results_dir}", file=sys.stderr)
        return 2
    out = args.out or results_dir
    out.mkdir(parents=True, exist_ok=True)

    by_instance: dict[str, dict[str, tuple[Front, dict]]] = {}
    run_stats: dict[tuple[str, str], dict] = {}
    for path in sorted(results_dir.rglob("*.front.json")):
        payload = json.loads(path.read_text(encoding="utf-8"))
        if payload.get("method") == "union":
            continue
        front, payload = front_from_json(payload)
        by_instance.setdefault(payload["instance"], {})[payload["method"]] = \
            (front, payload)
    for path in sorted(results_dir.rglob("*.run.json")):
        payload = json.loads(path.read_text(encoding="utf-8"))
        run_stats[(payload["instance"], payload["method"])] = payload
    if not by_instance:
        print(f"error: no front files under {results_dir}", file=sys.stderr)
        return 2

    sigma_rows = []
    profile_rows = []
    for inst_id in sorted(by_instance):
        per_method = by_instance[inst_id]
        ordered = [m for m in METHOD_ORDER if m in per_method] + \
                  [m for m in per_method if m not in METHOD_ORDER]
        fronts = [per_method[m][0] for m in ordered]
        union = union_fronts(fronts)
        pool = [pt for f in fronts for pt in f.points]
        reference = ((max(pt.f1 for pt in pool) + 1.0,
                      max(pt.f2 for pt in pool) + 1.0) if pool else (1.0, 1.0))

        class _Run:
            def __init__(self, zL1, zL2, subproblems, elapsed):
                self.zL1, self.zL2 = zL1, zL2
                self.subproblems, self.elapsed = subproblems, elapsed

        figure_fronts = {}
        for name in ordered:
            front, payload = per_method[name]
            stats = run_stats.get((inst_id, name), {})
            run = _Run(payload.get("zL1"), payload.get("zL2"),
                       stats.get("subproblems", 0), stats.get("elapsed", 0.0))
            rep = metrics(front, run, reference)
            row = {"instance": inst_id, "method": name, **rep.as_row()}
            sigma_rows.append(row)
            profile_rows.append(row)
            figure_fronts[name] = front
        union_run = _Run(None, None, 0, 0.0)
        union_rep = metrics(union, union_run, reference)
        sigma_rows.append({"instance": inst_id, "method": "union",
                           **union_rep.as_row()})
        figure_fronts["union"] = union
        _dump_json({"schema_version": SCHEMA_VERSION, "instance": inst_id,
                    "method": "union", "points": [_point_json(p) for p in union]},
                   out / f"{inst_id}_union.front.json")
        save_front_figure(figure_fronts, out / f"{inst_id}_union.png",
                          title=f"{inst_id} (union of methods)")

    sigma_path = out / "sigma_table.csv"
    sigma_fields = ["instance", "method", "sigma1", "sigma2", "sigma3_o",
                    "sigma3_c", "sigma4", "sigma5", "sigma6"]
    with sigma_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=sigma_fields)
        writer.writeheader()
        for row in sigma_rows:
            writer.writerow({k: row.get(k) for k in sigma_fields})

    for metric_name, sense in (("sigma1", "maximize"), ("sigma2", "maximize")):
        usable = [r for r in profile_rows if r.get(metric_name)]
        if not usable:
            continue
        curves = performance_profile(usable, metric_name, sense)
        csv_path = out / f"profile_{metric_name}.csv"
        with csv_path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["method", "tau", "rho"])
            for name, points in curves.items():
                for tau, rho in points:
                    writer.writerow([name, tau, rho])
        save_profile_figure(curves, out / f"profile_{metric_name}.png",
                            metric_name)
    print(f"wrote {sigma_path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "solve":
            return cmd_solve(args)
        return cmd_compare(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
