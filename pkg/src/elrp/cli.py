"""Command-line interface: solve, bench, report-kpi, gen and oracle."""

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from typing import Dict, List, Optional, Sequence

from .instances import (
    CaseStudyParams,
    ParseError,
    generate_case_study,
    load_instance,
    read_config,
    read_solution,
    solution_to_dict,
    write_canonical,
)
from .model import Config

REPORT_VERSION = 1
BENCH_COLUMNS = ["instance", "bks", "z_best", "z_mean", "gap_best_pct", "gap_mean_pct", "time_mean_s"]
EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def thread_cap() -> int:
    env = os.environ.get("ELRP_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"ELRP_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise UsageError("ELRP_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def _map(fn, jobs: Sequence, workers: int) -> List:
    """Ordered map, in a process pool when more than one worker is allowed."""
    workers = min(workers, len(jobs))
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


# --------------------------------------------------------------------------
# configuration from flags


def build_config(args) -> Config:
    cfg = Config()
    if getattr(args, "config", None):
        if not os.path.isfile(args.config):
            raise FileNotFoundError(args.config)
        with open(args.config, "rb") as fh:
            cfg = read_config(fh.read())
    changes = {}
    if getattr(args, "iters", None) is not None:
        changes["max_iter"] = args.iters
    if getattr(args, "init", None):
        changes["init_method"] = args.init
    if getattr(args, "strict_depot_capacity", False):
        changes["strict_depot_vehicle_capacity"] = True
    if getattr(args, "no_direct", False):
        changes["allow_direct_shipment"] = False
    cfg = cfg.with_(**changes)
    problems = cfg.validate()
    if problems:
        raise UsageError("invalid configuration: " + "; ".join(problems))
    return cfg


def _trace_path(base: Optional[str], seed: int, runs: int) -> Optional[str]:
    if not base:
        return None
    if runs == 1:
        return base
    stem, ext = os.path.splitext(base)
    return f"{stem}.seed{seed}{ext or '.csv'}"


# --------------------------------------------------------------------------
# one run (executed in worker processes)


def _solve_job(job: Dict) -> Dict:
    from .alns import run
    from .decomposition import decompose_solve
    from .evaluation import check_feasibility

    instance = load_instance(job["path"])
    cfg: Config = job["config"].with_(rng_seed=job["seed"])
    trace = job.get("trace")
    fh = open(trace, "w", newline="") if trace else None
    try:
        if job["mode"] == "decomp":
            res = decompose_solve(instance, cfg, trace_file=fh)
        else:
            res = run(instance, cfg, trace_file=fh)
    finally:
        if fh is not None:
            fh.close()
    problems = check_feasibility(instance, res.best, cfg)
    return {
        "seed": job["seed"],
        "z": res.best_cost,
        "initial": res.initial_cost,
        "time_s": res.elapsed,
        "feasible": not problems,
        "violations": problems[:10],
        "solution": solution_to_dict(res.best, instance),
    }


def _aggregate(runs: List[Dict], bks: Optional[int], timing: bool) -> Dict:
    from .evaluation import gap_percent

    zs = [r["z"] for r in runs]
    out = {
        "z_best": min(zs) if zs else None,
        "z_mean": sum(zs) / len(zs) if zs else None,
        "gap_best_pct": None,
        "gap_mean_pct": None,
        "time_mean_s": (sum(r["time_s"] for r in runs) / len(runs)) if (runs and timing) else None,
    }
    if bks and zs:
        gaps = [gap_percent(z, bks) for z in zs]
        out["gap_best_pct"] = min(gaps)
        out["gap_mean_pct"] = sum(gaps) / len(gaps)
    return out


def solve_instance(path: str, cfg: Config, seed: int, runs: int, mode: str,
                   trace: Optional[str], timing: bool, workers: int) -> Dict:
    instance = load_instance(path)
    jobs = [{"path": path, "config": cfg, "seed": seed + k, "mode": mode,
             "trace": _trace_path(trace, seed + k, runs)} for k in range(runs)]
    results = _map(_solve_job, jobs, workers)
    best = min(results, key=lambda r: (r["z"], r["seed"])) if results else None
    for r in results:
        if not timing:
            r["time_s"] = None
    return {
        "format": "elrp-report",
        "version": REPORT_VERSION,
        "instance": instance.name,
        "bks": instance.bks,
        "mode": mode,
        "init": cfg.init_method,
        "iterations": cfg.max_iter,
        "runs": [{k: r[k] for k in ("seed", "z", "initial", "time_s", "feasible", "violations")}
                 for r in results],
        "aggregate": _aggregate([dict(r, time_s=r["time_s"] or 0.0) for r in results],
                                instance.bks, timing),
        "best_solution": best["solution"] if best else None,
    }


# --------------------------------------------------------------------------
# commands


def cmd_solve(args) -> int:
    if not os.path.isfile(args.instance):
        raise FileNotFoundError(args.instance)
    cfg = build_config(args)
    report = solve_instance(args.instance, cfg, args.seed, args.runs, args.mode, args.trace,
                            not args.no_timing, thread_cap())
    text = json.dumps(report, indent=1, sort_keys=True) + "\n"
    _emit(text, args.out)
    if args.solution_out and report["best_solution"] is not None:
        with open(args.solution_out, "w") as fh:
            json.dump(report["best_solution"], fh, indent=1, sort_keys=True)
            fh.write("\n")
    return EXIT_OK if all(r["feasible"] for r in report["runs"]) else EXIT_INFEASIBLE


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def bench_rows(directory: str, cfg: Config, seed: int, runs: int, mode: str,
               timing: bool, workers: int) -> List[Dict]:
    files = sorted(f for f in os.listdir(directory)
                   if os.path.isfile(os.path.join(directory, f)) and not f.startswith("."))
    jobs = []
    for f in files:
        path = os.path.join(directory, f)
        for k in range(runs):
            jobs.append({"path": path, "config": cfg, "seed": seed + k, "mode": mode})
    results = _map(_solve_job, jobs, workers)
    rows = []
    for i, f in enumerate(files):
        part = results[i * runs:(i + 1) * runs]
        inst = load_instance(os.path.join(directory, f))
        agg = _aggregate(part, inst.bks, timing)
        rows.append({"instance": inst.name, "bks": inst.bks, **agg,
                     "feasible": all(r["feasible"] for r in part)})
    return rows


def bench_csv(rows: List[Dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in BENCH_COLUMNS])
    if rows:
        avg = ["average"]
        for c in BENCH_COLUMNS[1:]:
            vals = [r[c] for r in rows if r[c] is not None]
            avg.append(_fmt(sum(vals) / len(vals)) if vals else "")
        w.writerow(avg)
    return buf.getvalue()


def cmd_bench(args) -> int:
    if not os.path.isdir(args.directory):
        raise FileNotFoundError(args.directory)
    cfg = build_config(args)
    rows = bench_rows(args.directory, cfg, args.seed, args.runs, args.mode,
                      not args.no_timing, thread_cap())
    _emit(bench_csv(rows), args.out)
    return EXIT_OK if all(r["feasible"] for r in rows) else EXIT_INFEASIBLE


def cmd_report_kpi(args) -> int:
    from .evaluation import check_feasibility
    from .kpi import compute_kpis

    for p in (args.instance, args.solution):
        if not os.path.isfile(p):
            raise FileNotFoundError(p)
    instance = load_instance(args.instance)
    with open(args.solution, "rb") as fh:
        sol = read_solution(fh.read())
    report = compute_kpis(instance, sol).as_dict()
    report["violations"] = check_feasibility(instance, sol)
    _emit(json.dumps(report, indent=1, sort_keys=True) + "\n", args.out)
    return EXIT_OK if not report["violations"] else EXIT_INFEASIBLE


def cmd_gen(args) -> int:
    known = {f.name: f.type for f in fields(CaseStudyParams)}
    changes = {}
    for item in args.param or []:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        if k not in known:
            raise UsageError(f"unknown case-study parameter {k!r}")
        try:
            changes[k] = int(v) if known[k] in (int, "int") else float(v)
        except ValueError:
            raise UsageError(f"bad value for {k}: {v!r}") from None
    if args.customers is not None:
        changes["n_customers"] = args.customers
    if args.depots is not None:
        changes["n_depots"] = args.depots
    params = CaseStudyParams(**changes)
    problems = params.validate()
    if problems:
        raise UsageError("invalid case-study parameters: " + "; ".join(problems))
    inst = generate_case_study(params, args.seed, args.name)
    _emit(write_canonical(inst, explicit_matrices=True), args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    from .oracle import OracleLimitError, OracleLimits, brute_force_optimum

    if not os.path.isfile(args.instance):
        raise FileNotFoundError(args.instance)
    instance = load_instance(args.instance)
    cfg = build_config(args)
    try:
        sol, z = brute_force_optimum(instance, OracleLimits(args.max_customers, args.max_depots), cfg)
    except OracleLimitError as exc:
        raise UsageError(str(exc)) from None
    report = {"format": "elrp-oracle", "version": REPORT_VERSION, "instance": instance.name,
              "optimum": z, "solution": solution_to_dict(sol, instance)}
    _emit(json.dumps(report, indent=1, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def _emit(text: str, path: Optional[str]) -> None:
    if path and path != "-":
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# parser


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="seed of the first run (run k uses seed+k)")
    p.add_argument("--runs", type=int, default=1, help="number of independent runs")
    p.add_argument("--iters", type=int, default=None, help="ALNS iterations (default 100000)")
    p.add_argument("--config", help="JSON config overriding the defaults")
    p.add_argument("--mode", choices=("baseline", "decomp"), default="baseline")
    p.add_argument("--init", choices=("flp", "kmeans"), default=None)
    p.add_argument("--strict-depot-capacity", action="store_true",
                   help="also bound assigned SE vehicle capacity by depot capacity")
    p.add_argument("--no-direct", action="store_true", help="forbid direct shipment")
    p.add_argument("--no-timing", action="store_true",
                   help="omit wall times so reports are byte-reproducible")
    p.add_argument("--out", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="elrp", description="Two-echelon location-routing solver")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance with seeded runs")
    p.add_argument("instance")
    _add_search_flags(p)
    p.add_argument("--trace", help="per-iteration CSV trace (one file per seed when runs > 1)")
    p.add_argument("--solution-out", help="write the best solution as JSON")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run every instance of a directory, print a gap table")
    p.add_argument("directory")
    _add_search_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report-kpi", help="KPIs of a stored solution")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report_kpi)

    p = sub.add_parser("gen", help="generate a case-study instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--customers", type=int)
    p.add_argument("--depots", type=int)
    p.add_argument("--name")
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="override a case-study parameter (repeatable)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", help="exact optimum of a tiny instance")
    p.add_argument("instance")
    p.add_argument("--config")
    p.add_argument("--no-direct", action="store_true")
    p.add_argument("--max-customers", type=int, default=8)
    p.add_argument("--max-depots", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "runs", 1) < 1:
        ap.error("--runs must be >= 1")
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"elrp: error: no such file or directory: {exc.args[0] if exc.args else exc}",
              file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ParseError) as exc:
        print(f"elrp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
