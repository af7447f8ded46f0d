"""Acceptance criteria, each run at its stated tolerance.

Every test records one PASS/FAIL line that is printed in the terminal
summary. Benchmark files are looked up in ``$ELRP_BENCH_DIR`` and in
``tests/data/bench``; criteria that need a missing file fail and say so.
"""

import dataclasses
import itertools
import math
import os
import random
import re
import subprocess
import sys
import time

import pytest

from elrp.alns import roulette_select, run, sa_accept, temperature_at
from elrp.construction import initial_solution
from elrp.decomposition import decompose_solve
from elrp.destroy import ALL_DESTROY
from elrp.evaluation import check_feasibility, evaluate_route, gap_percent, simulate_route
from elrp.instances import (
    CaseStudyParams,
    generate_case_study,
    load_instance,
    synthetic_benchmark,
    write_canonical,
)
from elrp.local_search import local_search
from elrp.model import Config, Echelon, fe_route, se_route
from elrp.oracle import brute_force_optimum, brute_force_set_cover
from elrp.repair import ALL_REPAIR
from elrp.setcover import MiniNetwork, NetworkPool, correction_heuristic, solve_set_cover, update_pool
from conftest import DATA, data_path, report_criterion

pytestmark = pytest.mark.slow

BENCH_DIRS = [d for d in (os.environ.get("ELRP_BENCH_DIR"), os.path.join(DATA, "bench")) if d]


def find_benchmark(key):
    """Path of the benchmark file whose name ends in ``key`` (e.g. "20-5-1"), or None."""
    pattern = re.compile(r"(^|[^0-9a-z])" + re.escape(key.lower()) + r"$")
    for d in BENCH_DIRS:
        if not os.path.isdir(d):
            continue
        for root, _, files in os.walk(d):
            for f in sorted(files):
                if pattern.search(os.path.splitext(f)[0].lower()):
                    return os.path.join(root, f)
    return None


def best_of(instance, seeds, config):
    return min(run(instance, config.with_(rng_seed=s)).best_cost for s in seeds)


# --------------------------------------------------------------------------
# 1. benchmark reproduction

TARGETS = [("20-5-1", 91_750, 89_075), ("20-5-2b", 62_055, 60_838),
           ("50-5-3b", 106_086, 104_006), ("25-5nb", 65_854, 64_562)]


def test_criterion_1_benchmark_reproduction():
    missing = [k for k, _, _ in TARGETS if find_benchmark(k) is None]
    if missing:
        report_criterion(1, False, f"benchmark files not found for {', '.join(missing)} "
                                   f"(searched {BENCH_DIRS}); not verified")
        pytest.fail(f"benchmark data missing: {missing}")
    cfg = Config()
    lines, ok = [], True
    for key, limit, bks in TARGETS:
        inst = load_instance(find_benchmark(key))
        t0 = time.perf_counter()
        z = best_of(inst, range(10), cfg)
        per_run = (time.perf_counter() - t0) / 10
        good = z <= limit
        ok &= good
        lines.append(f"{key}: best {z} (limit {limit}, gap {gap_percent(z, bks):.2f}%, {per_run:.0f} s/run)")
    report_criterion(1, ok, "; ".join(lines))
    assert ok, lines


# --------------------------------------------------------------------------
# 2. full-table regression (optional long job)


def test_criterion_2_full_table():
    if os.environ.get("ELRP_FULL_TABLE") != "1":
        report_criterion(2, False, "optional long job not requested (set ELRP_FULL_TABLE=1); not verified",
                         status="SKIPPED")
        pytest.skip("optional long job")
    files = []
    for d in BENCH_DIRS:
        if os.path.isdir(d):
            for root, _, names in os.walk(d):
                files += [os.path.join(root, f) for f in sorted(names)
                          if re.search(r"(20|50)-5-\d+b?$", os.path.splitext(f)[0].lower())]
    files = [f for f in files if load_instance(f).bks]
    if not files:
        report_criterion(2, False, "no 20/50-customer benchmark files with known BKS found")
        pytest.fail("benchmark data missing")
    gaps = [gap_percent(best_of(inst, range(10), Config()), inst.bks)
            for inst in map(load_instance, files)]
    mean = sum(gaps) / len(gaps)
    ok = mean <= 4.0
    report_criterion(2, ok, f"mean best gap {mean:.2f}% over {len(gaps)} instances (limit 4%)")
    assert ok


# --------------------------------------------------------------------------
# 3. oracle equivalence


def oracle_instances():
    rng = random.Random(2024)
    out = []
    for k in range(50):
        n, m = rng.randint(3, 6), rng.randint(1, 2)
        inst = synthetic_benchmark(n, m, 1000 + k, q2=rng.choice((35, 50, 70)),
                                   time_windows=(k % 2 == 1))
        if k % 5 == 4:
            inst = dataclasses.replace(inst, direct_shipment=True)
        out.append(inst)
    return out


def test_criterion_3_oracle_equivalence():
    exact, worst = 0, 0.0
    misses = []
    for k, inst in enumerate(oracle_instances()):
        _, opt = brute_force_optimum(inst)
        z = run(inst, Config(rng_seed=k)).best_cost
        assert z >= opt, f"{inst.name}: heuristic {z} below the exact optimum {opt}"
        gap = (z - opt) / opt * 100
        worst = max(worst, gap)
        if z == opt:
            exact += 1
        else:
            misses.append(f"{inst.name} {z} vs {opt}")
    ok = exact >= 45 and worst <= 0.5
    report_criterion(3, ok, f"{exact}/50 exact, worst gap {worst:.3f}% (need >= 45 and <= 0.5%)"
                     + (f"; misses: {misses}" if misses else ""))
    assert ok


# --------------------------------------------------------------------------
# 4. REF correctness


def _random_route(inst, rng):
    cust = list(inst.customer_ids)
    visits = rng.sample(cust, rng.randint(1, min(10, len(cust))))
    if rng.random() < 0.25:
        depots = rng.sample(list(inst.depot_ids), rng.randint(0, min(3, inst.n_depots)))
        visits = depots + visits
        rng.shuffle(visits)
        return fe_route(visits)
    return se_route(rng.choice(inst.depot_ids), visits)


def route_classes():
    classes = {
        "prodhon-shaped": synthetic_benchmark(50, 5, 7),
        "prodhon-shaped-tw": synthetic_benchmark(50, 5, 8, time_windows=True),
        "nguyen-sample": load_instance(data_path("nguyen_sample.dat")),
        "case-study": generate_case_study(CaseStudyParams(n_customers=80, n_depots=8), 3),
    }
    for key, _, _ in TARGETS:
        path = find_benchmark(key)
        if path:
            classes[key] = load_instance(path)
    return classes


def test_criterion_4_ref_correctness():
    details, ok = [], True
    for name, inst in route_classes().items():
        rng = random.Random(name)
        bad = 0
        infeasible = 0
        for _ in range(1000):
            route = _random_route(inst, rng)
            stats, _ = evaluate_route(inst, route)
            dist, load, feasible = simulate_route(inst, route)
            expected_load = load if route.echelon == Echelon.SECOND else stats.Q
            if (stats.D, stats.Q, stats.F) != (dist, expected_load, feasible):
                bad += 1
            infeasible += not feasible
        ok &= bad == 0
        details.append(f"{name}: {bad} mismatches ({infeasible} TW-infeasible routes)")
    report_criterion(4, ok, "; ".join(details))
    assert ok


# --------------------------------------------------------------------------
# 5. set-cover exactness


def test_criterion_5_set_cover_exactness():
    rng = random.Random(5)
    mismatches, uncoverable = 0, 0
    for _ in range(200):
        n_cust = rng.randint(3, 12)
        n_dep = rng.randint(2, 6)
        pool = []
        for _ in range(rng.randint(1, 20)):
            custs = frozenset(rng.sample(range(1, n_cust + 1), rng.randint(1, min(5, n_cust))))
            pool.append(MiniNetwork(rng.randint(1, n_dep), custs, (tuple(sorted(custs)),),
                                    rng.randint(10, 500)))
        universe = list(range(1, n_cust + 1))
        res = solve_set_cover(pool, universe)
        brute = brute_force_set_cover(pool, universe)
        if brute is None:
            uncoverable += 1
            mismatches += res is not None
        else:
            mismatches += res is None or res.cost != brute[1]
    ok = mismatches == 0
    report_criterion(5, ok, f"{mismatches} mismatches over 200 pools ({uncoverable} without a cover)")
    assert ok


# --------------------------------------------------------------------------
# 6. feasibility suite


def test_criterion_6_feasibility_suite():
    path = find_benchmark("20-5-1")
    base = load_instance(path) if path else synthetic_benchmark(20, 5, 1)
    label = "20-5-1" if path else "synthetic 20-5 substitute (20-5-1 file not found)"
    instances = [base, synthetic_benchmark(20, 5, 1, time_windows=True),
                 generate_case_study(CaseStudyParams(n_customers=60, n_depots=8), 1)]
    cfg = Config(partial_microdepot_removal=True)
    counts = dict.fromkeys(("construction", "round trips", "local search", "correction"), 0)
    failures = []

    def check(kind, inst, sol):
        counts[kind] += 1
        problems = check_feasibility(inst, sol, cfg)
        if problems:
            failures.append(f"{kind} on {inst.name}: {problems[:2]}")

    for inst in instances:
        for method in ("flp", "kmeans"):
            check("construction", inst, initial_solution(inst, cfg.with_(init_method=method)))
    start = initial_solution(base, cfg)
    for (dname, destroy), (rname, repair) in itertools.product(ALL_DESTROY, ALL_REPAIR):
        for seed in range(100):
            rng = random.Random(seed)
            out = repair(base, destroy(base, start, rng, cfg), cfg, rng)
            check("round trips", base, out)
            if seed % 10 == 0:
                check("local search", base, local_search(base, out, cfg))
    for inst in instances:
        pool = NetworkPool()
        res = run(inst, Config(max_iter=300, sc_every=10**9, rng_seed=3))
        update_pool(pool, inst, res.best)
        update_pool(pool, inst, initial_solution(inst))
        nets = pool.networks()
        rng = random.Random(inst.name)
        for _ in range(100):
            pick = {}
            for net in rng.sample(nets, rng.randint(1, len(nets))):
                pick.setdefault(net.depot, net)
            chosen = list(pick.values())
            covered = set().union(*(n.customers for n in chosen))
            direct = [c for c in inst.customer_ids if c not in covered]
            if direct and not inst.direct_shipment:
                continue
            check("correction", inst, correction_heuristic(inst, chosen, direct, cfg))
        cover = solve_set_cover(pool, inst.customer_ids)
        if cover is not None:
            check("correction", inst, correction_heuristic(inst, cover.selected, (), cfg))
    ok = not failures and counts["round trips"] == 8 * 3 * 100
    report_criterion(6, ok, f"{label}; checked " + ", ".join(f"{v} {k}" for k, v in counts.items())
                     + f"; {len(failures)} infeasible" + (f": {failures[:3]}" if failures else ""))
    assert ok


# --------------------------------------------------------------------------
# 7. adaptive-mechanism statistics


def test_criterion_7_adaptive_statistics():
    rng = random.Random(7)
    n = 100_000
    weights = [5.0, 2.0, 1.0, 1.5, 0.5]
    hits = [0] * len(weights)
    for _ in range(n):
        hits[roulette_select(weights, rng)] += 1
    total = sum(weights)
    roulette_dev = max(abs(h / n - w / total) for h, w in zip(hits, weights))
    tau = 4.0
    freq = sum(sa_accept(tau, 0.0, tau, rng) for _ in range(n)) / n
    sa_dev = abs(freq - math.exp(-1))
    cfg = Config()
    ends = (temperature_at(cfg, 0), temperature_at(cfg, cfg.max_iter))
    ok = roulette_dev <= 0.02 and sa_dev <= 0.02 and ends == (10.0, 1.0)
    report_criterion(7, ok, f"roulette max deviation {roulette_dev:.4f}, SA acceptance at delta = tau "
                            f"{freq:.4f} (dev {sa_dev:.4f}), temperatures {ends}")
    assert ok


# --------------------------------------------------------------------------
# 8. decomposition trade-off

DECOMP_SEEDS = range(2)


def test_criterion_8_decomposition_tradeoff():
    path = find_benchmark("200-10-1")
    if path:
        inst, label = load_instance(path), "200-10-1"
    else:
        inst = synthetic_benchmark(200, 10, 1)
        label = "synthetic 200-10 substitute (200-10-1 file not found)"
    cfg = Config()
    base_t, base_z, dec_t, dec_z = 0.0, [], 0.0, []
    for s in DECOMP_SEEDS:
        res = run(inst, cfg.with_(rng_seed=s))
        base_t += res.elapsed
        base_z.append(res.best_cost)
        res = decompose_solve(inst, cfg.with_(rng_seed=s))
        dec_t += res.elapsed
        dec_z.append(res.best_cost)
    ratio_t = dec_t / base_t
    ratio_z = min(dec_z) / min(base_z)
    ok = ratio_t <= 1 / 3 and ratio_z <= 1.06
    report_criterion(8, ok, f"{label}, {len(DECOMP_SEEDS)} seeds each: time ratio {ratio_t:.3f} "
                            f"(limit 0.333), cost ratio {ratio_z:.4f} (limit 1.06); "
                            f"baseline best {min(base_z)} in {base_t:.0f} s, "
                            f"decomposition best {min(dec_z)} in {dec_t:.0f} s")
    assert ok


# --------------------------------------------------------------------------
# 9. determinism


def _cli(args, threads):
    env = dict(os.environ, ELRP_THREADS=str(threads))
    proc = subprocess.run([sys.executable, "-m", "elrp.cli", *args], capture_output=True, env=env)
    return proc.returncode, proc.stdout


def test_criterion_9_determinism(tmp_path):
    inst_path = tmp_path / "inst.json"
    inst_path.write_text(write_canonical(synthetic_benchmark(12, 3, 9, time_windows=True)))
    tiny = tmp_path / "tiny.json"
    tiny.write_text(write_canonical(synthetic_benchmark(6, 2, 9)))
    bench_dir = tmp_path / "set"
    bench_dir.mkdir()
    (bench_dir / "a.json").write_text(inst_path.read_text())
    (bench_dir / "b.json").write_text(tiny.read_text())
    sol_path = tmp_path / "sol.json"
    _cli(["solve", str(tiny), "--iters", "100", "--solution-out", str(sol_path)], 1)
    commands = {
        "solve": ["solve", str(inst_path), "--iters", "400", "--runs", "3", "--seed", "5", "--no-timing"],
        "solve-decomp": ["solve", str(inst_path), "--iters", "400", "--mode", "decomp", "--no-timing"],
        "bench": ["bench", str(bench_dir), "--iters", "200", "--runs", "2", "--no-timing"],
        "gen": ["gen", "--seed", "3", "--customers", "30", "--depots", "4"],
        "oracle": ["oracle", str(tiny)],
        "report-kpi": ["report-kpi", str(tiny), str(sol_path)],
    }
    failures = []
    for name, args in commands.items():
        for threads in (1, 2):
            a, b = _cli(args, threads), _cli(args, threads)
            if a[0] != 0 or a != b or not a[1]:
                failures.append(f"{name} (threads={threads})")
    ok = not failures
    report_criterion(9, ok, f"{len(commands)} commands x thread caps 1 and 2, two invocations each; "
                            + (f"differences in {failures}" if failures else "all byte-identical"))
    assert ok


# --------------------------------------------------------------------------
# 10. direct shipment never hurts on case-study instances

CASE_BUDGET = 5000


def test_criterion_10_direct_shipment_case_study():
    details, ok = [], True
    for inst_seed in range(3):
        inst = generate_case_study(CaseStudyParams(n_customers=60, n_depots=8), inst_seed)
        with_direct = best_of(inst, range(5), Config(max_iter=CASE_BUDGET))
        without = best_of(inst, range(5), Config(max_iter=CASE_BUDGET, allow_direct_shipment=False))
        good = with_direct <= without
        ok &= good
        details.append(f"{inst.name}: {with_direct} vs {without}")
    report_criterion(10, ok, f"best of 5 seeds at {CASE_BUDGET} iterations, direct allowed vs forbidden: "
                             + "; ".join(details))
    assert ok
