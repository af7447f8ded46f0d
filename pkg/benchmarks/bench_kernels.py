"""Compare the pure-Python and compiled kernel backends.

Times the insertion scans and the local search on synthetic instances with
both backends, checks that they return identical results, and times a short
end-to-end ALNS run under each backend (the backend is fixed at import, so
the end-to-end part runs in subprocesses).

    python3 benchmarks/bench_kernels.py [--sizes 20:5 50:5 100:10] [--repeat 3]
"""

import argparse
import os
import random
import subprocess
import sys
import timeit

from elrp import kernels
from elrp.construction import initial_solution
from elrp.instances import synthetic_benchmark
from elrp.local_search import build_neighbor_lists, local_search, operator_mask
from elrp.model import Config

E2E_SNIPPET = """
import sys, time
from elrp import BACKEND, run
from elrp.instances import synthetic_benchmark
from elrp.model import Config
inst = synthetic_benchmark({n}, {m}, 1)
t = time.perf_counter()
res = run(inst, Config(max_iter={iters}, rng_seed=0))
print(BACKEND, res.best_cost, time.perf_counter() - t)
"""


def scan_workload(inst, mod, n_calls=2000, seed=0):
    rng = random.Random(seed)
    kd = kernels.KernelData(inst, mod)
    cust = list(inst.customer_ids)
    cases = []
    for _ in range(n_calls):
        visits = rng.sample(cust, min(len(cust) - 1, rng.randint(3, 12)))
        c = rng.choice([x for x in cust if x not in visits])
        cases.append((rng.choice(inst.depot_ids), visits, c))

    def work():
        out = []
        for home, visits, c in cases:
            out.append(mod.insertion_scan(kd.cost_se, home, visits, c))
        return out
    return work


def ls_workload(inst, mod, seed=0):
    cfg = Config()
    start = initial_solution(inst, cfg)
    rng = random.Random(seed)
    for r in start.se_routes:
        rng.shuffle(r.visits)
    start.cost_cache = None
    nb = build_neighbor_lists(inst, cfg.neighbor_fraction, cfg.neighbor_min)
    nb = nb if mod.BACKEND == "cython" else nb.tolist()
    ops = operator_mask(cfg)

    def work():
        return local_search(inst, start, cfg, nb, ops, module=mod).signature()
    return work


def best_time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def end_to_end(n, m, iters):
    rows = []
    for pure in ("1", "0"):
        env = dict(os.environ, ELRP_PURE_PYTHON=pure)
        code = E2E_SNIPPET.format(n=n, m=m, iters=iters)
        out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                             env=env, check=True).stdout.split()
        rows.append((out[0], int(out[1]), float(out[2])))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", nargs="+", default=["20:5", "50:5", "100:10"],
                    help="instance sizes as customers:depots")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--iters", type=int, default=500, help="ALNS iterations for the end-to-end timing")
    args = ap.parse_args(argv)
    try:
        cy = kernels.backend_module("cython")
    except ImportError:
        sys.exit("compiled backend not built; run `pip install -e . --no-build-isolation` first")
    py = kernels.backend_module("python")

    print(f"{'instance':<12}{'kernel':<16}{'python s':>10}{'cython s':>10}{'speed-up':>10}  same")
    for size in args.sizes:
        n, m = map(int, size.split(":"))
        inst = synthetic_benchmark(n, m, 1)
        for name, make in (("insertion_scan", scan_workload), ("local_search", ls_workload)):
            fp, fc = make(inst, py), make(inst, cy)
            same = fp() == fc()
            tp, tc = best_time(fp, args.repeat), best_time(fc, args.repeat)
            print(f"{f'{n}-{m}':<12}{name:<16}{tp:>10.4f}{tc:>10.4f}{tp / tc:>9.1f}x  {same}")
    print()
    print(f"{'instance':<12}{'backend':<10}{'best cost':>12}{'seconds':>10}  ({args.iters} ALNS iterations)")
    for size in args.sizes:
        n, m = map(int, size.split(":"))
        for backend, z, t in end_to_end(n, m, args.iters):
            print(f"{f'{n}-{m}':<12}{backend:<10}{z:>12}{t:>10.2f}")


if __name__ == "__main__":
    main()
