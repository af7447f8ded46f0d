"""Cluster-first, route-second start solution followed by a shortened ALNS."""

import math
import time
from typing import Dict, Iterable, List, Optional, Sequence

from . import alns
from .construction import Assignment, build_fe_routes, clarke_wright, kmeans_assign, solve_cflp
from .local_search import intra_route_improve
from .model import Config, Instance, Route, Solution


def tsp_route(instance: Instance, depot: int, customers: Iterable[int],
              config: Optional[Config] = None) -> List[Route]:
    """Savings routes for one sub-cluster, then intra-route improvement."""
    routes = clarke_wright(instance, depot, sorted(customers))
    if not routes:
        return []
    tmp = Solution([], routes, {depot})
    tmp = intra_route_improve(instance, tmp, config)
    return tmp.se_routes


def sub_clusters(instance: Instance, customers: Sequence[int], seed: int = 0) -> List[List[int]]:
    """Split a depot's customers into about one vehicle load per cluster."""
    from sklearn.cluster import KMeans

    customers = sorted(customers)
    if not customers:
        return []
    load = sum(instance.demand[c] for c in customers)
    k = max(1, math.ceil(load / instance.se_vehicle.capacity))
    k = min(k, len(customers))
    if k == 1:
        return [customers]
    km = KMeans(n_clusters=k, n_init=1, max_iter=100, random_state=seed).fit(instance.coords[customers])
    groups: Dict[int, List[int]] = {}
    for c, lab in zip(customers, km.labels_):
        groups.setdefault(int(lab), []).append(c)
    return [groups[g] for g in sorted(groups, key=lambda g: min(groups[g]))]


def aggregate(instance: Instance, routes: Sequence[Route], assignment: Assignment) -> Solution:
    """Join per-cluster SE routes into one solution and add FE routes."""
    se = [r.copy() for r in routes if r.visits]
    opened = {r.home for r in se}
    sol = Solution([], se, opened)
    sol.fe_routes = build_fe_routes(instance, opened, sol.depot_loads(instance))
    return sol


def decomposed_start(instance: Instance, config: Optional[Config] = None) -> Solution:
    config = config or Config()
    if config.init_method == "kmeans":
        a = kmeans_assign(instance, None, config.rng_seed)
    else:
        a = solve_cflp(instance)
    routes: List[Route] = []
    for t in sorted(a.open_depots):
        for group in sub_clusters(instance, a.customers_of(t), config.rng_seed):
            routes.extend(tsp_route(instance, t, group, config))
    return aggregate(instance, routes, a)


def decompose_solve(instance: Instance, config: Optional[Config] = None, **run_kwargs) -> "alns.RunResult":
    """Build the decomposed start, then run the ALNS on a reduced budget."""
    config = config or Config()
    start = time.perf_counter()
    sol = decomposed_start(instance, config)
    budget = config.decomp_iter if config.decomp_iter is not None else config.max_iter // 10
    res = alns.run(instance, config.with_(max_iter=budget), initial=sol, **run_kwargs)
    res.elapsed = time.perf_counter() - start
    return res
