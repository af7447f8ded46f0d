"""Granular first-improvement local search on second-echelon routes."""

import math
from typing import Optional

import numpy as np

from . import kernels
from .destroy import close_unused_depots
from .model import Config, Instance, Solution, se_route


def build_neighbor_lists(instance: Instance, fraction: float, min_size: int = 0) -> np.ndarray:
    """Per node, the nearest customers by SE distance (ascending, ties by id).

    The length is ceil(fraction * |C|), raised to ``min_size``, at most |C| - 1.
    Row ``i`` is meaningful for customers only; rows are padded with -1.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    cust = np.asarray(instance.customer_ids, dtype=np.int64)
    n = len(cust)
    size = min(max(1, min_size, math.ceil(fraction * n)), max(0, n - 1))
    out = np.full((instance.n_nodes, max(size, 1)), -1, dtype=np.int64)
    if size == 0:
        return out
    d = instance.dist_se[np.ix_(cust, cust)].astype(np.int64)
    np.fill_diagonal(d, np.iinfo(np.int64).max)
    # stable sort on distance keeps the id order (cust is ascending) for ties
    order = np.argsort(d, axis=1, kind="stable")[:, :size]
    out[cust] = cust[order]
    return out


def neighbor_lists(instance: Instance, fraction: float, min_size: int = 0):
    """Cached neighbor lists in the layout the active kernel backend expects."""
    cache = getattr(instance, "_neighbor_cache", None)
    if cache is None:
        cache = {}
        object.__setattr__(instance, "_neighbor_cache", cache)
    key = (fraction, min_size, kernels.BACKEND)
    if key not in cache:
        arr = build_neighbor_lists(instance, fraction, min_size)
        cache[key] = arr if kernels.BACKEND == "cython" else arr.tolist()
    return cache[key]


def operator_mask(config: Config, inter: bool = True) -> int:
    ops = kernels.TWO_OPT
    if config.relocate_intra_route:
        ops |= kernels.RELOCATE_INTRA
    if inter:
        ops |= kernels.RELOCATE_INTER | kernels.TWO_OPT_STAR | kernels.EXCHANGE
    return ops


def local_search(instance: Instance, solution: Solution, config: Optional[Config] = None,
                 neighbors=None, ops: Optional[int] = None, module=None) -> Solution:
    """Apply the enabled operators to a fixed point; returns a new solution."""
    config = config or Config()
    kmod = module or kernels
    if neighbors is None:
        neighbors = neighbor_lists(instance, config.neighbor_fraction, config.neighbor_min)
    if ops is None:
        ops = operator_mask(config)
    sol = solution.copy()
    if not sol.se_routes:
        return sol
    kd = kernels.kernel_data(instance) if module is None else kernels.KernelData(instance, module)
    m = instance.n_depots
    n_nodes = instance.n_nodes
    demand = instance.demand
    depot_load = [0] * n_nodes
    for r in sol.se_routes:
        depot_load[r.home] += sum(demand[c] for c in r.visits)
    fe_of = [-1] * n_nodes
    slack = []
    q1 = instance.fe_vehicle.capacity
    for k, r in enumerate(sol.fe_routes):
        load = 0
        for v in r.visits:
            if v <= m:
                fe_of[v] = k
                load += depot_load[v]
            else:
                load += demand[v]
        slack.append(q1 - load)
    homes = [r.home for r in sol.se_routes]
    routes = [list(r.visits) for r in sol.se_routes]
    pv = kd.module.prepare_vector
    new_routes, delta, moves = kmod.local_search(
        kd.cost_se, kd.time_se, kd.demand, kd.service, kd.se_tw_e, kd.se_tw_l,
        bool(instance.has_time_windows), homes, routes, neighbors,
        instance.se_vehicle.capacity, instance.se_vehicle.fixed_cost,
        pv(instance.depot_capacity), pv(depot_load), pv(fe_of), pv(slack if slack else [0]), ops)
    if moves == 0:
        return sol
    sol.se_routes = [se_route(h, v) for h, v in zip(homes, new_routes) if v]
    close_unused_depots(instance, sol)
    sol.cost_cache = None
    return sol


def intra_route_improve(instance: Instance, solution: Solution, config: Optional[Config] = None) -> Solution:
    """Relocate-intra plus 2-opt only, with full neighbor lists."""
    config = config or Config()
    nb = neighbor_lists(instance, 1.0)
    return local_search(instance, solution, config, nb,
                        ops=kernels.RELOCATE_INTRA | kernels.TWO_OPT)
