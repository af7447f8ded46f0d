"""Destroy operators: each maps a solution to a partial copy plus removed customers."""

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .model import Config, Instance, Route, Solution


@dataclass
class RemovalResult:
    partial: Solution
    removed: List[int] = field(default_factory=list)
    removed_depots: List[int] = field(default_factory=list)
    # customer -> depot it should preferably be reinserted at
    swap_tags: Dict[int, int] = field(default_factory=dict)
    # depot -> SE routes detached together with it (kept for FE route merging)
    detached: Dict[int, List[Route]] = field(default_factory=dict)
    operator: str = ""


def _depot_customers(solution: Solution, depot: int) -> List[int]:
    return sorted(c for r in solution.se_routes if r.home == depot for c in r.visits)


def drop_customers(instance: Instance, solution: Solution, customers: Iterable[int]) -> None:
    """Remove ``customers`` from every route in place; empty routes disappear."""
    gone = set(customers)
    if not gone:
        return
    for r in solution.se_routes:
        r.visits = [v for v in r.visits if v not in gone]
    solution.se_routes = [r for r in solution.se_routes if r.visits]
    for r in solution.fe_routes:
        r.visits = [v for v in r.visits if v not in gone]
    solution.fe_routes = [r for r in solution.fe_routes if r.visits]
    solution.cost_cache = None


def close_unused_depots(instance: Instance, solution: Solution, keep: Iterable[int] = ()) -> List[int]:
    """Close open depots without SE routes (except ``keep``); returns closed ids."""
    used = {r.home for r in solution.se_routes} | set(keep)
    closing = sorted(t for t in solution.open_depots if t not in used)
    if not closing:
        return []
    gone = set(closing)
    solution.open_depots -= gone
    for r in solution.fe_routes:
        r.visits = [v for v in r.visits if v not in gone]
    solution.fe_routes = [r for r in solution.fe_routes if r.visits]
    solution.cost_cache = None
    return closing


def _finish(instance: Instance, partial: Solution, removed: Sequence[int], name: str,
            tags: Optional[Dict[int, int]] = None, keep: Iterable[int] = (),
            removed_depots: Sequence[int] = (), detached=None) -> RemovalResult:
    drop_customers(instance, partial, removed)
    closed = close_unused_depots(instance, partial, keep)
    depots = list(removed_depots) + [t for t in closed if t not in removed_depots]
    return RemovalResult(partial, list(removed), depots, dict(tags or {}), dict(detached or {}), name)


def _large_q(instance: Instance, n_present: int, rng: random.Random, config: Config) -> int:
    upper = max(1, math.ceil(config.destroy_bound * instance.n_customers))
    return rng.randint(1, max(1, min(upper, n_present)))


def random_removal(instance: Instance, solution: Solution, rng: random.Random,
                   config: Optional[Config] = None, q: Optional[int] = None) -> RemovalResult:
    config = config or Config()
    partial = solution.copy()
    present = sorted(partial.served(instance))
    if not present:
        return RemovalResult(partial, operator="random_removal")
    if q is None:
        q = _large_q(instance, len(present), rng, config)
    removed = rng.sample(present, min(q, len(present)))
    return _finish(instance, partial, removed, "random_removal")


def _pick_se_route(solution: Solution, rng: random.Random) -> Optional[int]:
    if not solution.se_routes:
        return None
    return rng.randrange(len(solution.se_routes))


def random_string_removal(instance: Instance, solution: Solution, rng: random.Random,
                          config: Optional[Config] = None, q: Optional[int] = None) -> RemovalResult:
    partial = solution.copy()
    k = _pick_se_route(partial, rng)
    if k is None:
        return RemovalResult(partial, operator="random_string_removal")
    visits = partial.se_routes[k].visits
    n = len(visits)
    if q is None:
        q = rng.randint(1, n)
    q = min(q, n)
    start = rng.randint(0, n - q)
    return _finish(instance, partial, visits[start:start + q], "random_string_removal")


def furthest_removal(instance: Instance, solution: Solution, rng: random.Random,
                     config: Optional[Config] = None, q: Optional[int] = None,
                     route_index: Optional[int] = None) -> RemovalResult:
    partial = solution.copy()
    k = route_index if route_index is not None else _pick_se_route(partial, rng)
    if k is None:
        return RemovalResult(partial, operator="furthest_removal")
    r = partial.se_routes[k]
    n = len(r.visits)
    if q is None:
        q = rng.randint(1, n)
    q = min(q, n)
    dist = instance.dist_se
    order = sorted(r.visits, key=lambda c: (-int(dist[r.home, c]), c))
    return _finish(instance, partial, order[:q], "furthest_removal")


def microdepot_removal(instance: Instance, solution: Solution, rng: random.Random,
                       config: Optional[Config] = None, depot: Optional[int] = None) -> RemovalResult:
    partial = solution.copy()
    candidates = sorted(partial.open_depots)
    if not candidates:
        return RemovalResult(partial, operator="microdepot_removal")
    t = depot if depot is not None else rng.choice(candidates)
    removed = _depot_customers(partial, t)
    partial.se_routes = [r for r in partial.se_routes if r.home != t]
    res = _finish(instance, partial, removed, "microdepot_removal", removed_depots=[t])
    return res


def partial_microdepot_removal(instance: Instance, solution: Solution, rng: random.Random,
                               config: Optional[Config] = None, q: Optional[int] = None) -> RemovalResult:
    partial = solution.copy()
    opened = sorted({r.home for r in partial.se_routes})
    closed = [t for t in instance.depot_ids if t not in partial.open_depots]
    if not opened or not closed:
        return RemovalResult(partial, operator="partial_microdepot_removal")
    t_open = rng.choice(opened)
    t_closed = rng.choice(closed)
    members = _depot_customers(partial, t_open)
    if q is None:
        q = rng.randint(1, len(members))
    dist = instance.dist_se
    order = sorted(members, key=lambda c: (int(dist[t_closed, c]), c))
    return _finish(instance, partial, order[:min(q, len(members))], "partial_microdepot_removal",
                   keep=[t_open])


def partial_microdepot_swap(instance: Instance, solution: Solution, rng: random.Random,
                            config: Optional[Config] = None,
                            q1: Optional[int] = None, q2: Optional[int] = None) -> RemovalResult:
    partial = solution.copy()
    opened = sorted({r.home for r in partial.se_routes})
    if len(opened) < 2:
        return RemovalResult(partial, operator="partial_microdepot_swap")
    a, b = rng.sample(opened, 2)
    ca, cb = _depot_customers(partial, a), _depot_customers(partial, b)
    if q1 is None:
        q1 = rng.randint(1, len(ca))
    if q2 is None:
        q2 = rng.randint(1, len(cb))
    ra = rng.sample(ca, min(q1, len(ca)))
    rb = rng.sample(cb, min(q2, len(cb)))
    tags = {c: b for c in ra}
    tags.update({c: a for c in rb})
    return _finish(instance, partial, ra + rb, "partial_microdepot_swap", tags=tags, keep=[a, b])


def fe_route_loads(instance: Instance, solution: Solution) -> List[int]:
    loads = solution.depot_loads(instance)
    m = instance.n_depots
    return [sum(loads.get(v, 0) if v <= m else instance.demand[v] for v in r.visits)
            for r in solution.fe_routes]


def fe_route_removal(instance: Instance, solution: Solution, rng: Optional[random.Random] = None,
                     config: Optional[Config] = None) -> RemovalResult:
    partial = solution.copy()
    if not partial.fe_routes:
        return RemovalResult(partial, operator="fe_route_removal")
    loads = fe_route_loads(instance, partial)
    k = min(range(len(loads)), key=lambda i: (loads[i], i))
    route = partial.fe_routes.pop(k)
    m = instance.n_depots
    depots = [v for v in route.visits if v <= m]
    direct = [v for v in route.visits if v > m]
    detached = {t: [r.copy() for r in partial.se_routes if r.home == t] for t in depots}
    removed = direct + [c for t in depots for c in _depot_customers(partial, t)]
    partial.se_routes = [r for r in partial.se_routes if r.home not in set(depots)]
    partial.open_depots -= set(depots)
    return _finish(instance, partial, removed, "fe_route_removal", removed_depots=depots,
                   detached=detached)


def se_route_removal(instance: Instance, solution: Solution, rng: Optional[random.Random] = None,
                     config: Optional[Config] = None) -> RemovalResult:
    partial = solution.copy()
    if not partial.se_routes:
        return RemovalResult(partial, operator="se_route_removal")
    demand = instance.demand
    loads = [sum(demand[c] for c in r.visits) for r in partial.se_routes]
    k = min(range(len(loads)), key=lambda i: (loads[i], i))
    removed = list(partial.se_routes[k].visits)
    return _finish(instance, partial, removed, "se_route_removal")


DestroyFn = Callable[..., RemovalResult]

ALL_DESTROY: List[Tuple[str, DestroyFn]] = [
    ("random_removal", random_removal),
    ("random_string_removal", random_string_removal),
    ("furthest_removal", furthest_removal),
    ("microdepot_removal", microdepot_removal),
    ("partial_microdepot_removal", partial_microdepot_removal),
    ("partial_microdepot_swap", partial_microdepot_swap),
    ("fe_route_removal", fe_route_removal),
    ("se_route_removal", se_route_removal),
]


def destroy_operators(config: Config) -> List[Tuple[str, DestroyFn]]:
    """Enabled destroy operators in a fixed order."""
    return [(n, f) for n, f in ALL_DESTROY
            if n != "partial_microdepot_removal" or config.partial_microdepot_removal]
