"""Initial solution: depot location + assignment, Clarke-Wright SE routes, FE routes."""

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .evaluation import evaluate_route
from .model import Config, Echelon, Instance, Route, Solution, fe_route, se_route


class InfeasibleError(ValueError):
    """Raised when no feasible construction exists for the given data."""


@dataclass
class Assignment:
    open_depots: Set[int] = field(default_factory=set)
    assign: Dict[int, int] = field(default_factory=dict)

    def loads(self, instance: Instance) -> Dict[int, int]:
        out = {t: 0 for t in self.open_depots}
        for c, t in self.assign.items():
            out[t] = out.get(t, 0) + instance.demand[c]
        return out

    def customers_of(self, depot: int) -> List[int]:
        return sorted(c for c, t in self.assign.items() if t == depot)

    def copy(self) -> "Assignment":
        return Assignment(set(self.open_depots), dict(self.assign))


def cflp_objective(instance: Instance, a: Assignment) -> int:
    """Assignment cost depot->customer plus main-depot access and opening cost per open depot."""
    cse, cfe = instance.cost_se, instance.cost_fe
    total = sum(cse[t][c] for c, t in a.assign.items())
    total += sum(cfe[0][t] + instance.opening_cost[t] for t in a.open_depots)
    return total


def usable_capacity(instance: Instance) -> List[int]:
    """Per-node depot capacity capped at one truckload (each depot gets one FE visit)."""
    q1 = instance.fe_vehicle.capacity
    return [min(c, q1) for c in instance.depot_capacity]


def check_assignment(instance: Instance, a: Assignment) -> List[str]:
    cap = usable_capacity(instance)
    out = []
    for c in instance.customer_ids:
        if c not in a.assign:
            out.append(f"customer {c} unassigned")
        elif a.assign[c] not in a.open_depots:
            out.append(f"customer {c} assigned to closed depot {a.assign[c]}")
    for t, load in a.loads(instance).items():
        if load > cap[t]:
            out.append(f"depot {t} over capacity: {load} > {cap[t]}")
    return out


# --------------------------------------------------------------------------
# capacitated facility location


def _assign_cost_matrix(instance: Instance) -> np.ndarray:
    """Rows: customers in id order; columns: depots in id order."""
    d = np.asarray(instance.depot_ids)
    c = np.asarray(instance.customer_ids)
    return instance.cost_se_np[np.ix_(d, c)].T.astype(np.int64)


def _capacitated_assign(cost: np.ndarray, demand: np.ndarray, cap: np.ndarray,
                        open_mask: np.ndarray) -> Tuple[Optional[np.ndarray], int]:
    """Regret-ordered greedy assignment to open columns; returns (choice, unassigned demand)."""
    n = cost.shape[0]
    cols = np.flatnonzero(open_mask)
    if cols.size == 0:
        return None, int(demand.sum())
    sub = cost[:, cols]
    if cols.size > 1:
        part = np.partition(sub, 1, axis=1)
        regret = part[:, 1] - part[:, 0]
    else:
        regret = np.zeros(n, dtype=np.int64)
    # large regret first, then large demand, then id
    order = np.lexsort((np.arange(n), -demand, -regret))
    pref = np.argsort(sub, axis=1, kind="stable")
    slack = cap[cols].astype(np.int64).copy()
    choice = np.full(n, -1, dtype=np.int64)
    missing = 0
    for i in order:
        q = demand[i]
        for k in pref[i]:
            if slack[k] >= q:
                slack[k] -= q
                choice[i] = cols[k]
                break
        else:
            missing += int(q)
    return choice, missing


def _shift_search(cost: np.ndarray, demand: np.ndarray, cap: np.ndarray, fixed: np.ndarray,
                  choice: np.ndarray) -> np.ndarray:
    """Single-customer reassignment moves until no improvement (closing emptied depots)."""
    m = cost.shape[1]
    load = np.bincount(choice, weights=demand, minlength=m).astype(np.int64)
    count = np.bincount(choice, minlength=m)
    improved = True
    while improved:
        improved = False
        for i in range(cost.shape[0]):
            a = choice[i]
            q = demand[i]
            base = cost[i, a] - (fixed[a] if count[a] == 1 else 0)
            best_b, best_d = -1, 0
            for b in range(m):
                if b == a or load[b] + q > cap[b]:
                    continue
                d = cost[i, b] + (fixed[b] if count[b] == 0 else 0) - base
                if d < best_d:
                    best_b, best_d = b, d
            if best_b >= 0:
                choice[i] = best_b
                load[a] -= q
                load[best_b] += q
                count[a] -= 1
                count[best_b] += 1
                improved = True
    return choice


def _to_assignment(instance: Instance, choice: np.ndarray) -> Assignment:
    dep = instance.depot_ids
    cust = instance.customer_ids
    a = Assignment()
    for i, k in enumerate(choice):
        a.assign[cust[i]] = dep[int(k)]
    a.open_depots = set(a.assign.values())
    return a


def open_all_assignment(instance: Instance) -> Optional[Assignment]:
    """All depots open, regret-greedy capacitated assignment (sanity upper bound)."""
    cost = _assign_cost_matrix(instance)
    demand = np.asarray([instance.demand[c] for c in instance.customer_ids], dtype=np.int64)
    usable = usable_capacity(instance)
    cap = np.asarray([usable[t] for t in instance.depot_ids], dtype=np.int64)
    choice, missing = _capacitated_assign(cost, demand, cap, np.ones(len(cap), dtype=bool))
    if missing:
        return None
    a = _to_assignment(instance, choice)
    a.open_depots = set(instance.depot_ids)
    return a


def solve_cflp(instance: Instance, time_budget: Optional[float] = None,
               exact_limits: Tuple[int, int] = (10, 4)) -> Assignment:
    """Heuristic CFLP: greedy ADD with regret assignment, then shift search.

    Tiny instances (within ``exact_limits`` customers/depots) are solved
    exactly by exhaustive search.
    """
    demand = np.asarray([instance.demand[c] for c in instance.customer_ids], dtype=np.int64)
    usable = usable_capacity(instance)
    cap = np.asarray([usable[t] for t in instance.depot_ids], dtype=np.int64)
    if demand.sum() > cap.sum():
        raise InfeasibleError(f"total demand {demand.sum()} exceeds total depot capacity {cap.sum()}")
    if instance.n_customers <= exact_limits[0] and instance.n_depots <= exact_limits[1]:
        from .oracle import brute_force_cflp
        a, _ = brute_force_cflp(instance)
        return a
    cost = _assign_cost_matrix(instance)
    fixed = np.asarray([instance.cost_fe[0][t] + instance.opening_cost[t] for t in instance.depot_ids],
                       dtype=np.int64)
    m = len(cap)
    penalty = int(cost.max() + fixed.max() + 1) * 4

    def evaluate(mask):
        choice, missing = _capacitated_assign(cost, demand, cap, mask)
        if choice is None:
            return None, math.inf
        val = int(cost[np.arange(len(choice))[choice >= 0], choice[choice >= 0]].sum())
        val += int(fixed[mask].sum()) + missing * penalty
        return choice, val

    mask = np.zeros(m, dtype=bool)
    best_val = math.inf
    best_choice = None
    while True:
        cand = None
        for j in range(m):
            if mask[j]:
                continue
            mask[j] = True
            choice, val = evaluate(mask)
            mask[j] = False
            if val < (cand[1] if cand else math.inf):
                cand = (j, val, choice)
        if cand is None or cand[1] >= best_val:
            break
        mask[cand[0]] = True
        best_val, best_choice = cand[1], cand[2]
    if best_choice is None or (best_choice < 0).any():
        raise InfeasibleError("greedy facility opening could not cover all demand")
    # drop phase: close depots while that helps
    improved = True
    while improved:
        improved = False
        for j in np.flatnonzero(mask):
            mask[j] = False
            choice, val = evaluate(mask)
            if choice is not None and (choice >= 0).all() and val < best_val:
                best_val, best_choice = val, choice
                improved = True
                break
            mask[j] = True
    choice = _shift_search(cost, demand, cap, fixed, best_choice.copy())
    a = _to_assignment(instance, choice)
    upper = open_all_assignment(instance)
    if upper is not None:
        upper = _to_assignment(instance, _shift_search(
            cost, demand, cap, fixed,
            np.array([instance.depot_ids.index(upper.assign[c]) for c in instance.customer_ids])))
        if cflp_objective(instance, upper) < cflp_objective(instance, a):
            a = upper
    return a


# --------------------------------------------------------------------------
# k-means


def default_k(instance: Instance) -> int:
    total = sum(instance.demand[c] for c in instance.customer_ids)
    usable = usable_capacity(instance)
    mean_cap = sum(usable[t] for t in instance.depot_ids) / max(1, instance.n_depots)
    k = math.ceil(total / mean_cap) if mean_cap > 0 else 1
    return min(max(1, k), instance.n_depots)


def kmeans_assign(instance: Instance, k: Optional[int] = None, seed: int = 0) -> Assignment:
    """Cluster customer coordinates, map each cluster to the nearest unused depot."""
    from sklearn.cluster import KMeans

    if k is None:
        k = default_k(instance)
    if not 1 <= k <= instance.n_depots:
        raise ValueError(f"k must lie in [1, {instance.n_depots}], got {k}")
    cust = list(instance.customer_ids)
    xy = instance.coords[cust]
    k = min(k, len(cust))
    km = KMeans(n_clusters=k, n_init=1, max_iter=100, random_state=seed).fit(xy)
    labels = km.labels_
    used: Set[int] = set()
    a = Assignment()
    for cl in range(k):
        centre = km.cluster_centers_[cl]
        free = [t for t in instance.depot_ids if t not in used]
        d = [float(np.hypot(*(instance.coords[t] - centre))) for t in free]
        t = free[int(np.argmin(d))]
        used.add(t)
        for idx in np.flatnonzero(labels == cl):
            a.assign[cust[idx]] = t
    a.open_depots = set(a.assign.values())
    return repair_capacity(instance, a)


def repair_capacity(instance: Instance, assignment: Assignment) -> Assignment:
    """Move the farthest customers off overloaded depots until all fit."""
    a = assignment.copy()
    dist = instance.dist_se
    demand = instance.demand
    cap = usable_capacity(instance)
    if sum(demand[c] for c in instance.customer_ids) > sum(cap[t] for t in instance.depot_ids):
        raise InfeasibleError("total demand exceeds total depot capacity")
    loads = a.loads(instance)
    while True:
        over = sorted(t for t, l in loads.items() if l > cap[t])
        if not over:
            return a
        t = over[0]
        members = a.customers_of(t)
        c = max(members, key=lambda v: (dist[t, v], -v))
        q = demand[c]
        hosts = [u for u in sorted(a.open_depots)
                 if u != t and loads.get(u, 0) + q <= cap[u]]
        if hosts:
            u = min(hosts, key=lambda u: (dist[u, c], u))
        else:
            closed = [u for u in instance.depot_ids if u not in a.open_depots and cap[u] >= q]
            if not closed:
                raise InfeasibleError(f"no depot can take customer {c} (demand {q})")
            u = min(closed, key=lambda u: (dist[u, c], instance.opening_cost[u], u))
            a.open_depots.add(u)
        a.assign[c] = u
        loads[t] -= q
        loads[u] = loads.get(u, 0) + q


# --------------------------------------------------------------------------
# routes


def _tw_ok(instance: Instance, echelon: Echelon, home: int, visits: Sequence[int]) -> bool:
    if not instance.has_time_windows:
        return True
    stats, _ = evaluate_route(instance, Route(echelon, home, visits))
    return stats.F


def clarke_wright(instance: Instance, depot: int, customers: Iterable[int]) -> List[Route]:
    """Parallel savings with route-end merges; savings include the saved vehicle fixed cost."""
    custs = sorted(customers)
    if not custs:
        return []
    q2 = instance.se_vehicle.capacity
    demand = instance.demand
    for c in custs:
        if demand[c] > q2:
            raise InfeasibleError(f"customer {c}: demand {demand[c]} exceeds SE capacity {q2}")
    cost = instance.cost_se_np
    idx = np.asarray(custs)
    sub = cost[np.ix_(idx, idx)]
    symmetric = bool(np.array_equal(sub, sub.T))
    to_d = cost[depot, idx]
    from_d = cost[idx, depot]
    # saving for visiting j right after i
    sav = from_d[:, None] + to_d[None, :] - sub + instance.se_vehicle.fixed_cost
    n = len(custs)
    ii, jj = np.nonzero(sav > 0)
    keep = ii < jj if symmetric else ii != jj
    ii, jj = ii[keep], jj[keep]
    order = np.lexsort((jj, ii, -sav[ii, jj]))

    route_of = list(range(n))
    routes: Dict[int, List[int]] = {k: [k] for k in range(n)}
    loads = {k: int(demand[custs[k]]) for k in range(n)}
    for o in order:
        i, j = int(ii[o]), int(jj[o])
        ra, rb = route_of[i], route_of[j]
        if ra == rb or loads[ra] + loads[rb] > q2:
            continue
        a, b = routes[ra], routes[rb]
        merged = None
        if a[-1] == i and b[0] == j:
            merged = a + b
        elif symmetric:
            if a[0] == i and b[-1] == j:
                merged = b + a
            elif a[0] == i and b[0] == j:
                merged = a[::-1] + b
            elif a[-1] == i and b[-1] == j:
                merged = a + b[::-1]
        if merged is None:
            continue
        if instance.has_time_windows and not _tw_ok(instance, Echelon.SECOND, depot,
                                                   [custs[k] for k in merged]):
            continue
        routes[ra] = merged
        loads[ra] += loads.pop(rb)
        del routes[rb]
        for k in merged:
            route_of[k] = ra
    out = [se_route(depot, [custs[k] for k in routes[r]]) for r in sorted(routes)]
    return out


def _fe_insert_scan(instance: Instance, route: Route, c: int) -> Tuple[int, int]:
    cost = instance.cost_fe
    best, pos = None, -1
    seq = [0] + route.visits + [0]
    for p in range(len(seq) - 1):
        a, b = seq[p], seq[p + 1]
        d = cost[a][c] + cost[c][b] - cost[a][b]
        if best is None or d < best:
            if instance.has_time_windows and not _tw_ok(
                    instance, Echelon.FIRST, 0, route.visits[:p] + [c] + route.visits[p:]):
                continue
            best, pos = d, p
    return (best if best is not None else -1), pos


def build_fe_routes(instance: Instance, open_depots: Iterable[int], depot_loads: Dict[int, int],
                    direct_customers: Iterable[int] = ()) -> List[Route]:
    """One FE route per open depot, then direct customers by cheapest feasible insertion."""
    q1 = instance.fe_vehicle.capacity
    routes: List[Route] = []
    loads: List[int] = []
    for t in sorted(open_depots):
        load = depot_loads.get(t, 0)
        if load > q1:
            raise InfeasibleError(f"depot {t}: load {load} exceeds FE capacity {q1}")
        routes.append(fe_route([t]))
        loads.append(load)
    for c in sorted(direct_customers, key=lambda v: (instance.demand[v], v)):
        q = instance.demand[c]
        if q > q1:
            raise InfeasibleError(f"customer {c}: demand {q} exceeds FE capacity {q1}")
        best = None
        for k, r in enumerate(routes):
            if loads[k] + q > q1:
                continue
            d, p = _fe_insert_scan(instance, r, c)
            if p >= 0 and (best is None or d < best[0]):
                best = (d, k, p)
        if best is None:
            routes.append(fe_route([c]))
            loads.append(q)
        else:
            _, k, p = best
            routes[k].visits.insert(p, c)
            loads[k] += q
    return routes


def solution_from_assignment(instance: Instance, a: Assignment) -> Solution:
    se: List[Route] = []
    for t in sorted(a.open_depots):
        se.extend(clarke_wright(instance, t, a.customers_of(t)))
    sol = Solution([], se, {r.home for r in se})
    sol.fe_routes = build_fe_routes(instance, sol.open_depots, sol.depot_loads(instance))
    return sol


def initial_solution(instance: Instance, config: Optional[Config] = None) -> Solution:
    config = config or Config()
    if config.init_method == "kmeans":
        a = kmeans_assign(instance, None, config.rng_seed)
    else:
        a = solve_cflp(instance)
    return solution_from_assignment(instance, a)
