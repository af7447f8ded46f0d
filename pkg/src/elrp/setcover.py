"""Mini-network pool, set-cover reselection and the duplicate-removal correction."""

import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .construction import build_fe_routes
from .evaluation import route_cost
from .model import Config, Instance, Route, Solution, se_route

NODE_BUDGET = 10_000


@dataclass(frozen=True)
class MiniNetwork:
    depot: int
    customers: FrozenSet[int]
    se_routes: Tuple[Tuple[int, ...], ...]
    cost: int

    @property
    def key(self) -> Tuple[int, FrozenSet[int]]:
        return self.depot, self.customers


def network_cost(instance: Instance, depot: int, routes: Sequence[Sequence[int]]) -> int:
    """Travel + SE vehicle fixed cost per route + the depot's opening cost."""
    travel = sum(route_cost(instance, se_route(depot, r)) for r in routes)
    return travel + instance.se_vehicle.fixed_cost * len(routes) + instance.opening_cost[depot]


def networks_of(instance: Instance, solution: Solution) -> List[MiniNetwork]:
    by_depot: Dict[int, List[Tuple[int, ...]]] = {}
    for r in solution.se_routes:
        by_depot.setdefault(r.home, []).append(tuple(r.visits))
    out = []
    for t in sorted(by_depot):
        routes = tuple(by_depot[t])
        custs = frozenset(c for r in routes for c in r)
        out.append(MiniNetwork(t, custs, routes, network_cost(instance, t, routes)))
    return out


class NetworkPool:
    """Cheapest mini-network per (depot, customer set) key."""

    def __init__(self, limit: Optional[int] = None):
        self.entries: Dict[Tuple[int, FrozenSet[int]], MiniNetwork] = {}
        self.limit = limit

    def __len__(self) -> int:
        return len(self.entries)

    def add(self, net: MiniNetwork) -> bool:
        old = self.entries.get(net.key)
        if old is not None and old.cost <= net.cost:
            return False
        self.entries[net.key] = net
        if self.limit is not None and len(self.entries) > self.limit:
            self._shrink()
        return True

    def _shrink(self) -> None:
        # keep the best cost-per-customer columns; insertion order breaks ties
        keep = int(self.limit * 0.9)
        ranked = sorted(self.entries.items(),
                        key=lambda kv: kv[1].cost / max(1, len(kv[1].customers)))
        self.entries = dict(ranked[:keep])

    def networks(self) -> List[MiniNetwork]:
        return list(self.entries.values())

    def prune_depots(self, valid: Iterable[int]) -> None:
        ok = set(valid)
        self.entries = {k: v for k, v in self.entries.items() if v.depot in ok}

    def dump(self) -> str:
        lines = []
        for net in sorted(self.entries.values(), key=lambda n: (n.depot, sorted(n.customers))):
            lines.append(f"{net.depot}\t{' '.join(map(str, sorted(net.customers)))}\t{net.cost}")
        return "\n".join(lines) + ("\n" if lines else "")


def update_pool(pool: NetworkPool, instance: Instance, solution: Solution) -> NetworkPool:
    for net in networks_of(instance, solution):
        pool.add(net)
    return pool


# --------------------------------------------------------------------------
# set cover


@dataclass
class CoverResult:
    selected: List[MiniNetwork]
    cost: int
    exact: bool
    nodes: int


def _matrix(nets: Sequence[MiniNetwork], universe: Sequence[int]):
    pos = {c: k for k, c in enumerate(universe)}
    A = np.zeros((len(nets), len(universe)), dtype=bool)
    for i, n in enumerate(nets):
        for c in n.customers:
            k = pos.get(c)
            if k is not None:
                A[i, k] = True
    return A


def greedy_cover(nets: Sequence[MiniNetwork], universe: Sequence[int]) -> Optional[List[int]]:
    """Cost-effectiveness greedy honouring one network per depot; None if stuck."""
    A = _matrix(nets, universe)
    cost = np.asarray([n.cost for n in nets], dtype=float)
    depots = np.asarray([n.depot for n in nets])
    U = np.ones(len(universe), dtype=bool)
    avail = np.ones(len(nets), dtype=bool)
    chosen: List[int] = []
    while U.any():
        cnt = A[:, U].sum(axis=1)
        ok = avail & (cnt > 0)
        if not ok.any():
            return None
        ratio = np.where(ok, cost / np.maximum(cnt, 1), np.inf)
        i = int(np.argmin(ratio))
        chosen.append(i)
        U &= ~A[i]
        avail &= depots != depots[i]
    return chosen


def solve_set_cover(pool, universe: Iterable[int], node_budget: int = NODE_BUDGET) -> Optional[CoverResult]:
    """Minimum-cost cover of ``universe`` with at most one network per depot.

    Depth-first branch and bound seeded with the greedy cover; branches on
    the uncovered customer with the fewest candidate networks and prunes with
    a cost-sharing lower bound. Falls back to the incumbent when the node
    budget runs out. Returns None when the universe cannot be covered.
    """
    nets = pool.networks() if isinstance(pool, NetworkPool) else list(pool)
    universe = sorted(set(universe))
    if not universe:
        return CoverResult([], 0, True, 0)
    if not nets:
        return None
    A = _matrix(nets, universe)
    useful = A.any(axis=1)
    idx = np.flatnonzero(useful)
    nets = [nets[i] for i in idx]
    A = A[idx]
    if not A.any(axis=0).all():
        return None
    cost = np.asarray([n.cost for n in nets], dtype=np.int64)
    depot_ids = sorted({n.depot for n in nets})
    dpos = {t: k for k, t in enumerate(depot_ids)}
    dep = np.asarray([dpos[n.depot] for n in nets])

    g = greedy_cover(nets, universe)
    best_cost = math.inf
    best_sel: Optional[List[int]] = None
    if g is not None:
        best_cost = int(cost[g].sum())
        best_sel = list(g)

    nodes = 0
    exhausted = False
    costf = cost.astype(float)

    def dfs(U: np.ndarray, avail: np.ndarray, acc: int, chosen: List[int]) -> None:
        nonlocal nodes, best_cost, best_sel, exhausted
        if not U.any():
            if acc < best_cost:
                best_cost, best_sel = acc, list(chosen)
            return
        if nodes >= node_budget:
            exhausted = True
            return
        nodes += 1
        sub = A[:, U] & avail[:, None]
        cnt = sub.sum(axis=1)
        per_cust = sub.sum(axis=0)
        if (per_cust == 0).any():
            return
        share = np.where(cnt > 0, costf / np.maximum(cnt, 1), np.inf)
        lb = acc + np.where(sub, share[:, None], np.inf).min(axis=0).sum()
        if lb >= best_cost - 1e-9:
            return
        e_local = int(np.argmin(per_cust))
        e = np.flatnonzero(U)[e_local]
        cands = np.flatnonzero(A[:, e] & avail)
        cands = cands[np.lexsort((cands, cost[cands]))]
        for i in cands:
            if acc + cost[i] >= best_cost:
                break
            chosen.append(int(i))
            dfs(U & ~A[i], avail & (dep != dep[i]), acc + int(cost[i]), chosen)
            chosen.pop()
            if exhausted:
                return

    dfs(np.ones(len(universe), dtype=bool), np.ones(len(nets), dtype=bool), 0, [])
    if best_sel is None:
        return None
    sel = [nets[i] for i in sorted(best_sel, key=lambda i: (nets[i].depot, i))]
    return CoverResult(sel, int(best_cost), not exhausted, nodes)


# --------------------------------------------------------------------------
# correction


def _removal_saving(instance: Instance, route: Route, c: int) -> int:
    cost = instance.cost_se
    k = route.visits.index(c)
    prev = route.home if k == 0 else route.visits[k - 1]
    nxt = route.home if k == len(route.visits) - 1 else route.visits[k + 1]
    return cost[prev][c] + cost[c][nxt] - cost[prev][nxt]


def correction_heuristic(instance: Instance, selected: Sequence[MiniNetwork],
                         direct: Iterable[int] = (), config: Optional[Config] = None) -> Solution:
    """Turn a cover into a solution: one visit per customer, FE routes rebuilt.

    A customer covered several times stays on the route where removing it
    would save the most (``correction_keep="largest"``) or the least
    (``"smallest"``); it is dropped from every other route. Customers in
    ``direct`` not covered by any network are shipped directly.
    """
    keep_largest = (config.correction_keep if config else "largest") == "largest"
    routes = [se_route(n.depot, list(r)) for n in selected for r in n.se_routes]
    hosts: Dict[int, List[int]] = {}
    for k, r in enumerate(routes):
        for c in r.visits:
            hosts.setdefault(c, []).append(k)
    for c in sorted(hosts):
        ks = hosts[c]
        if len(ks) < 2:
            continue
        savings = [(_removal_saving(instance, routes[k], c), k) for k in ks]
        if keep_largest:
            keep = max(savings, key=lambda s: (s[0], -s[1]))[1]
        else:
            keep = min(savings, key=lambda s: (s[0], s[1]))[1]
        for k in ks:
            if k != keep:
                routes[k].visits.remove(c)
    routes = [r for r in routes if r.visits]
    covered = {c for r in routes for c in r.visits}
    sol = Solution([], routes, {r.home for r in routes})
    direct_left = [c for c in direct if c not in covered]
    sol.fe_routes = build_fe_routes(instance, sol.open_depots, sol.depot_loads(instance), direct_left)
    return sol
