"""Exhaustive solvers for tiny instances, used to validate the heuristics."""

import itertools
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .construction import Assignment, cflp_objective, usable_capacity
from .evaluation import home_window, total_cost
from .model import Config, Echelon, Instance, Solution, fe_route, se_route


class OracleLimitError(ValueError):
    """The instance or pool is larger than the exhaustive solvers accept."""


@dataclass(frozen=True)
class OracleLimits:
    customers: int = 8
    depots: int = 3


# --------------------------------------------------------------------------
# single-route ordering


class _Tours:
    """Cheapest feasible visiting order for every subset of ``universe``.

    Subset DP over (visited set, last node) with Pareto labels on (cost,
    time), exact under time windows since waiting is allowed.
    """

    def __init__(self, instance: Instance, echelon: Echelon, universe: Sequence[int]):
        self.inst = instance
        self.echelon = echelon
        self.universe = list(universe)
        self.index = {v: k for k, v in enumerate(self.universe)}
        if echelon == Echelon.FIRST:
            self.cost, self.time = instance.cost_fe, instance.time_fe_np.tolist()
        else:
            self.cost, self.time = instance.cost_se, instance.time_se_np.tolist()
        self.tables: Dict[int, Dict[int, Tuple[float, Tuple[int, ...]]]] = {}

    def bit(self, v: int) -> int:
        return 1 << self.index[v]

    def best(self, home: int, mask: int) -> Tuple[float, Tuple[int, ...]]:
        """Cheapest tour over the universe members selected by ``mask``."""
        table = self.tables.get(home)
        if table is None:
            table = self.tables[home] = self._table(home)
        return table.get(mask, (math.inf, ()))

    def _table(self, home: int) -> Dict[int, Tuple[float, Tuple[int, ...]]]:
        inst, cost, time = self.inst, self.cost, self.time
        route = fe_route([]) if self.echelon == Echelon.FIRST else se_route(home, [])
        start, end = home_window(inst, route)
        out: Dict[int, Tuple[float, Tuple[int, ...]]] = {}
        if start > end:
            return out
        nodes = self.universe
        k = len(nodes)
        tw_e, tw_l, serv = inst.tw_early, inst.tw_late, inst.service
        # labels[mask][i]: list of (cost, ready time, path)
        labels: List[Dict[int, list]] = [dict() for _ in range(1 << k)]
        for i, v in enumerate(nodes):
            arr = max(start + time[home][v], tw_e[v])
            if arr <= tw_l[v]:
                labels[1 << i][i] = [(cost[home][v], arr + serv[v], (v,))]
        for mask in range(1, 1 << k):
            for i, labs in labels[mask].items():
                v = nodes[i]
                for c0, t0, path in labs:
                    if t0 + time[v][home] <= end:
                        total = c0 + cost[v][home]
                        if total < out.get(mask, (math.inf,))[0]:
                            out[mask] = (total, path)
                for j in range(k):
                    if mask >> j & 1:
                        continue
                    w = nodes[j]
                    nm = mask | (1 << j)
                    bucket = labels[nm].setdefault(j, [])
                    for c0, t0, path in labs:
                        arr = max(t0 + time[v][w], tw_e[w])
                        if arr > tw_l[w]:
                            continue
                        _add_label(bucket, (c0 + cost[v][w], arr + serv[w], path + (w,)))
            labels[mask] = {}
        return out


def _add_label(bucket: list, lab: tuple) -> None:
    c, t = lab[0], lab[1]
    for o in bucket:
        if o[0] <= c and o[1] <= t:
            return
    bucket[:] = [o for o in bucket if not (c <= o[0] and t <= o[1])]
    bucket.append(lab)


def _partition_dp(bits: Sequence[int], weight: Sequence[int], limit: int, block_cost):
    """Cheapest split of items into blocks of weight <= limit.

    Item ``i`` is identified by the bit ``bits[i]``; ``block_cost(mask)``
    gets the OR of a block's bits and returns (cost, payload).
    Returns (cost, [payloads]).
    """
    k = len(bits)
    full = (1 << k) - 1
    best = [math.inf] * (full + 1)
    choice = [0] * (full + 1)
    best[0] = 0
    wsum = [0] * (full + 1)
    for mask in range(1, full + 1):
        low = mask & -mask
        wsum[mask] = wsum[mask ^ low] + weight[low.bit_length() - 1]
    gbits = [0] * (full + 1)
    for mask in range(1, full + 1):
        low = mask & -mask
        gbits[mask] = gbits[mask ^ low] | bits[low.bit_length() - 1]
    block: Dict[int, Tuple[float, object]] = {}
    for mask in range(1, full + 1):
        low = mask & -mask
        rest = mask ^ low
        sub = rest
        while True:
            b = sub | low
            if wsum[b] <= limit:
                if b not in block:
                    block[b] = block_cost(gbits[b])
                val = block[b][0] + best[mask ^ b]
                if val < best[mask]:
                    best[mask], choice[mask] = val, b
            if sub == 0:
                break
            sub = (sub - 1) & rest
    if best[full] == math.inf:
        return math.inf, []
    out, mask = [], full
    while mask:
        b = choice[mask]
        out.append(block[b][1])
        mask ^= b
    return best[full], out


# --------------------------------------------------------------------------
# full problem


def brute_force_optimum(instance: Instance, limits: Optional[OracleLimits] = None,
                        config: Optional[Config] = None) -> Tuple[Solution, int]:
    """Exact optimum by exhaustive enumeration.

    Every customer goes to one micro-depot or is shipped directly. Per depot
    the SE part is an exact route-partition DP over customer subsets; the FE
    part is the same DP over open depots and direct customers. Solutions are
    pruned once their opening plus SE cost reaches the incumbent.
    """
    limits = limits or OracleLimits()
    config = config or Config()
    n, m = instance.n_customers, instance.n_depots
    if n > limits.customers or m > limits.depots:
        raise OracleLimitError(
            f"oracle accepts at most {limits.customers} customers and {limits.depots} depots, "
            f"got {n} and {m}")
    if instance.fe_vehicle.fleet_limit is not None or instance.se_vehicle.fleet_limit is not None:
        raise OracleLimitError("fleet limits are not supported by the oracle")
    if config.strict_depot_vehicle_capacity:
        raise OracleLimitError("strict depot vehicle capacity is not supported by the oracle")

    custs = list(instance.customer_ids)
    demand = instance.demand
    q1, q2 = instance.fe_vehicle.capacity, instance.se_vehicle.capacity
    f1, f2 = instance.fe_vehicle.fixed_cost, instance.se_vehicle.fixed_cost
    se_tours = _Tours(instance, Echelon.SECOND, custs)
    fe_tours = _Tours(instance, Echelon.FIRST, list(instance.depot_ids) + custs)

    # per depot and customer subset: cheapest set of SE routes
    se_best: Dict[Tuple[int, FrozenSet[int]], Tuple[float, list]] = {}

    def se_part(t: int, subset: FrozenSet[int]) -> Tuple[float, list]:
        key = (t, subset)
        if key not in se_best:
            items = sorted(subset)
            def block(mask):
                c, seq = se_tours.best(t, mask)
                return c + f2, seq
            se_best[key] = _partition_dp([se_tours.bit(c) for c in items],
                                         [demand[c] for c in items], q2, block)
        return se_best[key]

    fe_memo: Dict[tuple, Tuple[float, list]] = {}

    def fe_part(nodes: Tuple[Tuple[int, int], ...]) -> Tuple[float, list]:
        if nodes not in fe_memo:
            def block(mask):
                c, seq = fe_tours.best(0, mask)
                return c + f1, seq
            fe_memo[nodes] = _partition_dp([fe_tours.bit(v) for v, _ in nodes],
                                           [w for _, w in nodes], q1, block)
        return fe_memo[nodes]

    options = list(instance.depot_ids) + ([0] if config.allow_direct_shipment and instance.direct_shipment else [])
    best_val = math.inf
    best_sol: Optional[Solution] = None
    for combo in itertools.product(options, repeat=n):
        groups: Dict[int, List[int]] = {}
        for c, t in zip(custs, combo):
            groups.setdefault(t, []).append(c)
        val = 0.0
        se_routes = []
        feasible = True
        for t in sorted(groups):
            if t == 0:
                continue
            members = frozenset(groups[t])
            if sum(demand[c] for c in members) > instance.depot_capacity[t]:
                feasible = False
                break
            c_se, seqs = se_part(t, members)
            val += c_se + instance.opening_cost[t]
            if val >= best_val:
                feasible = False
                break
            se_routes.extend(se_route(t, s) for s in seqs)
        if not feasible:
            continue
        nodes = tuple(sorted(
            [(t, sum(demand[c] for c in groups[t])) for t in groups if t != 0]
            + [(c, demand[c]) for c in groups.get(0, [])]))
        c_fe, fe_seqs = fe_part(nodes)
        val += c_fe
        if val < best_val:
            best_val = val
            best_sol = Solution([fe_route(s) for s in fe_seqs], se_routes,
                                {t for t in groups if t != 0})
    if best_sol is None:
        raise ValueError("instance has no feasible solution")
    best_sol.fe_routes.sort(key=lambda r: r.visits)
    best_sol.se_routes.sort(key=lambda r: (r.home, r.visits))
    return best_sol, total_cost(instance, best_sol)


# --------------------------------------------------------------------------
# facility location


def brute_force_cflp(instance: Instance, limits: Tuple[int, int] = (10, 4)) -> Tuple[Assignment, int]:
    """Exact capacitated facility location by depth-first enumeration.

    Opening an unused depot never pays off, so the open set is the set of
    depots that receive customers.
    """
    n, m = instance.n_customers, instance.n_depots
    if n > limits[0] or m > limits[1]:
        raise OracleLimitError(f"CFLP oracle accepts at most {limits[0]} customers and "
                               f"{limits[1]} depots, got {n} and {m}")
    custs = sorted(instance.customer_ids, key=lambda c: (-instance.demand[c], c))
    depots = list(instance.depot_ids)
    cse, cfe = instance.cost_se, instance.cost_fe
    fixed = {t: cfe[0][t] + instance.opening_cost[t] for t in depots}
    min_assign = [min(cse[t][c] for t in depots) for c in custs]
    tail = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        tail[i] = tail[i + 1] + min_assign[i]
    load = {t: 0 for t in depots}
    cap = usable_capacity(instance)
    choice: Dict[int, int] = {}
    best = [math.inf, None]

    def dfs(i: int, acc: int) -> None:
        if acc + tail[i] >= best[0]:
            return
        if i == n:
            best[0], best[1] = acc, dict(choice)
            return
        c = custs[i]
        q = instance.demand[c]
        for t in depots:
            if load[t] + q > cap[t]:
                continue
            extra = cse[t][c] + (fixed[t] if load[t] == 0 else 0)
            load[t] += q
            choice[c] = t
            dfs(i + 1, acc + extra)
            load[t] -= q
            del choice[c]

    dfs(0, 0)
    if best[1] is None:
        from .construction import InfeasibleError
        raise InfeasibleError("no capacity-feasible assignment exists")
    a = Assignment(set(best[1].values()), best[1])
    return a, cflp_objective(instance, a)


# --------------------------------------------------------------------------
# set cover


def brute_force_set_cover(pool, universe: Iterable[int], limit: int = 20):
    """Exhaustive minimum-cost cover with at most one network per depot.

    Returns (selected networks, cost) or None when no cover exists.
    """
    nets = pool.networks() if hasattr(pool, "networks") else list(pool)
    if len(nets) > limit:
        raise OracleLimitError(f"set-cover oracle accepts at most {limit} networks, got {len(nets)}")
    need = set(universe)
    by_depot: Dict[int, list] = {}
    for net in nets:
        by_depot.setdefault(net.depot, []).append(net)
    choices = [[None] + by_depot[t] for t in sorted(by_depot)]
    best = None
    for pick in itertools.product(*choices):
        chosen = [p for p in pick if p is not None]
        covered = set().union(*(p.customers for p in chosen)) if chosen else set()
        if not need <= covered:
            continue
        cost = sum(p.cost for p in chosen)
        if best is None or cost < best[1]:
            best = (chosen, cost)
    return best
