"""Objective, feasibility checking and segment-based route evaluation."""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .model import HORIZON, Config, Echelon, Instance, Route, Solution


@dataclass(frozen=True)
class SegmentStats:
    """Resource-extension record of a node sequence.

    ``T`` is travel plus service time without waiting, ``E`` the earliest
    completion time at the last node and ``L`` the latest start time at the
    first node. Completion time for a start at ``s <= L`` is
    ``max(s + T, E)``, which makes the recursion in :func:`concat` exact.
    """

    Q: int
    D: int
    T: int
    E: int
    L: int
    F: bool


NEUTRAL = SegmentStats(0, 0, 0, 0, HORIZON, True)


def single(demand: int, service: int, earliest: int, latest: int) -> SegmentStats:
    return SegmentStats(demand, 0, service, earliest + service, latest, earliest <= latest)


def concat(a: SegmentStats, b: SegmentStats, link_distance: int, link_time: int) -> SegmentStats:
    # E is the earliest completion time, so the forward recursion adds the
    # whole second segment's duration after the link.
    return SegmentStats(
        a.Q + b.Q,
        a.D + link_distance + b.D,
        a.T + link_time + b.T,
        max(a.E + link_time + b.T, b.E),
        min(a.L, b.L - link_time - a.T),
        a.F and b.F and a.E + link_time <= b.L,
    )


def home_window(instance: Instance, route: Route) -> Tuple[int, int]:
    if route.echelon == Echelon.FIRST:
        return instance.fe_vehicle.work_window
    e, l = instance.depot(route.home).operating_window
    ve, vl = instance.se_vehicle.work_window
    return max(e, ve), min(l, vl)


def _matrices(instance: Instance, echelon: Echelon):
    if echelon == Echelon.FIRST:
        return instance.dist_fe, instance.time_fe_np, instance.cost_fe
    return instance.dist_se, instance.time_se_np, instance.cost_se


def _node_stats(instance: Instance, node: int) -> SegmentStats:
    if instance.is_customer(node):
        return single(instance.demand[node], instance.service[node],
                      instance.tw_early[node], instance.tw_late[node])
    # micro-depot visited by a truck: no own demand, load is accounted per route
    return single(0, 0, instance.tw_early[node], instance.tw_late[node])


def sequence_stats(instance: Instance, echelon: Echelon, nodes: Sequence[int],
                   windows: Optional[Dict[int, Tuple[int, int]]] = None) -> SegmentStats:
    """Fold :func:`concat` over ``nodes``; ``windows`` overrides per-position home windows."""
    dist, tmat, _ = _matrices(instance, echelon)
    acc = None
    prev = None
    for k, v in enumerate(nodes):
        if windows and k in windows:
            e, l = windows[k]
            s = single(0, 0, e, l)
        else:
            s = _node_stats(instance, v)
        if acc is None:
            acc = s
        else:
            acc = concat(acc, s, int(dist[prev, v]), int(tmat[prev, v]))
        prev = v
    return acc if acc is not None else NEUTRAL


def route_sequence(route: Route) -> List[int]:
    return [route.home] + route.visits + [route.home]


def route_cost(instance: Instance, route: Route) -> int:
    cost = instance.cost_fe if route.echelon == Echelon.FIRST else instance.cost_se
    prev = route.home
    total = 0
    for v in route.visits:
        total += cost[prev][v]
        prev = v
    return total + cost[prev][route.home]


def evaluate_route(instance: Instance, route: Route) -> Tuple[SegmentStats, int]:
    """REF fold over home -> visits -> home, plus the route's travel cost."""
    seq = route_sequence(route)
    hw = home_window(instance, route)
    stats = sequence_stats(instance, route.echelon, seq, {0: hw, len(seq) - 1: hw})
    return stats, route_cost(instance, route)


def simulate_route(instance: Instance, route: Route) -> Tuple[int, int, bool]:
    """Independent forward simulation: (distance, customer load, time-feasible).

    Leaves home at the earliest allowed moment, waits when early and fails as
    soon as a service starts after its window closes.
    """
    dist, tmat, _ = _matrices(instance, route.echelon)
    start, end = home_window(instance, route)
    t = start
    feasible = start <= end
    prev = route.home
    distance = 0
    load = 0
    for v in route.visits:
        distance += int(dist[prev, v])
        t += int(tmat[prev, v])
        e, l = instance.tw_early[v], instance.tw_late[v]
        if t < e:
            t = e
        if t > l:
            feasible = False
        t += instance.service[v]
        if instance.is_customer(v):
            load += instance.demand[v]
        prev = v
    distance += int(dist[prev, route.home])
    t += int(tmat[prev, route.home])
    if t > end:
        feasible = False
    return distance, load, feasible


@dataclass(frozen=True)
class CostBreakdown:
    depot_opening: int
    fe_travel: int
    se_travel: int
    fe_fixed: int
    se_fixed: int

    @property
    def total(self) -> int:
        return self.depot_opening + self.fe_travel + self.se_travel + self.fe_fixed + self.se_fixed

    def as_dict(self) -> Dict[str, int]:
        return {
            "depot_opening": self.depot_opening,
            "fe_travel": self.fe_travel,
            "se_travel": self.se_travel,
            "fe_fixed": self.fe_fixed,
            "se_fixed": self.se_fixed,
            "total": self.total,
        }


def objective(instance: Instance, solution: Solution) -> CostBreakdown:
    opening = sum(instance.opening_cost[t] for t in solution.open_depots)
    fe = sum(route_cost(instance, r) for r in solution.fe_routes)
    se = sum(route_cost(instance, r) for r in solution.se_routes)
    return CostBreakdown(
        opening, fe, se,
        len(solution.fe_routes) * instance.fe_vehicle.fixed_cost,
        len(solution.se_routes) * instance.se_vehicle.fixed_cost,
    )


def total_cost(instance: Instance, solution: Solution) -> int:
    """Objective value, memoised on ``solution.cost_cache``."""
    if solution.cost_cache is None:
        solution.cost_cache = objective(instance, solution).total
    return solution.cost_cache


def fe_route_load(instance: Instance, route: Route, depot_loads: Dict[int, int]) -> int:
    m = instance.n_depots
    demand = instance.demand
    return sum(depot_loads.get(v, 0) if v <= m else demand[v] for v in route.visits)


def check_feasibility(instance: Instance, solution: Solution,
                      config: Optional[Config] = None) -> List[str]:
    """All constraint violations of ``solution`` as descriptive strings."""
    strict = bool(config and config.strict_depot_vehicle_capacity)
    direct_ok = instance.direct_shipment and (config is None or config.allow_direct_shipment)
    out: List[str] = []
    m = instance.n_depots
    seen: Dict[int, int] = {}
    depot_loads: Dict[int, int] = {}
    depot_routes: Dict[int, int] = {}
    q1, q2 = instance.fe_vehicle.capacity, instance.se_vehicle.capacity

    for k, r in enumerate(solution.se_routes):
        tag = f"SE route {k}"
        if r.echelon != Echelon.SECOND:
            out.append(f"{tag}: wrong echelon tag")
        if not instance.is_depot(r.home):
            out.append(f"{tag}: home {r.home} is not a micro-depot")
        elif r.home not in solution.open_depots:
            out.append(f"{tag}: home {r.home} is not open")
        if not r.visits:
            out.append(f"{tag}: empty route")
        for v in r.visits:
            if not instance.is_customer(v):
                out.append(f"{tag}: visits non-customer node {v}")
                continue
            seen[v] = seen.get(v, 0) + 1
        stats, _ = evaluate_route(instance, r)
        if stats.Q > q2:
            out.append(f"{tag}: load {stats.Q} exceeds vehicle capacity {q2}")
        if not stats.F:
            out.append(f"{tag}: time windows violated")
        depot_loads[r.home] = depot_loads.get(r.home, 0) + stats.Q
        depot_routes[r.home] = depot_routes.get(r.home, 0) + 1

    fe_visits: Dict[int, int] = {}
    for k, r in enumerate(solution.fe_routes):
        tag = f"FE route {k}"
        if r.echelon != Echelon.FIRST or r.home != 0:
            out.append(f"{tag}: must start and end at the main depot")
        if not r.visits:
            out.append(f"{tag}: empty route")
        if len(set(r.visits)) != len(r.visits):
            out.append(f"{tag}: repeats a node")
        for v in r.visits:
            if v == 0:
                out.append(f"{tag}: visits the main depot mid-route")
            elif v <= m:
                fe_visits[v] = fe_visits.get(v, 0) + 1
                if v not in solution.open_depots:
                    out.append(f"{tag}: visits closed micro-depot {v}")
            elif instance.is_customer(v):
                seen[v] = seen.get(v, 0) + 1
                if not direct_ok:
                    out.append(f"{tag}: direct shipment to customer {v} is not allowed")
            else:
                out.append(f"{tag}: unknown node {v}")
        load = fe_route_load(instance, r, depot_loads)
        if load > q1:
            out.append(f"{tag}: load {load} exceeds vehicle capacity {q1}")
        stats, _ = evaluate_route(instance, r)
        if not stats.F:
            out.append(f"{tag}: time windows violated (depot operating windows or customers)")

    for c in instance.customer_ids:
        n = seen.get(c, 0)
        if n == 0:
            out.append(f"customer {c}: not served")
        elif n > 1:
            out.append(f"customer {c}: served {n} times")
    for t in sorted(depot_loads):
        cap = instance.depot_capacity[t] if instance.is_depot(t) else 0
        if depot_loads[t] > cap:
            out.append(f"micro-depot {t}: load {depot_loads[t]} exceeds capacity {cap}")
        if strict and depot_routes[t] * q2 > cap:
            out.append(f"micro-depot {t}: assigned vehicle capacity "
                       f"{depot_routes[t] * q2} exceeds capacity {cap}")
        if fe_visits.get(t, 0) == 0:
            out.append(f"micro-depot {t}: has SE routes but no FE visit")
    for t, n in sorted(fe_visits.items()):
        if n > 1:
            out.append(f"micro-depot {t}: visited by {n} FE routes")
    for t in sorted(solution.open_depots):
        if not instance.is_depot(t):
            out.append(f"open depot {t} is not a micro-depot")
    fl = instance.fe_vehicle.fleet_limit
    if fl is not None and len(solution.fe_routes) > fl:
        out.append(f"FE fleet: {len(solution.fe_routes)} routes exceed limit {fl}")
    fl = instance.se_vehicle.fleet_limit
    if fl is not None and len(solution.se_routes) > fl:
        out.append(f"SE fleet: {len(solution.se_routes)} routes exceed limit {fl}")
    return out


def gap_percent(z: float, bks: float) -> float:
    if bks <= 0:
        raise ValueError(f"best-known value must be positive, got {bks}")
    return (z - bks) / bks * 100.0
