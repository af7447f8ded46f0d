"""Repair operators: greedy insertion, regret-2 insertion and FE route merging."""

import random
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .destroy import RemovalResult, close_unused_depots
from .model import Config, Echelon, Instance, Route, Solution, fe_route, se_route

INF = kernels.INF
SE, FE = 0, 1


class RepairError(RuntimeError):
    """No feasible way to insert a customer exists."""


class InsertionState:
    """Mutable view of a partial solution with the loads needed for feasibility checks."""

    def __init__(self, instance: Instance, solution: Solution, config: Config,
                 removed_depots: Sequence[int] = ()):
        self.inst = instance
        # depots closed by the destroy step are reopened only as a last resort
        self.removed_depots = set(removed_depots)
        self.sol = solution
        self.cfg = config
        self.kd = kernels.kernel_data(instance)
        self.q1 = instance.fe_vehicle.capacity
        self.q2 = instance.se_vehicle.capacity
        self.tw = instance.has_time_windows
        self.direct = config.allow_direct_shipment and instance.direct_shipment
        demand = instance.demand
        m = instance.n_depots
        self.se_load = [sum(demand[c] for c in r.visits) for r in solution.se_routes]
        self.depot_load: Dict[int, int] = {}
        self.depot_routes: Dict[int, int] = {}
        for r, load in zip(solution.se_routes, self.se_load):
            self.depot_load[r.home] = self.depot_load.get(r.home, 0) + load
            self.depot_routes[r.home] = self.depot_routes.get(r.home, 0) + 1
        self.fe_of: Dict[int, int] = {}
        for k, r in enumerate(solution.fe_routes):
            for v in r.visits:
                if v <= m:
                    self.fe_of[v] = k
        for t in sorted(solution.open_depots):
            if t not in self.fe_of:
                solution.fe_routes.append(fe_route([t]))
                self.fe_of[t] = len(solution.fe_routes) - 1
        self.fe_load = [sum(self.depot_load.get(v, 0) if v <= m else demand[v] for v in r.visits)
                        for r in solution.fe_routes]

    # slack -----------------------------------------------------------------
    def se_slack(self, k: int) -> int:
        r = self.sol.se_routes[k]
        h = r.home
        return min(self.q2 - self.se_load[k],
                   self.inst.depot_capacity[h] - self.depot_load.get(h, 0),
                   self.q1 - self.fe_load[self.fe_of[h]])

    def fe_slack(self, k: int) -> int:
        return self.q1 - self.fe_load[k]

    def columns(self) -> List[Tuple[int, int]]:
        cols = [(SE, k) for k in range(len(self.sol.se_routes))]
        if self.direct:
            cols += [(FE, k) for k in range(len(self.sol.fe_routes))]
        return cols

    def column_home(self, col: Tuple[int, int]) -> int:
        kind, k = col
        return self.sol.se_routes[k].home if kind == SE else 0

    # scanning --------------------------------------------------------------
    def _route(self, kind: int, k: int) -> Route:
        return self.sol.se_routes[k] if kind == SE else self.sol.fe_routes[k]

    def _mats(self, kind: int):
        kd = self.kd
        if kind == SE:
            return kd.cost_se, kd.time_se, kd.se_tw_e, kd.se_tw_l
        return kd.cost_fe, kd.time_fe, kd.fe_tw_e, kd.fe_tw_l

    def scan_one(self, kind: int, k: int, c: int) -> Tuple[int, int, int]:
        r = self._route(kind, k)
        M, T, e, l = self._mats(kind)
        if self.tw:
            return kernels.insertion_scan_tw(M, T, self.kd.demand, self.kd.service, e, l,
                                             r.home, r.visits, c)
        return kernels.insertion_scan(M, r.home, r.visits, c)

    def scan_many(self, kind: int, k: int, custs: Sequence[int]):
        if self.tw:
            vals = [self.scan_one(kind, k, c) for c in custs]
            return [v[0] for v in vals], [v[1] for v in vals], [v[2] for v in vals]
        r = self._route(kind, k)
        M = self._mats(kind)[0]
        return kernels.scan_route_many(M, r.home, r.visits, list(custs))

    def best_in(self, kind: int, allowed: Sequence[int], c: int) -> Tuple[int, int, int]:
        """Cheapest position of ``c`` over routes ``allowed`` of one echelon: (delta, route, pos)."""
        if not allowed:
            return INF, -1, -1
        if self.tw:
            best = (INF, -1, -1)
            for k in allowed:
                d, p, _ = self.scan_one(kind, k, c)
                if p >= 0 and d < best[0]:
                    best = (d, k, p)
            return best
        routes = self.sol.se_routes if kind == SE else self.sol.fe_routes
        homes, flat, starts = [], [], [0]
        mask = [0] * len(routes)
        for k in allowed:
            mask[k] = 1
        for r in routes:
            homes.append(r.home)
            flat.extend(r.visits)
            starts.append(len(flat))
        pv = self.kd.module.prepare_vector
        d, k, p, _ = kernels.scan_routes(self._mats(kind)[0], pv(homes), pv(flat), pv(starts),
                                         pv(mask), c)
        return d, k, p

    # mutation --------------------------------------------------------------
    def insert(self, kind: int, k: int, pos: int, c: int) -> None:
        q = self.inst.demand[c]
        r = self._route(kind, k)
        r.visits.insert(pos, c)
        if kind == SE:
            self.se_load[k] += q
            self.depot_load[r.home] = self.depot_load.get(r.home, 0) + q
            self.fe_load[self.fe_of[r.home]] += q
        else:
            self.fe_load[k] += q

    def can_open_route(self, t: int, q: int) -> bool:
        inst = self.inst
        if t not in self.fe_of or q > self.q2:
            return False
        if self.depot_load.get(t, 0) + q > inst.depot_capacity[t]:
            return False
        if self.fe_load[self.fe_of[t]] + q > self.q1:
            return False
        if self.cfg.strict_depot_vehicle_capacity and \
                (self.depot_routes.get(t, 0) + 1) * self.q2 > inst.depot_capacity[t]:
            return False
        return True

    def _single_tw_ok(self, echelon, home, c=None, visits=None) -> bool:
        from .evaluation import evaluate_route
        stats, _ = evaluate_route(self.inst, Route(echelon, home, visits if visits is not None
                                                   else ([] if c is None else [c])))
        return stats.F

    def new_route(self, t: int, c: int) -> int:
        q = self.inst.demand[c]
        self.sol.se_routes.append(se_route(t, [c]))
        self.se_load.append(q)
        self.depot_load[t] = self.depot_load.get(t, 0) + q
        self.depot_routes[t] = self.depot_routes.get(t, 0) + 1
        self.fe_load[self.fe_of[t]] += q
        return len(self.sol.se_routes) - 1

    def new_route_options(self, c: int, depots: Optional[Sequence[int]] = None) -> List[Tuple[int, int]]:
        """(cost, depot) for a fresh SE route serving ``c`` from each feasible open depot."""
        cse = self.inst.cost_se
        f2 = self.inst.se_vehicle.fixed_cost
        q = self.inst.demand[c]
        out = []
        for t in sorted(depots if depots is not None else self.sol.open_depots):
            if t not in self.sol.open_depots or not self.can_open_route(t, q):
                continue
            if self.tw and not self._single_tw_ok(Echelon.SECOND, t, c):
                continue
            out.append((cse[t][c] + cse[c][t] + f2, t))
        return sorted(out)

    def attach_option(self, t: int, need: int) -> Tuple[int, int, int]:
        """Cheapest FE position for depot ``t`` with ``need`` slack: (delta, route, pos).

        Route -1 means a new FE route; its delta includes the FE fixed cost.
        """
        cfe = self.inst.cost_fe
        best = None
        for k, r in enumerate(self.sol.fe_routes):
            if self.fe_load[k] + need > self.q1:
                continue
            seq = [0] + r.visits + [0]
            for p in range(len(seq) - 1):
                a, b = seq[p], seq[p + 1]
                d = cfe[a][t] + cfe[t][b] - cfe[a][b]
                if best is not None and d >= best[0]:
                    continue
                if self.tw and not self._single_tw_ok(Echelon.FIRST, 0,
                                                      visits=r.visits[:p] + [t] + r.visits[p:]):
                    continue
                best = (d, k, p)
        if best is None:
            return cfe[0][t] + cfe[t][0] + self.inst.fe_vehicle.fixed_cost, -1, 0
        return best

    def attach_depot(self, t: int, load: int, need: Optional[int] = None) -> int:
        """Put depot ``t`` on the cheapest FE route with ``need`` slack, or a new one.

        ``load`` is added to the chosen route; returns its index.
        """
        _, k, p = self.attach_option(t, load if need is None else need)
        if k < 0:
            self.sol.fe_routes.append(fe_route([t]))
            self.fe_load.append(load)
            k = len(self.sol.fe_routes) - 1
        else:
            self.sol.fe_routes[k].visits.insert(p, t)
            self.fe_load[k] += load
        self.fe_of[t] = k
        self.sol.open_depots.add(t)
        return k

    def open_depot_for(self, c: int, limit: int = INF) -> bool:
        """Open the closest feasible closed depot for ``c`` unless that costs more than ``limit``."""
        inst = self.inst
        q = inst.demand[c]
        if q > self.q2 or q > self.q1:
            return False
        dist = inst.dist_se
        closed = [t for t in inst.depot_ids
                  if t not in self.sol.open_depots and inst.depot_capacity[t] >= q]
        closed.sort(key=lambda t: (t in self.removed_depots, int(dist[t, c]), inst.opening_cost[t], t))
        cse = inst.cost_se
        for t in closed:
            if self.cfg.strict_depot_vehicle_capacity and self.q2 > inst.depot_capacity[t]:
                continue
            if self.tw and not self._single_tw_ok(Echelon.SECOND, t, c):
                continue
            if limit < INF:
                cost = (inst.opening_cost[t] + self.attach_option(t, q)[0]
                        + cse[t][c] + cse[c][t] + inst.se_vehicle.fixed_cost)
                if cost > limit:
                    return False
            self.attach_depot(t, 0, need=q)
            self.new_route(t, c)
            return True
        return False

    def direct_route_cost(self, c: int) -> int:
        """Cost of a new FE route serving ``c`` alone, INF when not allowed."""
        inst = self.inst
        if not self.direct or inst.demand[c] > self.q1:
            return INF
        if self.tw and not self._single_tw_ok(Echelon.FIRST, 0, visits=[c]):
            return INF
        return inst.cost_fe[0][c] + inst.cost_fe[c][0] + inst.fe_vehicle.fixed_cost

    def fallback(self, c: int, tag: Optional[int] = None) -> None:
        """No position in existing routes: the cheapest of a new SE route, a new depot
        or a new direct FE route. A swap tag puts its depot first."""
        if tag is not None:
            opts = self.new_route_options(c, [tag])
            if opts:
                self.new_route(opts[0][1], c)
                return
        direct = self.direct_route_cost(c)
        opts = self.new_route_options(c)
        if opts:
            if opts[0][0] <= direct:
                self.new_route(opts[0][1], c)
                return
        elif self.open_depot_for(c, direct):
            return
        if direct < INF:
            self.sol.fe_routes.append(fe_route([c]))
            self.fe_load.append(self.inst.demand[c])
            return
        raise RepairError(f"customer {c} (demand {self.inst.demand[c]}) cannot be inserted anywhere")

    def greedy_place(self, c: int, tag: Optional[int] = None) -> None:
        q = self.inst.demand[c]
        if tag is not None:
            allowed = [k for k, r in enumerate(self.sol.se_routes)
                       if r.home == tag and self.se_slack(k) >= q]
            d, k, p = self.best_in(SE, allowed, c)
            if k >= 0:
                self.insert(SE, k, p, c)
                return
            opts = self.new_route_options(c, [tag])
            if opts:
                self.new_route(opts[0][1], c)
                return
        allowed = [k for k in range(len(self.sol.se_routes)) if self.se_slack(k) >= q]
        best = self.best_in(SE, allowed, c)
        kind = SE
        if self.direct:
            allowed = [k for k in range(len(self.sol.fe_routes)) if self.fe_slack(k) >= q]
            fb = self.best_in(FE, allowed, c)
            if fb[1] >= 0 and fb[0] < best[0]:
                best, kind = fb, FE
        d, k, p = best
        if k >= 0:
            self.insert(kind, k, p, c)
        else:
            self.fallback(c)

    def finish(self) -> Solution:
        close_unused_depots(self.inst, self.sol)
        self.sol.cost_cache = None
        return self.sol


def greedy_insertion(instance: Instance, removal: RemovalResult, config: Optional[Config] = None,
                     rng: Optional[random.Random] = None) -> Solution:
    """Insert removed customers in ascending demand order at their cheapest feasible position."""
    config = config or Config()
    st = InsertionState(instance, removal.partial, config, removal.removed_depots)
    demand = instance.demand
    for c in sorted(removal.removed, key=lambda v: (demand[v], v)):
        st.greedy_place(c, removal.swap_tags.get(c))
    return st.finish()


def regret_insertion(instance: Instance, removal: RemovalResult, config: Optional[Config] = None,
                     rng: Optional[random.Random] = None) -> Solution:
    """Repeatedly insert the customer with the largest best-vs-second-best gap."""
    config = config or Config()
    st = InsertionState(instance, removal.partial, config, removal.removed_depots)
    pending = sorted(removal.removed)
    if not pending:
        return st.finish()
    demand = np.asarray([instance.demand[c] for c in pending], dtype=np.int64)
    cols = st.columns()
    K = len(pending)
    D1 = np.full((K, len(cols)), INF, dtype=np.int64)
    P1 = np.full((K, len(cols)), -1, dtype=np.int64)
    D2 = np.full((K, len(cols)), INF, dtype=np.int64)

    def refresh(j: int, rows: np.ndarray):
        kind, k = cols[j]
        b1, p1, b2 = st.scan_many(kind, k, [pending[i] for i in rows])
        D1[rows, j] = b1
        P1[rows, j] = p1
        D2[rows, j] = b2

    alive = np.ones(K, dtype=bool)
    rows_all = np.arange(K)
    for j in range(len(cols)):
        refresh(j, rows_all)
    tags = removal.swap_tags
    tag_target = np.asarray([tags.get(c, -1) for c in pending], dtype=np.int64)
    ids = np.asarray(pending, dtype=np.int64)

    while alive.any():
        rows = np.flatnonzero(alive)
        slack = np.asarray([st.se_slack(k) if kind == SE else st.fe_slack(k) for kind, k in cols],
                           dtype=np.int64)
        allowed = (demand[rows, None] <= slack[None, :]) & (P1[rows] >= 0)
        homes = np.asarray([st.column_home(c) if c[0] == SE else -2 for c in cols], dtype=np.int64)
        tagged = tag_target[rows] >= 0
        if tagged.any():
            on_target = homes[None, :] == tag_target[rows, None]
            has_pos = (allowed & on_target).any(axis=1)
            restrict = tagged & has_pos
            # no position at the target depot: a fresh route there comes first
            fresh = np.zeros(len(rows), dtype=bool)
            for a in np.flatnonzero(tagged & ~has_pos):
                c_a = pending[rows[a]]
                fresh[a] = bool(st.new_route_options(c_a, [int(tag_target[rows[a]])]))
            allowed = np.where(restrict[:, None], allowed & on_target, allowed)
            allowed &= ~fresh[:, None]
        M1 = np.where(allowed, D1[rows], INF)
        bc = np.argmin(M1, axis=1) if M1.shape[1] else np.zeros(len(rows), dtype=np.int64)
        if M1.shape[1]:
            best = M1[np.arange(len(rows)), bc]
            others = M1.copy()
            others[np.arange(len(rows)), bc] = INF
            second = np.minimum(others.min(axis=1),
                                np.where(allowed[np.arange(len(rows)), bc],
                                         D2[rows, bc], INF))
        else:
            best = np.full(len(rows), INF, dtype=np.int64)
            second = best.copy()
        no_pos = best >= INF
        regret = np.where(no_pos | (second >= INF), INF, second - best)
        # largest regret, then cheapest best delta, then smallest id
        pick = np.lexsort((ids[rows], best, -regret))[0]
        i = rows[pick]
        c = pending[i]
        alive[i] = False
        if no_pos[pick]:
            n_se, n_fe = len(st.sol.se_routes), len(st.sol.fe_routes)
            fe_before = [list(r.visits) for r in st.sol.fe_routes]
            st.fallback(c, tags.get(c))
            changed = [(SE, k) for k in range(n_se, len(st.sol.se_routes))]
            if st.direct:
                changed += [(FE, k) for k in range(n_fe, len(st.sol.fe_routes))]
                changed += [(FE, k) for k in range(n_fe) if st.sol.fe_routes[k].visits != fe_before[k]]
        else:
            j = int(bc[pick])
            kind, k = cols[j]
            st.insert(kind, k, int(P1[i, j]), c)
            changed = [cols[j]]
        if not alive.any():
            break
        live = np.flatnonzero(alive)
        new_cols = [col for col in changed if col not in cols]
        if new_cols:
            extra = len(new_cols)
            D1 = np.hstack([D1, np.full((K, extra), INF, dtype=np.int64)])
            P1 = np.hstack([P1, np.full((K, extra), -1, dtype=np.int64)])
            D2 = np.hstack([D2, np.full((K, extra), INF, dtype=np.int64)])
            cols.extend(new_cols)
        for col in changed:
            refresh(cols.index(col), live)
    return st.finish()


def merge_fe_routes(instance: Instance, removal: RemovalResult, config: Optional[Config] = None,
                    rng: Optional[random.Random] = None) -> Solution:
    """Re-attach detached depots (heaviest first) to remaining FE routes, then greedy."""
    config = config or Config()
    st = InsertionState(instance, removal.partial, config, removal.removed_depots)
    demand = instance.demand
    restored = set()
    order = sorted(removal.detached.items(),
                   key=lambda kv: (-sum(demand[c] for r in kv[1] for c in r.visits), kv[0]))
    for t, routes in order:
        if not routes:
            continue
        load = sum(demand[c] for r in routes for c in r.visits)
        if load > st.q1:
            continue
        st.attach_depot(t, load)
        for r in routes:
            st.sol.se_routes.append(r.copy())
            q = sum(demand[c] for c in r.visits)
            st.se_load.append(q)
            st.depot_load[t] = st.depot_load.get(t, 0) + q
            st.depot_routes[t] = st.depot_routes.get(t, 0) + 1
            restored.update(r.visits)
    for c in sorted((c for c in removal.removed if c not in restored), key=lambda v: (demand[v], v)):
        st.greedy_place(c, removal.swap_tags.get(c))
    return st.finish()


RepairFn = Callable[..., Solution]

ALL_REPAIR: List[Tuple[str, RepairFn]] = [
    ("greedy_insertion", greedy_insertion),
    ("regret_insertion", regret_insertion),
    ("merge_fe_routes", merge_fe_routes),
]
