"""Domain types for the two-echelon location-routing problem.

Nodes are indexed positionally: 0 is the main depot, ``1..m`` are the
candidate micro-depots and ``m+1..m+n`` are the customers. Every matrix on
:class:`Instance` is indexed with these ids directly.
"""

from dataclasses import dataclass, field, fields, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

# Stand-in for an open time window end; keeps all time arithmetic integral.
HORIZON = 10**12

Window = Tuple[int, int]
OPEN_WINDOW: Window = (0, HORIZON)


class DepotKind(str, Enum):
    STATIONARY = "stationary"
    MOBILE = "mobile"


class Echelon(str, Enum):
    FIRST = "first"
    SECOND = "second"


@dataclass(frozen=True)
class Customer:
    id: int
    demand: int
    service_time: int = 0
    time_window: Window = OPEN_WINDOW


@dataclass(frozen=True)
class MicroDepot:
    id: int
    kind: DepotKind
    capacity: int
    opening_cost: int
    operating_window: Window = OPEN_WINDOW


@dataclass(frozen=True)
class VehicleClass:
    echelon: Echelon
    capacity: int
    fixed_cost: int
    cost_per_distance: int = 1
    fleet_limit: Optional[int] = None
    work_window: Window = OPEN_WINDOW


@dataclass(frozen=True, eq=False)
class Instance:
    """Immutable problem data.

    Distances are integer matrices. Arc costs are ``cost_per_distance`` times
    distance and are cached as both numpy arrays and nested lists, since the
    pure-Python hot paths index lists much faster than arrays.
    """

    name: str
    coords: np.ndarray
    customers: Tuple[Customer, ...]
    micro_depots: Tuple[MicroDepot, ...]
    fe_vehicle: VehicleClass
    se_vehicle: VehicleClass
    dist_fe: np.ndarray
    dist_se: np.ndarray
    travel_time_fe: Optional[np.ndarray] = None
    travel_time_se: Optional[np.ndarray] = None
    bks: Optional[int] = None
    # money units per natural currency unit (1 for benchmarks, 10**6 for case studies)
    money_scale: int = 1
    # kilometres per distance unit; None when the instance has no physical scale
    distance_unit_km: Optional[float] = None
    scaling: Optional[Dict[str, int]] = None
    # whether FE routes may serve customers directly
    direct_shipment: bool = True

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "coords", np.asarray(self.coords, dtype=float))
        set_(self, "dist_fe", np.ascontiguousarray(self.dist_fe, dtype=np.int64))
        set_(self, "dist_se", np.ascontiguousarray(self.dist_se, dtype=np.int64))
        if self.travel_time_fe is not None:
            set_(self, "travel_time_fe", np.ascontiguousarray(self.travel_time_fe, dtype=np.int64))
        if self.travel_time_se is not None:
            set_(self, "travel_time_se", np.ascontiguousarray(self.travel_time_se, dtype=np.int64))

        m, n = len(self.micro_depots), len(self.customers)
        size = 1 + m + n
        set_(self, "n_depots", m)
        set_(self, "n_customers", n)
        set_(self, "n_nodes", size)
        set_(self, "depot_ids", tuple(range(1, m + 1)))
        set_(self, "customer_ids", tuple(range(m + 1, size)))

        demand = [0] * size
        service = [0] * size
        tw_e = [0] * size
        tw_l = [HORIZON] * size
        for c in self.customers:
            demand[c.id] = c.demand
            service[c.id] = c.service_time
            tw_e[c.id], tw_l[c.id] = c.time_window
        for d in self.micro_depots:
            tw_e[d.id], tw_l[d.id] = d.operating_window
        tw_e[0], tw_l[0] = self.fe_vehicle.work_window
        set_(self, "demand", demand)
        set_(self, "service", service)
        set_(self, "tw_early", tw_e)
        set_(self, "tw_late", tw_l)
        set_(self, "depot_capacity", [0] + [d.capacity for d in self.micro_depots] + [0] * n)
        set_(self, "opening_cost", [0] + [d.opening_cost for d in self.micro_depots] + [0] * n)
        set_(self, "has_time_windows", any(
            c.time_window != OPEN_WINDOW or c.service_time for c in self.customers
        ) or any(d.operating_window != OPEN_WINDOW for d in self.micro_depots)
          or self.fe_vehicle.work_window != OPEN_WINDOW
          or self.se_vehicle.work_window != OPEN_WINDOW)

        cost_fe = self.dist_fe * int(self.fe_vehicle.cost_per_distance)
        cost_se = self.dist_se * int(self.se_vehicle.cost_per_distance)
        set_(self, "cost_fe_np", np.ascontiguousarray(cost_fe, dtype=np.int64))
        set_(self, "cost_se_np", np.ascontiguousarray(cost_se, dtype=np.int64))
        set_(self, "cost_fe", cost_fe.tolist())
        set_(self, "cost_se", cost_se.tolist())
        tfe = self.dist_fe if self.travel_time_fe is None else self.travel_time_fe
        tse = self.dist_se if self.travel_time_se is None else self.travel_time_se
        set_(self, "time_fe_np", np.ascontiguousarray(tfe, dtype=np.int64))
        set_(self, "time_se_np", np.ascontiguousarray(tse, dtype=np.int64))

    # role helpers -------------------------------------------------------
    def is_depot(self, node: int) -> bool:
        return 1 <= node <= self.n_depots

    def is_customer(self, node: int) -> bool:
        return self.n_depots < node < self.n_nodes

    def depot(self, node: int) -> MicroDepot:
        return self.micro_depots[node - 1]

    def customer(self, node: int) -> Customer:
        return self.customers[node - self.n_depots - 1]

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                if a is None or b is None or a.shape != b.shape or not np.array_equal(a, b):
                    return False
            elif a != b:
                return False
        return True

    __hash__ = object.__hash__


class Route:
    """A vehicle route. ``visits`` excludes the home node at both ends."""

    __slots__ = ("echelon", "home", "visits")

    def __init__(self, echelon: Echelon, home: int, visits: Sequence[int]):
        self.echelon = echelon
        self.home = home
        self.visits = list(visits)

    def copy(self) -> "Route":
        return Route(self.echelon, self.home, self.visits)

    def __eq__(self, other):
        return (isinstance(other, Route) and self.echelon == other.echelon
                and self.home == other.home and self.visits == other.visits)

    def __repr__(self):
        tag = "FE" if self.echelon == Echelon.FIRST else "SE"
        return f"Route({tag}, {self.home}, {self.visits})"

    def __len__(self):
        return len(self.visits)


def fe_route(visits: Sequence[int]) -> Route:
    return Route(Echelon.FIRST, 0, visits)


def se_route(home: int, visits: Sequence[int]) -> Route:
    return Route(Echelon.SECOND, home, visits)


@dataclass
class Solution:
    fe_routes: List[Route] = field(default_factory=list)
    se_routes: List[Route] = field(default_factory=list)
    open_depots: Set[int] = field(default_factory=set)
    cost_cache: Optional[int] = None

    def copy(self) -> "Solution":
        return Solution(
            [Route(r.echelon, r.home, r.visits) for r in self.fe_routes],
            [Route(r.echelon, r.home, r.visits) for r in self.se_routes],
            set(self.open_depots),
            self.cost_cache,
        )

    def se_customers(self) -> List[int]:
        return [c for r in self.se_routes for c in r.visits]

    def direct_customers(self, instance: Instance) -> List[int]:
        m = instance.n_depots
        return [v for r in self.fe_routes for v in r.visits if v > m]

    def served(self, instance: Instance) -> List[int]:
        return self.se_customers() + self.direct_customers(instance)

    def depot_loads(self, instance: Instance) -> Dict[int, int]:
        demand = instance.demand
        loads: Dict[int, int] = {}
        for r in self.se_routes:
            loads[r.home] = loads.get(r.home, 0) + sum(demand[c] for c in r.visits)
        return loads

    def signature(self) -> tuple:
        """Order-insensitive structural key, handy for equality checks."""
        fe = tuple(sorted(tuple(r.visits) for r in self.fe_routes))
        se = tuple(sorted((r.home, tuple(r.visits)) for r in self.se_routes))
        return fe, se, tuple(sorted(self.open_depots))


@dataclass
class Config:
    """Search parameters; defaults are the tuned values for the ALNS."""

    max_iter: int = 100_000
    lambda_smoothing: float = 0.8
    scores: Tuple[float, float, float, float] = (10.0, 5.0, 1.0, 0.0)
    t_init: float = 10.0
    t_final: float = 1.0
    temperature_schedule: str = "linear"
    # only consulted by non-linear schedules; kept for parameter-table parity
    temp_alpha: float = 0.8
    neighbor_fraction: float = 0.2
    # lower bound on neighbor list length so tiny instances keep usable lists
    neighbor_min: int = 4
    destroy_bound: float = 1.0
    ls_every: int = 1
    sc_every: int = 2000
    relocate_intra_route: bool = False
    partial_microdepot_removal: bool = False
    strict_depot_vehicle_capacity: bool = False
    rng_seed: int = 0
    init_method: str = "flp"
    decomp_iter: Optional[int] = None
    correction_keep: str = "largest"
    sa_reference: str = "current"
    allow_direct_shipment: bool = True
    weight_floor: float = 1e-6
    # cap on stored mini-networks; None keeps every distinct one
    pool_limit: Optional[int] = 20_000

    def __post_init__(self):
        self.scores = tuple(float(s) for s in self.scores)

    def validate(self) -> List[str]:
        problems = []
        if not 0.0 <= self.lambda_smoothing <= 1.0:
            problems.append("lambda_smoothing must lie in [0, 1]")
        if not self.t_init >= self.t_final > 0:
            problems.append("temperatures need t_init >= t_final > 0")
        if self.max_iter < 0:
            problems.append("max_iter must be non-negative")
        for name in ("ls_every", "sc_every"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1")
        if not 0.0 < self.neighbor_fraction <= 1.0:
            problems.append("neighbor_fraction must lie in (0, 1]")
        if self.neighbor_min < 0:
            problems.append("neighbor_min must be >= 0")
        if self.init_method not in ("flp", "kmeans"):
            problems.append("init_method must be 'flp' or 'kmeans'")
        if self.correction_keep not in ("largest", "smallest"):
            problems.append("correction_keep must be 'largest' or 'smallest'")
        if self.sa_reference not in ("current", "best"):
            problems.append("sa_reference must be 'current' or 'best'")
        if self.pool_limit is not None and self.pool_limit < 1:
            problems.append("pool_limit must be positive or None")
        if self.temperature_schedule != "linear":
            problems.append("only the linear temperature schedule is implemented")
        return problems

    def with_(self, **changes) -> "Config":
        return replace(self, **changes)


def validate_instance(instance: Instance) -> List[str]:
    """Return a list of human-readable invariant violations (empty if valid)."""
    out = []
    size = instance.n_nodes
    for c in instance.customers:
        if c.demand < 0:
            out.append(f"customer {c.id}: negative demand")
        if c.service_time < 0:
            out.append(f"customer {c.id}: negative service time")
        if c.time_window[0] > c.time_window[1]:
            out.append(f"customer {c.id}: time window earliest > latest")
    for d in instance.micro_depots:
        if d.capacity <= 0:
            out.append(f"micro-depot {d.id}: non-positive capacity")
        if d.opening_cost < 0:
            out.append(f"micro-depot {d.id}: negative opening cost")
        if d.operating_window[0] > d.operating_window[1]:
            out.append(f"micro-depot {d.id}: operating window earliest > latest")
    ids = [d.id for d in instance.micro_depots] + [c.id for c in instance.customers]
    if ids != list(range(1, size)):
        out.append("node ids are not positional (depot 0, micro-depots, customers)")
    for v in (instance.fe_vehicle, instance.se_vehicle):
        tag = v.echelon.value
        if v.capacity <= 0:
            out.append(f"{tag}-echelon vehicle: non-positive capacity")
        if v.fixed_cost < 0:
            out.append(f"{tag}-echelon vehicle: negative fixed cost")
        if v.cost_per_distance < 0:
            out.append(f"{tag}-echelon vehicle: negative cost per distance")
    mats = [("dist_fe", instance.dist_fe), ("dist_se", instance.dist_se)]
    if instance.travel_time_fe is not None:
        mats.append(("travel_time_fe", instance.travel_time_fe))
    if instance.travel_time_se is not None:
        mats.append(("travel_time_se", instance.travel_time_se))
    for name, mat in mats:
        if mat.shape != (size, size):
            out.append(f"{name}: shape {mat.shape} != ({size}, {size})")
            continue
        neg = np.argwhere(mat < 0)
        for i, j in neg[:10]:
            out.append(f"{name}[{i}][{j}]: negative entry {mat[i, j]}")
        diag = np.nonzero(np.diag(mat))[0]
        for i in diag[:10]:
            out.append(f"{name}[{i}][{i}]: non-zero diagonal")
    if instance.coords.shape[0] != size:
        out.append(f"coords: {instance.coords.shape[0]} rows for {size} nodes")
    return out
