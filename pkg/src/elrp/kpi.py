"""Key performance indicators of a solution: costs, distances, emissions, utilization."""

from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

from .evaluation import fe_route_load, gap_percent, objective
from .model import DepotKind, Instance, Solution

TRUCK_KG_CO2_PER_KM = 0.597
BIKE_KG_CO2_PER_KM = 0.079e-3


@dataclass
class KpiReport:
    cost: Dict[str, int]
    distance_fe: int
    distance_se: int
    distance_fe_km: Optional[float]
    distance_se_km: Optional[float]
    emissions_kg: Optional[float]
    utilization_fe: List[float] = field(default_factory=list)
    utilization_se: List[float] = field(default_factory=list)
    mean_utilization_fe: float = 0.0
    mean_utilization_se: float = 0.0
    open_depots: Dict[str, int] = field(default_factory=dict)
    fe_routes: int = 0
    se_routes: int = 0
    direct_shipments: int = 0
    gap_pct: Optional[float] = None

    def as_dict(self) -> Dict:
        return asdict(self)


def _route_distance(instance: Instance, route, fe: bool) -> int:
    dist = instance.dist_fe if fe else instance.dist_se
    seq = [route.home] + route.visits + [route.home]
    return int(sum(int(dist[a, b]) for a, b in zip(seq, seq[1:])))


def _mean(xs: List[float]) -> float:
    return sum(xs) / len(xs) if xs else 0.0


def compute_kpis(instance: Instance, solution: Solution,
                 truck_kg_per_km: float = TRUCK_KG_CO2_PER_KM,
                 bike_kg_per_km: float = BIKE_KG_CO2_PER_KM) -> KpiReport:
    """KPIs of ``solution``; km-based figures are None without a distance unit."""
    cost = objective(instance, solution).as_dict()
    d_fe = sum(_route_distance(instance, r, True) for r in solution.fe_routes)
    d_se = sum(_route_distance(instance, r, False) for r in solution.se_routes)
    unit = instance.distance_unit_km
    km_fe = None if unit is None else d_fe * unit
    km_se = None if unit is None else d_se * unit
    emissions = None if unit is None else km_fe * truck_kg_per_km + km_se * bike_kg_per_km

    loads = solution.depot_loads(instance)
    q1, q2 = instance.fe_vehicle.capacity, instance.se_vehicle.capacity
    util_fe = [fe_route_load(instance, r, loads) / q1 for r in solution.fe_routes]
    util_se = [sum(instance.demand[c] for c in r.visits) / q2 for r in solution.se_routes]
    kinds = {k.value: 0 for k in DepotKind}
    for t in solution.open_depots:
        kinds[instance.depot(t).kind.value] += 1
    gap = None
    if instance.bks:
        gap = gap_percent(cost["total"], instance.bks)
    return KpiReport(
        cost=cost,
        distance_fe=d_fe,
        distance_se=d_se,
        distance_fe_km=km_fe,
        distance_se_km=km_se,
        emissions_kg=emissions,
        utilization_fe=util_fe,
        utilization_se=util_se,
        mean_utilization_fe=_mean(util_fe),
        mean_utilization_se=_mean(util_se),
        open_depots=kinds,
        fe_routes=len(solution.fe_routes),
        se_routes=len(solution.se_routes),
        direct_shipments=len(solution.direct_customers(instance)),
        gap_pct=gap,
    )
