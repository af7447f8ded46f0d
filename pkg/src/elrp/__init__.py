"""Two-echelon location-routing solver with mobile micro-depots and direct shipment."""

from .alns import RunResult, run
from .construction import initial_solution
from .decomposition import decompose_solve
from .evaluation import check_feasibility, gap_percent, objective, total_cost
from .instances import load_instance, read_canonical, synthetic_benchmark, write_canonical
from .kernels import BACKEND
from .kpi import compute_kpis
from .model import Config, Customer, DepotKind, Echelon, Instance, MicroDepot, Route, Solution, VehicleClass
from .oracle import brute_force_optimum

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Config",
    "Customer",
    "DepotKind",
    "Echelon",
    "Instance",
    "MicroDepot",
    "Route",
    "RunResult",
    "Solution",
    "VehicleClass",
    "brute_force_optimum",
    "check_feasibility",
    "compute_kpis",
    "decompose_solve",
    "gap_percent",
    "initial_solution",
    "load_instance",
    "objective",
    "read_canonical",
    "run",
    "synthetic_benchmark",
    "total_cost",
    "write_canonical",
]
