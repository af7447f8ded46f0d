import os

import numpy as np
import pytest

from elrp.instances import RawBenchmark, synthetic_benchmark, to_instance
from elrp.model import Config, Customer, DepotKind, Echelon, Instance, MicroDepot, VehicleClass

DATA = os.path.join(os.path.dirname(__file__), "data")

# one line per acceptance criterion, printed in the terminal summary
CRITERIA_LINES = []


def report_criterion(number, passed, detail, status=None):
    status = status or ("PASS" if passed else "FAIL")
    line = f"criterion {number}: {status} - {detail}"
    CRITERIA_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA_LINES, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def data_path(name: str) -> str:
    return os.path.join(DATA, name)


def t1_raw(**changes) -> RawBenchmark:
    """Depot at the origin, A=(10,0), B=(-10,0); c1, c2 east of A and c3, c4 west of B."""
    raw = RawBenchmark(
        name="t1",
        depot_xy=(0.0, 0.0),
        satellite_xy=[(10.0, 0.0), (-10.0, 0.0)],
        satellite_capacity=[40, 40],
        satellite_cost=[1000, 1200],
        customer_xy=[(12.0, 0.0), (14.0, 0.0), (-12.0, 0.0), (-14.0, 0.0)],
        demand=[10, 10, 10, 10],
        q1=90,
        q2=70,
        fe_fixed=100,
        se_fixed=100,
    )
    for k, v in changes.items():
        setattr(raw, k, v)
    return raw


def make_t1(**changes) -> Instance:
    return to_instance(t1_raw(**changes))


def explicit_instance(coords, demands, caps, costs, q1=100, q2=50, f1=10, f2=5,
                      dist=None, direct=True, name="explicit") -> Instance:
    """Instance from integer-rounded Euclidean distances (FE costs twice SE)."""
    coords = np.asarray(coords, dtype=float)
    m = len(caps)
    if dist is None:
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.floor(np.hypot(diff[..., 0], diff[..., 1]) + 0.5).astype(np.int64)
    depots = tuple(MicroDepot(k + 1, DepotKind.STATIONARY, caps[k], costs[k]) for k in range(m))
    customers = tuple(Customer(m + 1 + k, demands[k]) for k in range(len(demands)))
    return Instance(name, coords, customers, depots,
                    VehicleClass(Echelon.FIRST, q1, f1, 2), VehicleClass(Echelon.SECOND, q2, f2, 1),
                    dist, dist, direct_shipment=direct)


@pytest.fixture
def t1() -> Instance:
    return make_t1()


@pytest.fixture(scope="session")
def small20() -> Instance:
    return synthetic_benchmark(20, 5, 1)


@pytest.fixture(scope="session")
def small20_tw() -> Instance:
    return synthetic_benchmark(20, 5, 1, time_windows=True)


@pytest.fixture
def cfg() -> Config:
    return Config()
