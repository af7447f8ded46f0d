"""Benchmark parsers, distance scaling, canonical JSON I/O and a case-study generator."""

import json
import math
import os
import re
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .model import (
    HORIZON,
    Config,
    Customer,
    DepotKind,
    Echelon,
    Instance,
    MicroDepot,
    Route,
    Solution,
    VehicleClass,
)

FORMAT_VERSION = 1
SE_SCALE = 100
FE_SCALE = 200
FE_CAPACITY_FACTOR = 1.5


class ParseError(ValueError):
    """Malformed benchmark or canonical input."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class RawBenchmark:
    """Benchmark data as read from a benchmark-layout file."""

    name: str
    depot_xy: Tuple[float, float]
    satellite_xy: List[Tuple[float, float]]
    satellite_capacity: List[int]
    satellite_cost: List[int]
    customer_xy: List[Tuple[float, float]]
    demand: List[int]
    q1: int
    q2: int
    fe_fixed: int
    se_fixed: int
    source: str = "prodhon"

    @property
    def n(self) -> int:
        return len(self.customer_xy)

    @property
    def m(self) -> int:
        return len(self.satellite_xy)

    def validate(self) -> None:
        m, n = self.m, self.n
        for name, seq, want in (("satellite capacities", self.satellite_capacity, m),
                                ("satellite costs", self.satellite_cost, m),
                                ("demands", self.demand, n)):
            if len(seq) != want:
                raise ParseError(f"{name}: expected {want} values, got {len(seq)}")


# --------------------------------------------------------------------------
# tokenizer


class _Tokens:
    """Whitespace tokens with line numbers; ``#`` starts a comment."""

    def __init__(self, text: str):
        self.items: List[Tuple[str, int]] = []
        self.lines: List[Tuple[int, List[str]]] = []
        for k, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0].strip()
            if not body:
                continue
            toks = body.split()
            self.lines.append((k, toks))
            self.items.extend((t, k) for t in toks)
        self.i = 0

    def _next(self, what: str) -> Tuple[str, int]:
        if self.i >= len(self.items):
            last = self.items[-1][1] if self.items else 0
            raise ParseError(f"unexpected end of input while reading {what}", last + 1)
        tok = self.items[self.i]
        self.i += 1
        return tok

    def number(self, what: str) -> float:
        tok, line = self._next(what)
        try:
            return float(tok)
        except ValueError:
            raise ParseError(f"non-numeric token {tok!r} in {what}", line) from None

    def integer(self, what: str) -> int:
        tok, line = self._next(what)
        try:
            v = float(tok)
        except ValueError:
            raise ParseError(f"non-numeric token {tok!r} in {what}", line) from None
        if v != int(v):
            raise ParseError(f"expected an integer in {what}, got {tok!r}", line)
        return int(v)

    def count(self, what: str) -> int:
        v = self.integer(what)
        if v <= 0:
            raise ParseError(f"{what} must be positive, got {v}", self.items[self.i - 1][1])
        return v

    def done(self) -> bool:
        return self.i >= len(self.items)

    def line(self) -> int:
        return self.items[self.i][1] if self.i < len(self.items) else -1


def _text(data) -> str:
    if isinstance(data, (bytes, bytearray)):
        return data.decode("utf-8")
    if hasattr(data, "read"):
        return _text(data.read())
    return data


# --------------------------------------------------------------------------
# benchmark file layouts


def parse_prodhon(data, name: str = "prodhon") -> RawBenchmark:
    """Parse the Prodhon-derived 2E-LRP layout (see docs/formats.md).

    Sequential sections: n, m, satellite coordinates, customer coordinates,
    SE vehicle capacity, satellite capacities, demands, satellite opening
    costs, SE route fixed cost, rounding flag; optionally followed by the
    main-depot coordinates, the FE capacity and the FE route fixed cost.
    """
    tk = _Tokens(_text(data))
    if tk.done():
        raise ParseError("empty input")
    n = tk.count("header: number of customers")
    m = tk.count("header: number of satellites")
    sat = [(tk.number(f"satellite {k + 1} coordinates"), tk.number(f"satellite {k + 1} coordinates"))
           for k in range(m)]
    cust = [(tk.number(f"customer {k + 1} coordinates"), tk.number(f"customer {k + 1} coordinates"))
            for k in range(n)]
    q2 = tk.integer("SE vehicle capacity")
    caps = [tk.integer("satellite capacities") for _ in range(m)]
    demand = [tk.integer("customer demands") for _ in range(n)]
    costs = [tk.integer("satellite opening costs") for _ in range(m)]
    se_fixed = tk.integer("SE route fixed cost")
    tk.integer("rounding flag")
    depot = (0.0, 0.0)
    q1 = int(math.floor(max(caps) * FE_CAPACITY_FACTOR + 0.5))
    fe_fixed = se_fixed
    if not tk.done():
        depot = (tk.number("main depot coordinates"), tk.number("main depot coordinates"))
        q1 = tk.integer("FE vehicle capacity")
        fe_fixed = tk.integer("FE route fixed cost")
    if not tk.done():
        raise ParseError("trailing tokens after the last section", tk.line())
    raw = RawBenchmark(name, depot, sat, caps, costs, cust, demand, q1, q2, fe_fixed, se_fixed,
                       source="prodhon")
    raw.validate()
    return raw


def parse_nguyen(data, name: str = "nguyen") -> RawBenchmark:
    """Parse the Nguyen 2E-LRP layout (see docs/formats.md).

    Line-oriented: ``n m``; ``Q1 Q2 F1 F2``; main depot ``x y``; ``m`` lines
    ``x y capacity opening_cost``; ``n`` lines ``x y demand``.
    """
    tk = _Tokens(_text(data))
    if not tk.lines:
        raise ParseError("empty input")
    n = tk.count("header: number of customers")
    m = tk.count("header: number of satellites")
    q1 = tk.integer("FE vehicle capacity")
    q2 = tk.integer("SE vehicle capacity")
    f1 = tk.integer("FE route fixed cost")
    f2 = tk.integer("SE route fixed cost")
    depot = (tk.number("main depot coordinates"), tk.number("main depot coordinates"))
    sat, caps, costs = [], [], []
    for k in range(m):
        what = f"satellite {k + 1}"
        sat.append((tk.number(what), tk.number(what)))
        caps.append(tk.integer(what + " capacity"))
        costs.append(tk.integer(what + " opening cost"))
    cust, demand = [], []
    for k in range(n):
        what = f"customer {k + 1}"
        cust.append((tk.number(what), tk.number(what)))
        demand.append(tk.integer(what + " demand"))
    if not tk.done():
        raise ParseError("trailing tokens after the last customer", tk.line())
    raw = RawBenchmark(name, depot, sat, caps, costs, cust, demand, q1, q2, f1, f2, source="nguyen")
    raw.validate()
    return raw


def round_half_up(x: np.ndarray) -> np.ndarray:
    return np.floor(np.asarray(x, dtype=float) + 0.5).astype(np.int64)


def scaled_distances(coords: np.ndarray, scale: int) -> np.ndarray:
    """Euclidean distances multiplied by ``scale``, then rounded half-up."""
    xy = np.asarray(coords, dtype=float)
    diff = xy[:, None, :] - xy[None, :, :]
    eu = np.sqrt((diff ** 2).sum(axis=2))
    out = round_half_up(eu * scale)
    np.fill_diagonal(out, 0)
    return out


def raw_coords(raw: RawBenchmark) -> np.ndarray:
    return np.array([raw.depot_xy] + list(raw.satellite_xy) + list(raw.customer_xy), dtype=float)


def build_distance_matrices(raw: RawBenchmark) -> Tuple[np.ndarray, np.ndarray]:
    """Return ``(dist_fe, dist_se)`` with the 200 / 100 scaling rule."""
    xy = raw_coords(raw)
    return scaled_distances(xy, FE_SCALE), scaled_distances(xy, SE_SCALE)


def to_instance(raw: RawBenchmark, bks: Optional[int] = None) -> Instance:
    m = raw.m
    depots = tuple(MicroDepot(k + 1, DepotKind.STATIONARY, raw.satellite_capacity[k],
                              raw.satellite_cost[k]) for k in range(m))
    customers = tuple(Customer(m + 1 + k, raw.demand[k]) for k in range(raw.n))
    dist_fe, dist_se = build_distance_matrices(raw)
    if bks is None:
        from .bks import lookup_bks
        bks = lookup_bks(raw.name)
    return Instance(
        name=raw.name,
        coords=raw_coords(raw),
        customers=customers,
        micro_depots=depots,
        fe_vehicle=VehicleClass(Echelon.FIRST, raw.q1, raw.fe_fixed),
        se_vehicle=VehicleClass(Echelon.SECOND, raw.q2, raw.se_fixed),
        dist_fe=dist_fe,
        dist_se=dist_se,
        bks=bks,
        scaling={"fe": FE_SCALE, "se": SE_SCALE},
        direct_shipment=False,
    )


# --------------------------------------------------------------------------
# case-study generator


@dataclass
class CaseStudyParams:
    """Case-study inputs; money in euro, capacities in cubic feet, distances in km."""

    n_customers: int = 2000
    n_depots: int = 40
    truck_fixed_cost: float = 480.0
    bike_fixed_cost: float = 280.0
    truck_capacity: int = 865
    bike_capacity: int = 77
    stationary_capacity: int = 865
    mobile_capacity: int = 500
    stationary_cost_low: float = 600.0
    stationary_cost_high: float = 650.0
    mobile_cost: float = 156.0
    truck_fuel_cost_per_litre: float = 1.8
    truck_km_per_litre: float = 3.0
    bike_cost_per_km: float = 0.47
    truck_emission_kg_per_km: float = 0.597
    bike_emission_kg_per_km: float = 0.079e-3
    demand_mean: float = 6.03
    demand_sd: float = 2.55
    region_km: float = 12.0
    n_districts: int = 8
    depot_offset_km: float = 8.0

    @property
    def truck_cost_per_km(self) -> float:
        return self.truck_fuel_cost_per_litre / self.truck_km_per_litre

    def validate(self) -> List[str]:
        out = []
        if self.n_customers < 1:
            out.append("n_customers must be >= 1")
        if self.n_depots < 1:
            out.append("n_depots must be >= 1")
        for k, v in asdict(self).items():
            if isinstance(v, (int, float)) and v < 0:
                out.append(f"{k} must be non-negative")
        if self.stationary_cost_low > self.stationary_cost_high:
            out.append("stationary_cost_low must not exceed stationary_cost_high")
        if self.n_districts < 1:
            out.append("n_districts must be >= 1")
        return out


MICRO = 10**6  # money units per euro in generated instances


def generate_case_study(params: CaseStudyParams, seed: int = 0, name: Optional[str] = None) -> Instance:
    """Synthetic city instance: clustered customers, alternating depot kinds.

    Distances are planar Euclidean in whole metres; money is stored in
    micro-euro so per-metre rates stay integral.
    """
    problems = params.validate()
    if problems:
        raise ValueError("; ".join(problems))
    rng = np.random.default_rng(seed)
    size = params.region_km
    centers = rng.uniform(0.15 * size, 0.85 * size, size=(params.n_districts, 2))
    spreads = rng.uniform(0.05 * size, 0.15 * size, size=params.n_districts)
    which = rng.integers(0, params.n_districts, size=params.n_customers)
    cust = centers[which] + rng.normal(size=(params.n_customers, 2)) * spreads[which, None]
    cust = np.clip(cust, 0.0, size)
    sites = rng.uniform(0.05 * size, 0.95 * size, size=(params.n_depots, 2))
    depot = np.array([-params.depot_offset_km, size / 2.0])
    demand = np.maximum(1, np.rint(rng.normal(params.demand_mean, params.demand_sd,
                                              size=params.n_customers))).astype(int)
    stationary_cost = rng.uniform(params.stationary_cost_low, params.stationary_cost_high,
                                  size=params.n_depots)

    m = params.n_depots
    depots = []
    for k in range(m):
        if k % 2 == 0:
            depots.append(MicroDepot(k + 1, DepotKind.STATIONARY, params.stationary_capacity,
                                     int(round(stationary_cost[k] * MICRO))))
        else:
            depots.append(MicroDepot(k + 1, DepotKind.MOBILE, params.mobile_capacity,
                                     int(round(params.mobile_cost * MICRO))))
    customers = tuple(Customer(m + 1 + k, int(demand[k])) for k in range(params.n_customers))
    coords = np.vstack([depot[None, :], sites, cust])
    metres = scaled_distances(coords, 1000)
    truck_rate = int(round(params.truck_cost_per_km * MICRO / 1000))
    bike_rate = int(round(params.bike_cost_per_km * MICRO / 1000))
    return Instance(
        name=name or f"case-{params.n_customers}-{m}-s{seed}",
        coords=coords,
        customers=customers,
        micro_depots=tuple(depots),
        fe_vehicle=VehicleClass(Echelon.FIRST, params.truck_capacity,
                                int(round(params.truck_fixed_cost * MICRO)), truck_rate),
        se_vehicle=VehicleClass(Echelon.SECOND, params.bike_capacity,
                                int(round(params.bike_fixed_cost * MICRO)), bike_rate),
        dist_fe=metres,
        dist_se=metres.copy(),
        money_scale=MICRO,
        distance_unit_km=0.001,
        scaling={"fe": 1000, "se": 1000},
    )


def synthetic_benchmark(n: int, m: int, seed: int = 0, q2: int = 70, clusters: int = 0,
                        time_windows: bool = False, name: Optional[str] = None) -> Instance:
    """Random instance shaped like the Prodhon-derived set.

    Integer demands in [11, 20], coordinates on a 50x50 grid (optionally
    clustered), satellites sized so that total capacity covers demand with
    slack, FE capacity by the 1.5 rule. ``time_windows`` adds customer windows
    and service times for exercising the time-window code paths.
    """
    rng = np.random.default_rng(seed)
    if clusters > 0:
        centres = rng.uniform(5, 45, size=(clusters, 2))
        which = rng.integers(0, clusters, size=n)
        cust = np.clip(np.rint(centres[which] + rng.normal(0, 5, size=(n, 2))), 0, 50)
    else:
        cust = rng.integers(0, 51, size=(n, 2)).astype(float)
    sats = rng.integers(5, 46, size=(m, 2)).astype(float)
    demand = rng.integers(11, 21, size=n)
    total = int(demand.sum())
    base = max(int(demand.max()), math.ceil(total / max(1, m - 1) * 1.2)) if m > 1 else total
    caps = [int(base + rng.integers(0, 20)) for _ in range(m)]
    costs = [int(rng.integers(5000, 15000)) for _ in range(m)]
    raw = RawBenchmark(name or f"syn-{n}-{m}-{seed}", (0.0, 0.0),
                       [tuple(p) for p in sats], caps, costs, [tuple(p) for p in cust],
                       [int(d) for d in demand], int(math.floor(max(caps) * 1.5 + 0.5)), q2,
                       1000, 1000, source="synthetic")
    inst = to_instance(raw, bks=None)
    if not time_windows:
        return inst
    customers = []
    horizon = int(inst.dist_se.max()) * 6
    for c in inst.customers:
        start = int(rng.integers(0, horizon // 2))
        width = int(rng.integers(horizon // 4, horizon))
        customers.append(Customer(c.id, c.demand, int(rng.integers(0, 200)), (start, start + width)))
    depots = tuple(MicroDepot(t.id, t.kind, t.capacity, t.opening_cost, (0, horizon * 2))
                   for t in inst.micro_depots)
    return Instance(inst.name + "-tw", inst.coords, tuple(customers), depots, inst.fe_vehicle,
                    inst.se_vehicle, inst.dist_fe, inst.dist_se, scaling=inst.scaling,
                    direct_shipment=inst.direct_shipment)


# --------------------------------------------------------------------------
# canonical JSON


def _window(w) -> List[int]:
    return [int(w[0]), int(w[1])]


def _vehicle_dict(v: VehicleClass) -> Dict:
    return {"capacity": v.capacity, "fixed_cost": v.fixed_cost,
            "cost_per_distance": v.cost_per_distance, "fleet_limit": v.fleet_limit,
            "work_window": _window(v.work_window)}


def instance_to_dict(instance: Instance, explicit_matrices: bool = True) -> Dict:
    d = {
        "format": "elrp-instance",
        "version": FORMAT_VERSION,
        "name": instance.name,
        "money_scale": instance.money_scale,
        "distance_unit_km": instance.distance_unit_km,
        "bks": instance.bks,
        "coords": instance.coords.tolist(),
        "micro_depots": [{"id": t.id, "kind": t.kind.value, "capacity": t.capacity,
                          "opening_cost": t.opening_cost,
                          "operating_window": _window(t.operating_window)}
                         for t in instance.micro_depots],
        "customers": [{"id": c.id, "demand": c.demand, "service_time": c.service_time,
                       "time_window": _window(c.time_window)} for c in instance.customers],
        "fe_vehicle": _vehicle_dict(instance.fe_vehicle),
        "se_vehicle": _vehicle_dict(instance.se_vehicle),
        "direct_shipment": instance.direct_shipment,
    }
    if explicit_matrices or not instance.scaling:
        d["distances"] = {"fe": instance.dist_fe.tolist(), "se": instance.dist_se.tolist()}
    else:
        d["scaling"] = dict(instance.scaling)
    if instance.scaling and "scaling" not in d:
        d["scaling"] = dict(instance.scaling)
    if instance.travel_time_fe is not None or instance.travel_time_se is not None:
        d["travel_time"] = {
            "fe": None if instance.travel_time_fe is None else instance.travel_time_fe.tolist(),
            "se": None if instance.travel_time_se is None else instance.travel_time_se.tolist(),
        }
    return d


def _require(d: Dict, key: str, where: str):
    if key not in d:
        raise ParseError(f"schema violation: missing '{key}' in {where}")
    return d[key]


def _check_header(d, kind: str):
    if not isinstance(d, dict):
        raise ParseError("schema violation: top level must be an object")
    fmt = d.get("format")
    if fmt != kind:
        raise ParseError(f"schema violation: expected format '{kind}', got {fmt!r}")
    ver = d.get("version")
    if ver != FORMAT_VERSION:
        raise ParseError(f"unsupported version {ver!r} (expected {FORMAT_VERSION})")


def _vehicle_from(d: Dict, echelon: Echelon, where: str) -> VehicleClass:
    return VehicleClass(
        echelon,
        int(_require(d, "capacity", where)),
        int(_require(d, "fixed_cost", where)),
        int(d.get("cost_per_distance", 1)),
        None if d.get("fleet_limit") is None else int(d["fleet_limit"]),
        tuple(d.get("work_window", (0, HORIZON))),
    )


def instance_from_dict(d: Dict) -> Instance:
    _check_header(d, "elrp-instance")
    coords = np.array(_require(d, "coords", "instance"), dtype=float)
    depots = tuple(
        MicroDepot(int(_require(t, "id", "micro_depot")), DepotKind(t.get("kind", "stationary")),
                   int(_require(t, "capacity", "micro_depot")),
                   int(_require(t, "opening_cost", "micro_depot")),
                   tuple(t.get("operating_window", (0, HORIZON))))
        for t in _require(d, "micro_depots", "instance"))
    customers = tuple(
        Customer(int(_require(c, "id", "customer")), int(_require(c, "demand", "customer")),
                 int(c.get("service_time", 0)), tuple(c.get("time_window", (0, HORIZON))))
        for c in _require(d, "customers", "instance"))
    scaling = d.get("scaling")
    if "distances" in d:
        dist_fe = np.array(d["distances"]["fe"], dtype=np.int64)
        dist_se = np.array(d["distances"]["se"], dtype=np.int64)
    elif scaling:
        dist_fe = scaled_distances(coords, int(scaling["fe"]))
        dist_se = scaled_distances(coords, int(scaling["se"]))
    else:
        raise ParseError("schema violation: need 'distances' or 'scaling'")
    tt = d.get("travel_time") or {}
    inst = Instance(
        name=str(d.get("name", "instance")),
        coords=coords,
        customers=customers,
        micro_depots=depots,
        fe_vehicle=_vehicle_from(_require(d, "fe_vehicle", "instance"), Echelon.FIRST, "fe_vehicle"),
        se_vehicle=_vehicle_from(_require(d, "se_vehicle", "instance"), Echelon.SECOND, "se_vehicle"),
        dist_fe=dist_fe,
        dist_se=dist_se,
        travel_time_fe=None if tt.get("fe") is None else np.array(tt["fe"], dtype=np.int64),
        travel_time_se=None if tt.get("se") is None else np.array(tt["se"], dtype=np.int64),
        bks=None if d.get("bks") is None else int(d["bks"]),
        money_scale=int(d.get("money_scale", 1)),
        distance_unit_km=d.get("distance_unit_km"),
        scaling=None if scaling is None else {k: int(v) for k, v in scaling.items()},
        direct_shipment=bool(d.get("direct_shipment", True)),
    )
    from .model import validate_instance
    problems = validate_instance(inst)
    if problems:
        raise ParseError("schema violation: " + "; ".join(problems[:5]))
    return inst


def write_canonical(instance: Instance, explicit_matrices: bool = True) -> str:
    return json.dumps(instance_to_dict(instance, explicit_matrices), separators=(",", ":")) + "\n"


def read_canonical(data) -> Instance:
    try:
        d = json.loads(_text(data))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    return instance_from_dict(d)


def solution_to_dict(solution: Solution, instance: Optional[Instance] = None) -> Dict:
    d = {
        "format": "elrp-solution",
        "version": FORMAT_VERSION,
        "open_depots": sorted(solution.open_depots),
        "fe_routes": [list(r.visits) for r in solution.fe_routes],
        "se_routes": [{"depot": r.home, "visits": list(r.visits)} for r in solution.se_routes],
    }
    if instance is not None:
        from .evaluation import objective
        d["cost"] = objective(instance, solution).as_dict()
    return d


def solution_from_dict(d: Dict) -> Solution:
    _check_header(d, "elrp-solution")
    fe = [Route(Echelon.FIRST, 0, v) for v in _require(d, "fe_routes", "solution")]
    se = [Route(Echelon.SECOND, int(_require(r, "depot", "se_route")),
                _require(r, "visits", "se_route")) for r in _require(d, "se_routes", "solution")]
    return Solution(fe, se, set(int(t) for t in d.get("open_depots", [])))


def write_solution(solution: Solution, instance: Optional[Instance] = None) -> str:
    return json.dumps(solution_to_dict(solution, instance), indent=1, sort_keys=True) + "\n"


def read_solution(data) -> Solution:
    try:
        d = json.loads(_text(data))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    return solution_from_dict(d)


def config_from_dict(d: Dict, base: Optional[Config] = None) -> Config:
    """Overlay a ``{"format": "elrp-config", ...}`` object on ``base``."""
    _check_header(d, "elrp-config")
    base = base or Config()
    known = set(asdict(base))
    changes = {}
    for k, v in d.items():
        if k in ("format", "version"):
            continue
        if k not in known:
            raise ParseError(f"schema violation: unknown config key '{k}'")
        changes[k] = tuple(v) if isinstance(v, list) else v
    cfg = base.with_(**changes)
    problems = cfg.validate()
    if problems:
        raise ParseError("invalid config: " + "; ".join(problems))
    return cfg


def read_config(data, base: Optional[Config] = None) -> Config:
    try:
        d = json.loads(_text(data))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    return config_from_dict(d, base)


# --------------------------------------------------------------------------
# format sniffing and loading


def sniff_format(text: str) -> str:
    """Return "canonical", "prodhon" or "nguyen" from the leading structure."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return "canonical"
    tk = _Tokens(text)
    if not tk.lines:
        raise ParseError("empty input")
    first = tk.lines[0][1]
    if len(first) == 1:
        return "prodhon"
    if len(first) == 2:
        return "nguyen"
    raise ParseError("unrecognised header", tk.lines[0][0])


def instance_name(path: str) -> str:
    base = os.path.basename(path)
    stem = re.sub(r"\.(dat|txt|json|elrp)$", "", base, flags=re.IGNORECASE)
    return re.sub(r"^coord", "", stem)


def load_instance(path: str) -> Instance:
    with open(path, "rb") as fh:
        text = fh.read().decode("utf-8")
    kind = sniff_format(text)
    if kind == "canonical":
        return read_canonical(text)
    name = instance_name(path)
    raw = parse_prodhon(text, name) if kind == "prodhon" else parse_nguyen(text, name)
    return to_instance(raw)
