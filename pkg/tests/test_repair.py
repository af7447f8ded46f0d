import dataclasses
import random

import pytest
from hypothesis import given, settings, strategies as st

from elrp.construction import initial_solution
from elrp.destroy import ALL_DESTROY, RemovalResult, drop_customers, fe_route_removal, random_removal
from elrp.evaluation import check_feasibility, total_cost
from elrp.instances import synthetic_benchmark
from elrp.model import Config, Solution, fe_route, se_route
from elrp.repair import ALL_REPAIR, RepairError, greedy_insertion, merge_fe_routes, regret_insertion
from conftest import explicit_instance, make_t1

PLAIN = synthetic_benchmark(20, 5, 1)
TIMED = synthetic_benchmark(20, 5, 1, time_windows=True)
STARTS = {id(PLAIN): initial_solution(PLAIN), id(TIMED): initial_solution(TIMED)}


def _removal_of(inst, sol, customers):
    partial = sol.copy()
    drop_customers(inst, partial, customers)
    return RemovalResult(partial, list(customers))


@pytest.mark.parametrize("repair", [greedy_insertion, regret_insertion])
def test_single_reinsert_never_worse(repair):
    sol = STARTS[id(PLAIN)]
    before = total_cost(PLAIN, sol)
    for r in sol.se_routes:
        if len(r.visits) < 2:
            continue
        for c in r.visits:
            out = repair(PLAIN, _removal_of(PLAIN, sol, [c]), Config())
            assert check_feasibility(PLAIN, out) == []
            assert total_cost(PLAIN, out) <= before


@pytest.mark.parametrize("inst", [PLAIN, TIMED], ids=["plain", "tw"])
@pytest.mark.parametrize("name, repair", ALL_REPAIR)
def test_repair_from_scratch(inst, name, repair):
    res = random_removal(inst, STARTS[id(inst)], random.Random(0), q=inst.n_customers)
    assert res.partial.se_routes == []
    out = repair(inst, res, Config(), random.Random(0))
    assert check_feasibility(inst, out) == []


def test_saturated_depot_forces_opening():
    inst = make_t1(satellite_capacity=[30, 40])
    sol = Solution([fe_route([1])], [se_route(1, [3, 4, 5])], {1})
    out = greedy_insertion(inst, RemovalResult(sol, [6]))
    assert 2 in out.open_depots
    assert check_feasibility(inst, out) == []


@pytest.mark.parametrize("repair", [greedy_insertion, regret_insertion])
def test_empty_solution_ships_directly_when_cheaper(repair):
    # the only depot is far away and expensive, the customers sit next to the main depot
    inst = explicit_instance([(0, 0), (40, 0), (1, 0), (1, 1)], [3, 3], [10], [500], direct=True)
    out = repair(inst, RemovalResult(Solution([], [], set()), [2, 3]), Config(), random.Random(0))
    assert check_feasibility(inst, out) == []
    assert out.open_depots == set() and out.se_routes == []
    assert len(out.fe_routes) == 1


@pytest.mark.parametrize("repair", [greedy_insertion, regret_insertion])
def test_empty_solution_opens_depot_when_cheaper(repair):
    inst = explicit_instance([(0, 0), (1, 0), (40, 0), (41, 0)], [3, 3], [10], [5], direct=True)
    out = repair(inst, RemovalResult(Solution([], [], set()), [2, 3]), Config(), random.Random(0))
    assert check_feasibility(inst, out) == []
    assert out.open_depots == {1} and out.direct_customers(inst) == []


def test_regret_empty_removal_is_identity(t1):
    sol = Solution([fe_route([1, 2])], [se_route(1, [3, 4]), se_route(2, [5, 6])], {1, 2})
    out = regret_insertion(t1, RemovalResult(sol.copy(), []))
    assert out.signature() == sol.signature()


def test_regret_prefers_high_regret_customer():
    # route 1 has room for one more customer. c3 is almost free there and
    # expensive elsewhere; c4 (lighter, so greedy takes it first) is about as
    # cheap on either route. Regret must give the spot to c3.
    coords = [(0, 0), (10, 0), (-10, 0), (11, 0), (1, 1), (12, 0), (-11, 0)]
    inst = explicit_instance(coords, [5, 4, 5, 5], [100, 100], [0, 0], q1=1000, q2=10, direct=False)

    def start():
        return Solution([fe_route([1, 2])], [se_route(1, [5]), se_route(2, [6])], {1, 2})

    def host(sol, c):
        return next(r.home for r in sol.se_routes if c in r.visits)

    greedy = greedy_insertion(inst, RemovalResult(start(), [3, 4]))
    regret = regret_insertion(inst, RemovalResult(start(), [3, 4]))
    assert host(greedy, 4) == 1 and host(greedy, 3) != 1
    assert host(regret, 3) == 1
    assert check_feasibility(inst, regret) == []
    assert total_cost(inst, regret) < total_cost(inst, greedy)


def test_merge_fe_routes_reuses_slack(t1):
    sol = Solution([fe_route([1]), fe_route([2])],
                   [se_route(1, [3, 4]), se_route(2, [5, 6])], {1, 2})
    res = fe_route_removal(t1, sol)
    out = merge_fe_routes(t1, res)
    assert len(out.fe_routes) == 1
    assert check_feasibility(t1, out) == []


def test_merge_fe_routes_full_route_adds_new_one():
    inst = make_t1(q1=25, satellite_capacity=[40, 40])
    sol = Solution([fe_route([1]), fe_route([2])],
                   [se_route(1, [3, 4]), se_route(2, [5, 6])], {1, 2})
    out = merge_fe_routes(inst, fe_route_removal(inst, sol))
    assert len(out.fe_routes) == 2
    assert check_feasibility(inst, out) == []


def test_merge_without_detached_equals_greedy():
    sol = STARTS[id(PLAIN)]
    res = random_removal(PLAIN, sol, random.Random(4), q=6)
    a = merge_fe_routes(PLAIN, dataclasses.replace(res, partial=res.partial.copy()))
    b = greedy_insertion(PLAIN, dataclasses.replace(res, partial=res.partial.copy()))
    assert a.signature() == b.signature()


def test_uninsertable_customer_raises():
    inst = make_t1(q2=5)
    sol = Solution([fe_route([1])], [], {1})
    with pytest.raises(RepairError):
        greedy_insertion(inst, RemovalResult(sol, [3]))


def test_direct_shipment_used_when_allowed():
    # far-off depots, customer next to the main depot: direct is cheapest
    coords = [(0, 0), (100, 0), (1, 0)]
    inst = explicit_instance(coords, [3], [10], [50], f1=0, direct=True)
    sol = Solution([], [], set())
    out = greedy_insertion(inst, RemovalResult(sol, [2]))
    assert check_feasibility(inst, out) == []
    if out.direct_customers(inst):
        assert total_cost(inst, out) <= 50 + 2 * 200 + 200 + 5 + 10
    blocked = dataclasses.replace(inst, direct_shipment=False)
    out = greedy_insertion(blocked, RemovalResult(Solution([], [], set()), [2]))
    assert out.direct_customers(blocked) == []
    assert check_feasibility(blocked, out) == []


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([PLAIN, TIMED]), st.sampled_from(ALL_DESTROY), st.sampled_from(ALL_REPAIR),
       st.integers(0, 10**6))
def test_round_trip_feasible(inst, destroy, repair, seed):
    rng = random.Random(seed)
    cfg = Config(partial_microdepot_removal=True)
    res = destroy[1](inst, STARTS[id(inst)], rng, cfg)
    out = repair[1](inst, res, cfg, rng)
    assert check_feasibility(inst, out, cfg) == []
