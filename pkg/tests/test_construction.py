import itertools

import pytest

from elrp.construction import (
    Assignment,
    InfeasibleError,
    build_fe_routes,
    check_assignment,
    cflp_objective,
    clarke_wright,
    initial_solution,
    kmeans_assign,
    repair_capacity,
    solve_cflp,
)
from elrp.evaluation import check_feasibility, objective
from elrp.instances import synthetic_benchmark
from elrp.oracle import brute_force_cflp
from conftest import explicit_instance, make_t1


def test_t1_cflp_splits_by_side(t1):
    a = solve_cflp(t1)
    assert a.open_depots == {1, 2}
    assert a.assign == {3: 1, 4: 1, 5: 2, 6: 2}


def test_single_depot_gets_everything():
    inst = make_t1(satellite_capacity=[40, 0])
    a = solve_cflp(inst)
    # depot B has no room, so A must take all four customers
    assert a.open_depots == {1} and set(a.assign.values()) == {1}


def test_cflp_total_demand_over_capacity():
    with pytest.raises(InfeasibleError):
        solve_cflp(make_t1(satellite_capacity=[10, 10]))


def test_cflp_matches_enumeration_on_small_instances():
    for seed in range(6):
        inst = synthetic_benchmark(8, 3, seed)
        _, best = brute_force_cflp(inst)
        a = solve_cflp(inst)
        assert check_assignment(inst, a) == []
        assert cflp_objective(inst, a) == best


def test_kmeans_two_clusters_on_t1(t1):
    a = kmeans_assign(t1, 2, seed=0)
    assert a.assign == {3: 1, 4: 1, 5: 2, 6: 2}


def test_kmeans_one_cluster_picks_nearest_depot():
    inst = make_t1(customer_xy=[(12.0, 1.0), (14.0, 0.0), (11.0, -1.0), (13.0, 0.0)],
                   satellite_capacity=[40, 40])
    a = kmeans_assign(inst, 1, seed=0)
    assert a.open_depots == {1}


def test_kmeans_deterministic(small20):
    assert kmeans_assign(small20, 3, 7) == kmeans_assign(small20, 3, 7)


def test_repair_capacity_moves_farthest(t1):
    a = Assignment({1, 2}, {3: 1, 4: 1, 5: 1, 6: 2})  # A holds 30, capacity 40 -> fine
    assert repair_capacity(t1, a) == a
    inst = make_t1(satellite_capacity=[25, 40])
    fixed = repair_capacity(inst, Assignment({1, 2}, {3: 1, 4: 1, 5: 1, 6: 2}))
    # c3 at (-12,0) is A's farthest customer
    assert fixed.assign[5] == 2 and fixed.assign[3] == 1 and fixed.assign[4] == 1


def test_repair_capacity_all_full():
    inst = make_t1(satellite_capacity=[20, 10])
    with pytest.raises(InfeasibleError):
        repair_capacity(inst, Assignment({1, 2}, {3: 1, 4: 1, 5: 1, 6: 2}))


def test_clarke_wright_merges_and_splits(t1):
    routes = clarke_wright(t1, 1, [3, 4])
    assert len(routes) == 1 and sorted(routes[0].visits) == [3, 4]
    small = make_t1(q2=15)
    assert len(clarke_wright(small, 1, [3, 4])) == 2
    assert clarke_wright(t1, 1, []) == []


def test_clarke_wright_respects_capacity(small20):
    routes = clarke_wright(small20, 1, small20.customer_ids)
    served = sorted(c for r in routes for c in r.visits)
    assert served == list(small20.customer_ids)
    assert all(sum(small20.demand[c] for c in r.visits) <= small20.se_vehicle.capacity for r in routes)


def test_fe_routes_one_per_depot(t1):
    routes = build_fe_routes(t1, {1, 2}, {1: 20, 2: 20})
    assert [r.visits for r in routes] == [[1], [2]]
    cost = sum(t1.cost_fe[0][r.visits[0]] * 2 for r in routes)
    assert cost == 2 * (2 * int(t1.dist_fe[0, 1]))


def test_initial_solution_feasible_and_deterministic(small20, small20_tw, cfg):
    for inst in (small20, small20_tw):
        a, b = initial_solution(inst, cfg), initial_solution(inst, cfg)
        assert check_feasibility(inst, a, cfg) == []
        assert a.signature() == b.signature()
        assert a.direct_customers(inst) == []
    km = cfg.with_(init_method="kmeans")
    assert check_feasibility(small20, initial_solution(small20, km), km) == []


def test_single_customer_uses_two_echelons():
    inst = explicit_instance([(0, 0), (5, 0), (6, 0)], [3], [10], [7])
    sol = initial_solution(inst)
    assert len(sol.fe_routes) == 1 and len(sol.se_routes) == 1
    assert objective(inst, sol).total == 7 + 2 * 10 + 10 + 2 + 5


def test_construction_feasible_across_sizes():
    for n, m, seed in itertools.product((10, 35), (3, 6), (0, 1)):
        inst = synthetic_benchmark(n, m, seed)
        assert check_feasibility(inst, initial_solution(inst)) == []


def test_depot_capacity_above_truckload_is_capped():
    # each depot is visited by one truck, so at most q1 can be stored there
    inst = explicit_instance([(0, 0), (10, 0), (-10, 0), (11, 0), (12, 0), (-11, 0)],
                             [20, 20, 30], [200, 200], [10, 500], q1=40, q2=40)
    a = solve_cflp(inst)
    assert check_assignment(inst, a) == []
    assert a.open_depots == {1, 2}
    sol = initial_solution(inst)
    assert check_feasibility(inst, sol) == []
    assert brute_force_cflp(inst)[1] == cflp_objective(inst, a)
