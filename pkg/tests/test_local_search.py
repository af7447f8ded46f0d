import random

import pytest

from elrp import kernels
from elrp.construction import initial_solution
from elrp.evaluation import check_feasibility, route_cost, total_cost
from elrp.instances import synthetic_benchmark
from elrp.local_search import build_neighbor_lists, intra_route_improve, local_search
from elrp.model import Config, Solution, fe_route, se_route
from conftest import explicit_instance


def test_neighbor_lists_full_and_sorted(small20):
    nb = build_neighbor_lists(small20, 1.0)
    c = small20.customer_ids[0]
    row = nb[c]
    assert len(row) == small20.n_customers - 1 and c not in row
    d = [int(small20.dist_se[c, x]) for x in row]
    assert d == sorted(d)


def test_neighbor_lists_collinear():
    coords = [(0, 0), (50, 50), (0, 10), (1, 10), (3, 10)]
    inst = explicit_instance(coords, [1, 1, 1], [10], [0])
    nb = build_neighbor_lists(inst, 0.2)
    assert nb.shape[1] == 1
    assert nb[2][0] == 3 and nb[3][0] == 2 and nb[4][0] == 3


def test_neighbor_lists_min_size(small20):
    assert build_neighbor_lists(small20, 0.05).shape[1] == 1
    assert build_neighbor_lists(small20, 0.05, 4).shape[1] == 4
    assert build_neighbor_lists(small20, 0.5, 4).shape[1] == 10
    assert build_neighbor_lists(small20, 0.05, 50).shape[1] == 19


def test_exchange_between_distant_customers_with_min_size():
    # the improving exchange swaps customers that are not each other's nearest
    coords = [(0, 0), (0, 20), (-6, 0), (-5, 1), (6, 0), (5, 1)]
    inst = explicit_instance(coords, [5, 5, 5, 5], [40], [0], q2=10)
    sol = Solution([fe_route([1])], [se_route(1, [2, 4]), se_route(1, [3, 5])], {1})
    narrow = local_search(inst, sol, Config(neighbor_min=0))
    wide = local_search(inst, sol, Config())
    assert total_cost(inst, wide) < total_cost(inst, narrow)


def test_neighbor_lists_bad_fraction(small20):
    with pytest.raises(ValueError):
        build_neighbor_lists(small20, 0.0)


def _moves(inst, sol):
    """Every solution one customer-anchored move away.

    Moves are anchored on a pair of customers, as in the granular operators:
    relocate after a customer, 2-opt between two customer positions, 2-opt*
    cutting after a customer on each route, and exchange of two customers.
    """
    routes = [(r.home, list(r.visits)) for r in sol.se_routes]
    out = []

    def emit(changes):
        new = list(routes)
        for k, v in changes.items():
            new[k] = (routes[k][0], v)
        out.append(Solution([r.copy() for r in sol.fe_routes],
                            [se_route(h, v) for h, v in new if v], set(sol.open_depots)))

    for a, (_, va) in enumerate(routes):
        n = len(va)
        for i in range(n):
            rest = va[:i] + va[i + 1:]
            for j in range(len(rest)):
                emit({a: rest[:j + 1] + [va[i]] + rest[j + 1:]})
            for j in range(i + 2, n):
                emit({a: va[:i + 1] + va[i + 1:j + 1][::-1] + va[j + 1:]})
        for b, (_, vb) in enumerate(routes):
            if b == a:
                continue
            for i in range(n):
                rest = va[:i] + va[i + 1:]
                for j in range(len(vb)):
                    emit({a: rest, b: vb[:j + 1] + [va[i]] + vb[j + 1:]})
                    if a < b:
                        emit({a: va[:i] + [vb[j]] + va[i + 1:], b: vb[:j] + [va[i]] + vb[j + 1:]})
                        emit({a: va[:i + 1] + vb[j + 1:], b: vb[:j + 1] + va[i + 1:]})
    return out


def _cost(inst, sol):
    return sum(route_cost(inst, r) for r in sol.se_routes) + \
        len(sol.se_routes) * inst.se_vehicle.fixed_cost


@pytest.mark.parametrize("tw", [False, True])
@pytest.mark.parametrize("seed", range(10))
def test_fixed_point_has_no_improving_move(seed, tw):
    inst = synthetic_benchmark(7, 2, seed, time_windows=tw)
    cfg = Config(relocate_intra_route=True, neighbor_fraction=1.0)
    sol = initial_solution(inst, cfg)
    rng = random.Random(seed)
    for r in sol.se_routes:
        before = list(r.visits)
        rng.shuffle(r.visits)
        if check_feasibility(inst, sol, cfg):
            r.visits[:] = before
    sol.cost_cache = None
    out = local_search(inst, sol, cfg)
    assert check_feasibility(inst, out, cfg) == []
    base = _cost(inst, out)
    for nb in _moves(inst, out):
        nb.cost_cache = None
        if check_feasibility(inst, nb, cfg) == []:
            assert _cost(inst, nb) >= base


def test_fixed_point_and_monotone(small20, small20_tw, cfg):
    for inst in (small20, small20_tw):
        start = initial_solution(inst, cfg)
        once = local_search(inst, start, cfg)
        twice = local_search(inst, once, cfg)
        assert once.signature() == twice.signature()
        assert total_cost(inst, once) <= total_cost(inst, start)
        assert check_feasibility(inst, once, cfg) == []


def test_two_opt_uncrosses():
    # depot at (0,0) plus a square of customers visited in crossing order
    coords = [(0, -50), (0, 0), (10, 10), (-10, -10), (10, -10), (-10, 10)]
    inst = explicit_instance(coords, [1, 1, 1, 1], [100], [0])
    sol = Solution([fe_route([1])], [se_route(1, [2, 3, 4, 5])], {1})
    out = local_search(inst, sol, Config(), ops=kernels.TWO_OPT)
    visits = out.se_routes[0].visits
    assert sorted(visits) == [2, 3, 4, 5]
    assert route_cost(inst, out.se_routes[0]) < route_cost(inst, sol.se_routes[0])


def test_relocate_inter_respects_capacity():
    coords = [(0, 0), (10, 0), (-10, 0), (11, 0), (-11, 0), (9, 0)]
    # c5 at (9,0) sits on depot 2's route only because route 1 is full
    inst = explicit_instance(coords, [10, 5, 5], [100, 100], [0, 0], q2=10)
    sol = Solution([fe_route([1, 2])], [se_route(1, [3]), se_route(2, [4, 5])], {1, 2})
    assert check_feasibility(inst, sol) == []
    out = local_search(inst, sol, Config())
    assert check_feasibility(inst, out) == []
    assert all(sum(inst.demand[c] for c in r.visits) <= 10 for r in out.se_routes)


def test_exchange_equal_swap_not_applied():
    coords = [(0, 0), (10, 0), (-10, 0), (10, 5), (-10, 5)]
    inst = explicit_instance(coords, [5, 5], [100, 100], [0, 0], q2=5)
    sol = Solution([fe_route([1, 2])], [se_route(1, [3]), se_route(2, [4])], {1, 2})
    out = local_search(inst, sol, Config())
    assert out.signature() == sol.signature()


def test_intra_route_improve_keeps_customer_sets(small20, cfg):
    start = initial_solution(small20, cfg)
    out = intra_route_improve(small20, start, cfg)
    assert sorted(map(sorted, (r.visits for r in out.se_routes))) == \
        sorted(map(sorted, (r.visits for r in start.se_routes)))
    assert total_cost(small20, out) <= total_cost(small20, start)
