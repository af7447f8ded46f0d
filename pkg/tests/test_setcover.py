import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from elrp.alns import run
from elrp.construction import initial_solution
from elrp.evaluation import check_feasibility, total_cost
from elrp.model import Config, Solution, fe_route, se_route
from elrp.oracle import OracleLimitError, brute_force_set_cover
from elrp.setcover import (
    MiniNetwork,
    NetworkPool,
    correction_heuristic,
    network_cost,
    solve_set_cover,
    update_pool,
)
from conftest import explicit_instance


def net(depot, custs, cost):
    return MiniNetwork(depot, frozenset(custs), (tuple(sorted(custs)),), cost)


def _subset_optimum(nets, universe):
    """Enumerate all 2^k subsets directly."""
    best = None
    for k in range(len(nets) + 1):
        for combo in itertools.combinations(range(len(nets)), k):
            depots = [nets[i].depot for i in combo]
            if len(set(depots)) != len(depots):
                continue
            covered = set().union(*(nets[i].customers for i in combo)) if combo else set()
            if not set(universe) <= covered:
                continue
            cost = sum(nets[i].cost for i in combo)
            if best is None or cost < best:
                best = cost
    return best


def test_pool_from_two_depot_solution(t1):
    sol = Solution([fe_route([1, 2])], [se_route(1, [3, 4]), se_route(2, [5, 6])], {1, 2})
    pool = update_pool(NetworkPool(), t1, sol)
    assert len(pool) == 2
    a = next(n for n in pool.networks() if n.depot == 1)
    assert a.cost == 800 + 100 + 1000
    assert a.cost == network_cost(t1, 1, [(3, 4)])


def test_pool_keeps_cheapest_per_key():
    pool = NetworkPool()
    assert pool.add(net(1, {3, 4}, 50))
    assert not pool.add(net(1, {3, 4}, 60))
    assert pool.networks()[0].cost == 50
    assert pool.add(MiniNetwork(1, frozenset({3, 4}), ((3,), (4,)), 40))
    assert pool.networks()[0].cost == 40 and len(pool) == 1


def test_pool_limit_shrinks_by_cost_per_customer():
    pool = NetworkPool(limit=10)
    for k in range(11):
        pool.add(net(1, {100 + k}, 10 * (k + 1)))
    assert len(pool) == 9
    assert max(n.cost for n in pool.networks()) == 90


def test_pool_dump_format():
    pool = NetworkPool()
    pool.add(net(2, {7, 5}, 13))
    assert pool.dump() == "2\t5 7\t13\n"


def test_forced_cover():
    pool = [net(1, {3, 4}, 10), net(2, {4}, 1)]
    res = solve_set_cover(pool, [3, 4])
    assert [n.depot for n in res.selected] == [1] and res.cost == 10 and res.exact


def test_hand_built_six_networks():
    pool = [net(1, {1, 2}, 30), net(1, {1, 2, 3}, 40), net(2, {3, 4}, 25),
            net(2, {4, 5}, 20), net(3, {5}, 12), net(3, {1, 5}, 18)]
    res = solve_set_cover(pool, [1, 2, 3, 4, 5])
    assert res.cost == _subset_optimum(pool, [1, 2, 3, 4, 5]) == 40 + 20
    assert len({n.depot for n in res.selected}) == len(res.selected)


def test_uncoverable_returns_none():
    assert solve_set_cover([net(1, {1}, 5)], [1, 2]) is None
    assert brute_force_set_cover([net(1, {1}, 5)], [1, 2]) is None
    # coverable only by two networks of the same depot
    assert solve_set_cover([net(1, {1}, 5), net(1, {2}, 5)], [1, 2]) is None


def test_oracle_refuses_large_pool():
    with pytest.raises(OracleLimitError):
        brute_force_set_cover([net(1 + k % 5, {k}, 1) for k in range(21)], [0])


@st.composite
def pools(draw):
    n_cust = draw(st.integers(1, 8))
    n_dep = draw(st.integers(1, 5))
    size = draw(st.integers(1, 12))
    out = []
    for _ in range(size):
        custs = draw(st.sets(st.integers(1, n_cust), min_size=1))
        out.append(net(draw(st.integers(1, n_dep)), custs, draw(st.integers(1, 200))))
    return out, list(range(1, n_cust + 1))


@settings(max_examples=200, deadline=None)
@given(pools())
def test_branch_and_bound_equals_enumeration(case):
    nets, universe = case
    res = solve_set_cover(nets, universe)
    brute = brute_force_set_cover(nets, universe)
    naive = _subset_optimum(nets, universe)
    if naive is None:
        assert res is None and brute is None
    else:
        assert res.exact and res.cost == brute[1] == naive
        assert set(universe) <= set().union(*(n.customers for n in res.selected))


def test_correction_without_overlap_passes_routes_through(t1):
    nets = [MiniNetwork(1, frozenset({3, 4}), ((3, 4),), 0), MiniNetwork(2, frozenset({5, 6}), ((5, 6),), 0)]
    sol = correction_heuristic(t1, nets)
    assert [r.visits for r in sol.se_routes] == [[3, 4], [5, 6]]
    assert [r.visits for r in sol.fe_routes] == [[1], [2]]
    assert check_feasibility(t1, sol) == []


def test_correction_keep_rule():
    # customer 4 lies on both routes; removal saves 300 on the depot-1 route
    # and 100 on the depot-2 route
    n = 6
    dist = [[0] * n for _ in range(n)]

    def link(a, b, d):
        dist[a][b] = dist[b][a] = d

    for a in range(n):
        for b in range(a + 1, n):
            link(a, b, 500)
    link(1, 3, 100), link(3, 4, 250), link(4, 1, 150)  # saving 250+150-100 = 300
    link(2, 5, 100), link(5, 4, 100), link(4, 2, 100)  # saving 100+100-100 = 100
    d = np.asarray(dist, dtype=np.int64)
    inst = explicit_instance(np.zeros((n, 2)), [1, 1, 1], [10, 10], [0, 0], dist=d)
    nets = [MiniNetwork(1, frozenset({3, 4}), ((3, 4),), 0),
            MiniNetwork(2, frozenset({4, 5}), ((5, 4),), 0)]
    big = correction_heuristic(inst, nets, config=Config(correction_keep="largest"))
    assert {r.home: r.visits for r in big.se_routes} == {1: [3, 4], 2: [5]}
    small = correction_heuristic(inst, nets, config=Config(correction_keep="smallest"))
    assert {r.home: r.visits for r in small.se_routes} == {1: [3], 2: [5, 4]}
    assert check_feasibility(inst, big) == [] and check_feasibility(inst, small) == []


def test_correction_ships_uncovered_direct_customers():
    coords = [(0, 0), (10, 0), (11, 0), (1, 0)]
    inst = explicit_instance(coords, [2, 2], [10], [5], direct=True)
    nets = [MiniNetwork(1, frozenset({2}), ((2,),), 0)]
    sol = correction_heuristic(inst, nets, direct=[3])
    assert sol.direct_customers(inst) == [3]
    assert check_feasibility(inst, sol) == []


def test_correction_outputs_feasible(small20):
    rng = random.Random(0)

    res = run(small20, Config(max_iter=300, sc_every=10**9, rng_seed=2))
    pool = NetworkPool()
    update_pool(pool, small20, res.best)
    update_pool(pool, small20, initial_solution(small20))
    nets = pool.networks()
    for _ in range(30):
        pick = rng.sample(nets, min(len(nets), rng.randint(1, 4)))
        by_depot = {}
        for n in pick:
            by_depot.setdefault(n.depot, n)
        covered = set().union(*(n.customers for n in by_depot.values()))
        if covered != set(small20.customer_ids):
            continue
        sol = correction_heuristic(small20, list(by_depot.values()))
        assert check_feasibility(small20, sol) == []
    cover = solve_set_cover(pool, small20.customer_ids)
    sol = correction_heuristic(small20, cover.selected)
    assert check_feasibility(small20, sol) == []
    assert total_cost(small20, sol) <= total_cost(small20, res.best)
