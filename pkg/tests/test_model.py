import dataclasses

import numpy as np
import pytest

from elrp.model import Config, Customer, Solution, fe_route, se_route, validate_instance
from conftest import make_t1


def test_config_defaults_match_tuned_values():
    c = Config()
    assert c.max_iter == 100_000
    assert c.lambda_smoothing == 0.8
    assert c.scores == (10.0, 5.0, 1.0, 0.0)
    assert (c.t_init, c.t_final) == (10.0, 1.0)
    assert c.neighbor_fraction == 0.2
    assert c.destroy_bound == 1.0
    assert c.ls_every == 1 and c.sc_every == 2000
    assert not c.relocate_intra_route and not c.partial_microdepot_removal
    assert c.validate() == []


@pytest.mark.parametrize("change, fragment", [
    ({"lambda_smoothing": 1.5}, "lambda_smoothing"),
    ({"t_init": 0.5}, "temperatures"),
    ({"sc_every": 0}, "sc_every"),
    ({"neighbor_fraction": 0.0}, "neighbor_fraction"),
    ({"init_method": "random"}, "init_method"),
    ({"correction_keep": "middle"}, "correction_keep"),
    ({"sa_reference": "other"}, "sa_reference"),
])
def test_config_validation_rejects(change, fragment):
    problems = Config().with_(**change).validate()
    assert any(fragment in p for p in problems)


def test_node_indexing_is_positional(t1):
    assert t1.depot_ids == (1, 2)
    assert t1.customer_ids == (3, 4, 5, 6)
    assert t1.n_nodes == 7
    assert t1.is_depot(2) and not t1.is_depot(3)
    assert t1.is_customer(6) and not t1.is_customer(0)
    assert t1.demand[3] == 10 and t1.demand[1] == 0
    assert validate_instance(t1) == []


def test_validate_instance_reports_negative_demand(t1):
    bad = dataclasses.replace(t1, customers=(Customer(3, -1),) + t1.customers[1:])
    assert "customer 3: negative demand" in validate_instance(bad)


def test_validate_instance_reports_negative_matrix_cell(t1):
    d = t1.dist_se.copy()
    d[1, 2] = -5
    bad = dataclasses.replace(t1, dist_se=d)
    problems = validate_instance(bad)
    assert len([p for p in problems if "negative" in p and "dist_se" in p]) == 1


def test_cost_lists_mirror_arrays(t1):
    assert t1.cost_se == t1.cost_se_np.tolist()
    assert np.array_equal(t1.cost_fe_np, t1.dist_fe * t1.fe_vehicle.cost_per_distance)


def test_solution_copy_is_deep():
    s = Solution([fe_route([1])], [se_route(1, [3, 4])], {1})
    c = s.copy()
    c.se_routes[0].visits.append(5)
    c.open_depots.add(2)
    assert s.se_routes[0].visits == [3, 4]
    assert s.open_depots == {1}


def test_solution_views(t1):
    s = Solution([fe_route([1, 5])], [se_route(1, [3, 4])], {1})
    assert s.direct_customers(t1) == [5]
    assert sorted(s.served(t1)) == [3, 4, 5]
    assert s.depot_loads(t1) == {1: 20}
    assert s.signature() == Solution([fe_route([1, 5])], [se_route(1, [3, 4])], {1}).signature()


def test_instance_equality_compares_arrays():
    a, b = make_t1(), make_t1()
    assert a == b
    assert a != make_t1(q2=71)
