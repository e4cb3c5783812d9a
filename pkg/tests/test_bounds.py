import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import lane_states, north_bays
from upmp.bounds import (CoveringInstance, NoFeasibleGX, bound_lanes, cover_brute_force,
                         demand_supply, h_value, lane_profile, lb_bx, lb_gx_covering,
                         lb_gx_uniform, lb_simple, lower_bound, _gx)
from upmp.fixing import fix_access
from upmp.lanes import Fixing, blocking_count, is_goal, lane_sequences
from upmp.oracle import CapExceeded, oracle_solve
from worked_bays import BOUND_EXAMPLE, FOUR_WAY_EXAMPLE

EXAMPLE_LANES = [(0, 0, 5, 4), (3, 1, 4, 1), (0, 5, 4, 5), (0, 3, 1, 2)]


def test_bound_example_table():
    table = demand_supply(EXAMPLE_LANES, 5)
    assert table.rows() == [
        (5, 2, 2, 0, 0, 2),
        (4, 1, 3, 5, 5, -2),
        (3, 2, 5, 0, 5, 0),
        (2, 0, 5, 0, 5, 0),
        (1, 1, 6, 5, 10, -4),
    ]
    assert (table.g_star, table.ds_star) == (5, 2)


def test_bound_example_components():
    assert lb_simple(EXAMPLE_LANES) == 6
    assert lb_bx(EXAMPLE_LANES) == (6, 1)
    table = demand_supply(EXAMPLE_LANES, 5)
    assert lb_gx_uniform(table, 2, 2, EXAMPLE_LANES) == 1
    report = lower_bound(BOUND_EXAMPLE, Fixing.uniform(BOUND_EXAMPLE.dims))
    assert (report.n_b, report.n_h, report.n_gx, report.h) == (6, 1, 1, 8)


def test_bx_edge_cases():
    assert lb_bx([(0, 0, 0), (2, 1, 0)]) == (1, 0)
    assert lb_bx([(2, 1), (3, 1), (5, 4)]) == (3, 1)
    assert lb_bx([(2, 2, 1), (3, 3, 1)]) == (4, 2)


def test_goal_lanes_have_no_surplus():
    lanes = [(0, 1, 2), (0, 0, 3), (1, 1, 1)]
    table = demand_supply(lanes, 5)
    assert all(table.d(g) == 0 for g in range(1, 6))
    assert all(table.DS(g) <= 0 for g in range(1, 6))
    assert bound_lanes(lanes).h == 0


class _Table:
    # minimal stand-in with a fixed surplus
    def __init__(self, surplus, g_star):
        self.ds_star, self.g_star = surplus, g_star


def test_uniform_gx_formula():
    # two candidate lanes with 1 and 3 well-placed loads below group 4
    lanes = [(0, 1, 4, 5), (1, 2, 3, 4), (0, 0, 0, 0)]
    assert lb_gx_uniform(_Table(5, 4), 2, 2, lanes) == 4
    assert lb_gx_uniform(_Table(0, 4), 2, 2, lanes) == 0
    with pytest.raises(NoFeasibleGX):
        lb_gx_uniform(_Table(9, 4), 2, 2, lanes)


def test_covering_examples():
    assert lb_gx_covering(CoveringInstance((1,) * 7, (2, 1, 2, 4, 2, 2, 1), 1)) == 1
    assert lb_gx_covering(CoveringInstance((1, 1), (2, 3), 0)) == 0
    assert lb_gx_covering(CoveringInstance((2, 3), (3, 5), 4)) == 3
    with pytest.raises(NoFeasibleGX):
        lb_gx_covering(CoveringInstance((1, 1), (1, 1), 3))


@given(st.lists(st.tuples(st.integers(1, 6), st.integers(0, 8)), max_size=12),
       st.integers(0, 30))
@settings(max_examples=300)
def test_covering_matches_enumeration(items, demand):
    inst = CoveringInstance(tuple(k for k, _ in items), tuple(p for _, p in items), demand)
    expected = cover_brute_force(inst)
    if expected is None:
        with pytest.raises(NoFeasibleGX):
            lb_gx_covering(inst)
    else:
        assert lb_gx_covering(inst) == expected


def test_four_way_example_bound():
    fixing = fix_access(FOUR_WAY_EXAMPLE).fixing
    lanes = lane_sequences(FOUR_WAY_EXAMPLE, fixing)
    report = lower_bound(FOUR_WAY_EXAMPLE, fixing)
    assert (report.n_b, report.n_h) == (4, 0)
    assert (report.table.g_star, report.table.ds_star) == (3, 1)
    assert (report.n_gx, report.h) == (1, 5)
    inst = CoveringInstance.from_lanes(lanes, 3, 1)
    assert inst.costs == (1,) * 7
    assert sorted(inst.space) == sorted((2, 1, 2, 4, 2, 2, 1))


def test_infeasible_gx_gives_infinite_moves():
    uniform = [(0, 1, 4, 5), (1, 2, 3, 4)]
    assert math.isinf(_gx(uniform, _Table(9, 4)))
    mixed = [(1, 4), (1, 2, 3, 4)]
    assert math.isinf(_gx(mixed, _Table(9, 4)))
    assert _gx(mixed, _Table(1, 4)) == 1
    assert _gx(mixed, _Table(2, 4)) == 3


def test_profile_counts():
    p = lane_profile((0, 4, 1, 2, 2))
    assert (p.n_blocking, p.well_placed, p.top_group) == (1, (1, 2, 2), 1)
    assert p.below(2) == 1


@given(lane_states(lanes=4, length=4))
@settings(max_examples=400)
def test_fast_bound_matches_report(state):
    report = bound_lanes(state, 5)
    assert h_value(state, 5) == report.h
    assert h_value(state, 5, "bx") == report.bx
    assert h_value(state, 5, "simple") == report.n_b
    assert sum(report.table.demand) == report.n_b
    assert lb_simple(state) <= report.bx <= report.h
    assert (report.h == 0) == (sum(blocking_count(g) for g in state) == 0)


@given(lane_states(lanes=4, length=4), st.sampled_from([(1, 3), (2, 2), (3, 4)]))
@settings(max_examples=200)
def test_mixed_length_bound_consistent(state, cut):
    # shorten two lanes to exercise the covering path
    a, b = cut
    mixed = tuple(g[-a:] if n == 0 else g[-b:] if n == 1 else g for n, g in enumerate(state))
    report = bound_lanes(mixed, 5)
    assert h_value(mixed, 5) == report.h
    table = report.table
    for g in range(1, 5):
        assert table.D(g) >= table.D(g + 1) and table.S(g) >= table.S(g + 1)


@given(north_bays(max_columns=3, max_rows=3, max_tiers=2))
@settings(max_examples=200, deadline=None)
def test_root_bound_is_admissible(bay):
    fixing = Fixing.uniform(bay.dims)
    try:
        res = oracle_solve(bay, fixing, cap=200_000)
    except CapExceeded:
        return
    h = lower_bound(bay, fixing).h
    if res.optimum is not None:
        assert h <= res.optimum
    assert (h == 0) == is_goal(bay, fixing)
