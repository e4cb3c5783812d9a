import itertools
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from upmp.fixing import (build_network, edge_cost, extract_lanes, fix_access, lane_cost,
                         lane_groups, solve_fixing)
from upmp.lanes import Fixing, is_boundary, run_from_boundary
from upmp.model import VARIANT_NAMES, AccessVariant, Bay, Dims, Direction
from worked_bays import FOUR_WAY_EXAMPLE


def _run_to(dims, d, stack):
    vertical = d in (Direction.NORTH, Direction.SOUTH)
    line, depth = (stack[0], dims.rows) if vertical else (stack[1], dims.columns)
    run = run_from_boundary(dims, d, line, depth)
    return run[: run.index(stack) + 1]


def brute_force_costs(bay):
    """Cost of every valid direction-per-stack assignment, by enumeration."""
    dims, allowed = bay.dims, bay.variant.ordered
    stacks = list(bay.stacks())
    options = []
    for s in stacks:
        opts = []
        for d in allowed:
            run = _run_to(dims, d, s)
            # inner stacks of a run may not sit on an allowed boundary
            if all(not any(is_boundary(dims, x, o) for o in allowed) for x in run[1:]):
                opts.append(d)
        options.append(opts)
    costs = []
    for choice in itertools.product(*options):
        assign = dict(zip(stacks, choice))
        if any(assign[x] != d for s, d in assign.items() for x in _run_to(dims, d, s)):
            continue
        lanes = {}
        for s, d in assign.items():
            run = _run_to(dims, d, s)
            key = (d, run[0])
            if len(run) > len(lanes.get(key, ())):
                lanes[key] = run
        costs.append(sum(lane_cost(lane_groups(bay, run)) for run in lanes.values()))
    return costs


def _random_bay(rng, dims, variant, groups=3):
    cells = []
    for _ in range(dims.columns * dims.rows):
        h = rng.randint(0, dims.tiers)
        cells.extend([rng.randint(1, groups) for _ in range(h)] + [0] * (dims.tiers - h))
    return Bay(dims, tuple(cells), variant, groups)


def test_edge_costs_four_way_example():
    bay = FOUR_WAY_EXAMPLE
    assert edge_cost(bay, (), (1, 2)) == 1
    assert edge_cost(bay, ((1, 2),), (2, 2)) == 2
    assert edge_cost(bay, (), (1, 1)) == 0
    lines = build_network(bay).dump().splitlines()
    assert "W S2 1" in lines and "S2 S5 2" in lines
    assert "o N 0" in lines


def test_four_way_example_network_and_solution():
    net = build_network(FOUR_WAY_EXAMPLE)
    assert len(net.vertices) == 14 and net.supply == 9
    assert all(e.cost == 0 for e in net.edges if e.src == "o")
    sol = solve_fixing(net)
    assert sol.objective == 4
    assert len(sol.lanes) == 8
    assert sum(e.cost for e in sol.edges) == 4
    sol.fixing.validate(FOUR_WAY_EXAMPLE.dims, FOUR_WAY_EXAMPLE.variant.allowed)


def test_tiny_and_single_networks():
    one = Bay.empty(Dims(1, 1, 1))
    net = build_network(one)
    assert net.vertices == ["o", "N", "S1"]
    assert [(e.src, e.dst, e.cost) for e in net.edges] == [("o", "N", 0), ("N", "S1", 0)]
    net = build_network(Bay.empty(Dims(3, 3, 1)))
    assert {e.direction for e in net.edges} == {Direction.NORTH}
    assert len(net.edges) == 1 + 9


def test_single_direction_is_forced():
    bay = Bay.from_stacks(Dims(3, 2, 1), {(1, 1): (1,), (1, 2): (2,)})
    sol = fix_access(bay)
    assert sol.objective == 0
    lanes = extract_lanes(sol)
    assert len(lanes) == 3 and all(len(lane.stacks) == 2 for lane in lanes)
    assert sol.fixing == Fixing.uniform(bay.dims)


def test_opposite_full_column_splits():
    bay = Bay.from_stacks(Dims(1, 4, 1), {(1, j): (g,) for j, g in enumerate((1, 3, 2, 1), 1)},
                          AccessVariant.named("opposite"))
    sol = fix_access(bay)
    assert sum(len(lane.stacks) for lane in sol.lanes) == 4
    assert {lane.direction for lane in sol.lanes} == {Direction.NORTH, Direction.SOUTH}
    assert sol.objective == min(brute_force_costs(bay)) == 0


def test_empty_bay_prefers_shallow_northern_lanes():
    sol = fix_access(Bay.empty(Dims(3, 3, 1), AccessVariant.named("four")))
    assert sol.objective == 0
    dirs = sol.directions()
    assert dirs[(1, 1)] == dirs[(3, 1)] == Direction.NORTH
    assert dirs[(2, 2)] == Direction.NORTH  # reached through (2, 1)
    assert dirs[(1, 3)] == Direction.SOUTH
    assert dirs[(1, 2)] == Direction.WEST and dirs[(3, 2)] == Direction.EAST
    assert max(len(lane.stacks) for lane in sol.lanes) == 2


def test_every_two_by_two_bay_matches_enumeration():
    dims = Dims(2, 2, 1)
    for name in VARIANT_NAMES:
        variant = AccessVariant.named(name)
        for cells in itertools.product(range(4), repeat=4):
            bay = Bay(dims, cells, variant, 3)
            assert fix_access(bay).objective == min(brute_force_costs(bay)), (name, cells)


def test_random_three_by_three_bays_match_enumeration():
    rng = random.Random(5)
    for n in range(300):
        dims = Dims(3, 3, 1 + n % 2)
        bay = _random_bay(rng, dims, AccessVariant.named(VARIANT_NAMES[n % 5]))
        costs = brute_force_costs(bay)
        sol = fix_access(bay)
        assert sol.objective == min(costs)
        # the objective is the lane cost of the lanes actually returned
        assert sol.objective == sum(lane_cost(lane_groups(bay, lane.stacks)) for lane in sol.lanes)


@given(st.integers(0, 10 ** 6), st.sampled_from(VARIANT_NAMES[1:]),
       st.sampled_from([Dims(4, 3, 1), Dims(3, 4, 2), Dims(4, 4, 1)]))
@settings(max_examples=40, deadline=None)
def test_claim_regions_and_determinism(seed, name, dims):
    bay = _random_bay(random.Random(seed), dims, AccessVariant.named(name))
    sol = fix_access(bay)
    assert sol == fix_access(bay)
    sol.fixing.validate(dims, bay.variant.allowed)
    dirs = sol.directions()
    for i in range(1, dims.columns + 1):
        col = [dirs[(i, j)] for j in range(1, dims.rows + 1)]
        north = [j for j, d in enumerate(col) if d is Direction.NORTH]
        south = [j for j, d in enumerate(col) if d is Direction.SOUTH]
        assert north == list(range(len(north)))
        assert south == list(range(dims.rows - len(south), dims.rows))
    for j in range(1, dims.rows + 1):
        row = [dirs[(i, j)] for i in range(1, dims.columns + 1)]
        west = [i for i, d in enumerate(row) if d is Direction.WEST]
        east = [i for i, d in enumerate(row) if d is Direction.EAST]
        assert west == list(range(len(west)))
        assert east == list(range(dims.columns - len(east), dims.columns))
    if dims.columns * dims.rows <= 12:
        assert sol.objective == min(brute_force_costs(bay))
