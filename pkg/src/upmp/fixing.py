"""Access direction fixing for bays with several access directions.

The network has an origin ``o``, one vertex per allowed direction and one per
stack. A direction vertex points at the stacks on its boundary; a stack points
at its inward neighbour along the same straight line. The cost of an edge is
the increase in lane cost (blocking loads plus holes) when the run of stacks
from the boundary is extended by the edge's head. Edges into stacks that are
themselves on an allowed boundary are left out: serving such a stack
directly is never more expensive.

Because vehicles cannot turn inside the grid, every optimal flow decomposes
into straight boundary-anchored runs. Per column the north-served stacks form
a prefix and the south-served ones a suffix; per row the same holds for west
and east. The solver enumerates exactly these structures with a dynamic
program over the columns whose state is the phase of every row (still in the
west run, in the column-served middle, or in the east run).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .lanes import (Fixing, VirtualLane, blocking_count, hole_count, is_boundary,
                    run_from_boundary)
from .model import DIRECTION_ORDER, Bay, Direction, Stack

LaneCost = Callable[[Tuple[int, ...]], int]

# weights of the lexicographic objective: cost, then sum of squared lane
# lengths (shallow lanes), then direction rank per stack
_W_COST = 10 ** 7
_W_DEPTH = 10 ** 3
_RANK = {d: r for r, d in enumerate(DIRECTION_ORDER)}


class UnreachableStackError(ValueError):
    """Some stack cannot be reached from any allowed direction."""


def lane_groups(bay: Bay, stacks: Sequence[Stack]) -> Tuple[int, ...]:
    """Access sequence of a run of stacks: outer stack first, top tier first."""
    return tuple(g for i, j in stacks for g in reversed(bay.stack(i, j)))


def lane_cost(groups: Tuple[int, ...]) -> int:
    return blocking_count(groups) + hole_count(groups)


def edge_cost(bay: Bay, prefix: Sequence[Stack], next_stack: Stack,
              cost: LaneCost = lane_cost) -> int:
    """Extra cost of extending the run ``prefix`` by ``next_stack``."""
    prefix = tuple(prefix)
    return cost(lane_groups(bay, prefix + (next_stack,))) - cost(lane_groups(bay, prefix))


def stack_name(bay: Bay, stack: Stack) -> str:
    i, j = stack
    return f"S{(i - 1) * bay.dims.rows + j}"


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    cost: int
    direction: Direction


@dataclass
class FlowNetwork:
    bay: Bay
    vertices: List[str]
    edges: List[Edge]
    # run_costs[d][line] = cumulative cost of runs of length 0..n, None where
    # the run would need a missing edge
    run_costs: Dict[Direction, List[List[Optional[int]]]] = field(repr=False)

    @property
    def supply(self) -> int:
        return self.bay.dims.columns * self.bay.dims.rows

    def dump(self) -> str:
        return "\n".join(f"{e.src} {e.dst} {e.cost}" for e in self.edges) + "\n"


def build_network(bay: Bay, cost: LaneCost = lane_cost) -> FlowNetwork:
    dims = bay.dims
    allowed = bay.variant.ordered
    vertices = ["o", *(d.value for d in allowed)] + [stack_name(bay, s) for s in bay.stacks()]
    edges = [Edge("o", d.value, 0, d) for d in allowed]
    run_costs: Dict[Direction, List[List[Optional[int]]]] = {}
    for d in allowed:
        vertical = d in (Direction.NORTH, Direction.SOUTH)
        n_lines, depth = (dims.columns, dims.rows) if vertical else (dims.rows, dims.columns)
        per_line = []
        for line in range(1, n_lines + 1):
            run = run_from_boundary(dims, d, line, depth)
            cum: List[Optional[int]] = [0]
            for k, stack in enumerate(run):
                if k and any(is_boundary(dims, stack, other) for other in allowed):
                    cum.extend([None] * (depth - k))
                    break
                c = cost(lane_groups(bay, run[: k + 1])) - cum[-1]
                src = d.value if k == 0 else stack_name(bay, run[k - 1])
                edges.append(Edge(src, stack_name(bay, stack), c, d))
                cum.append(cum[-1] + c)
            per_line.append(cum)
        run_costs[d] = per_line
    return FlowNetwork(bay, vertices, edges, run_costs)


@dataclass(frozen=True)
class FixingSolution:
    objective: int
    lanes: Tuple[VirtualLane, ...]
    edges: Tuple[Edge, ...]

    @property
    def fixing(self) -> Fixing:
        return Fixing(self.lanes)

    def directions(self) -> Dict[Stack, Direction]:
        return {s: lane.direction for lane in self.lanes for s in lane.stacks}


def _run_key(network: FlowNetwork, d: Direction, line: int, length: int) -> float:
    if d not in network.run_costs:
        return 0.0 if length == 0 else np.inf
    c = network.run_costs[d][line - 1][length]
    if c is None:
        return np.inf
    return float(c * _W_COST + length * length * _W_DEPTH + _RANK[d] * length)


def solve_fixing(network: FlowNetwork) -> FixingSolution:
    """Exact minimum-cost assignment of every stack to one straight lane."""
    dims = network.bay.dims
    I, J = dims.columns, dims.rows
    n_states = 3 ** J
    pow3 = 3 ** np.arange(J, dtype=np.int64)
    digits = (np.arange(n_states, dtype=np.int64)[:, None] // pow3) % 3

    W, E = Direction.WEST, Direction.EAST
    N, S = Direction.NORTH, Direction.SOUTH
    west_ok = W in network.run_costs
    wkey = np.array([[_run_key(network, W, j, w) for w in range(I + 1)] for j in range(1, J + 1)])
    ekey = np.array([[_run_key(network, E, j, e) for e in range(I + 1)] for j in range(1, J + 1)])
    choices = [(a, b) for a in range(J + 1) for b in range(J + 1 - a)]

    cost = np.full(n_states, np.inf)
    cost[0] = 0.0
    close_log: List[List[np.ndarray]] = []
    back_log: List[Tuple[np.ndarray, np.ndarray, np.ndarray]] = []

    for col in range(I):
        # rows may end their west run before this column
        closed_here = []
        for j in range(J):
            src = np.nonzero((digits[:, j] == 0) & np.isfinite(cost))[0]
            cand = cost[src] + wkey[j, col]
            dst = src + pow3[j]
            better = cand < cost[dst]
            cost[dst[better]] = cand[better]
            flag = np.zeros(n_states, dtype=bool)
            flag[dst[better]] = True
            # a later, cheaper arrival through another path cancels the flag
            closed_here.append(flag)
        close_log.append(closed_here)

        live = np.nonzero(np.isfinite(cost))[0]
        ld = digits[live]
        new_idx, new_cost, new_src, new_choice = [], [], [], []
        for ci, (a, b) in enumerate(choices):
            col_key = _run_key(network, N, col + 1, a) + _run_key(network, S, col + 1, b)
            if not np.isfinite(col_key):
                continue
            covered = np.zeros(J, dtype=bool)
            covered[:a] = True
            covered[J - b:] = True
            middle = ~covered
            ok = np.all(ld[:, covered] == 1, axis=1)
            if not west_ok:
                ok &= np.all(ld[:, middle] != 0, axis=1)
            if not ok.any():
                continue
            sel = live[ok]
            # middle rows in the column-served phase start their east run here
            starts = ld[ok][:, middle] == 1
            add = np.where(starts, ekey[middle, I - col][None, :], 0.0).sum(axis=1)
            inc = (starts * pow3[middle][None, :]).sum(axis=1)
            total = cost[sel] + col_key + add
            fin = np.isfinite(total)
            new_idx.append(sel[fin] + inc[fin])
            new_cost.append(total[fin])
            new_src.append(sel[fin])
            new_choice.append(np.full(fin.sum(), ci, dtype=np.int64))
        if not new_idx:
            raise UnreachableStackError(f"no valid lane structure for column {col + 1}")
        idx = np.concatenate(new_idx)
        cst = np.concatenate(new_cost)
        src = np.concatenate(new_src)
        chc = np.concatenate(new_choice)
        order = np.lexsort((np.arange(len(idx)), cst, idx))
        idx, cst, src, chc = idx[order], cst[order], src[order], chc[order]
        first = np.ones(len(idx), dtype=bool)
        first[1:] = idx[1:] != idx[:-1]
        cost = np.full(n_states, np.inf)
        cost[idx[first]] = cst[first]
        src_of = np.full(n_states, -1, dtype=np.int64)
        chc_of = np.full(n_states, -1, dtype=np.int64)
        src_of[idx[first]] = src[first]
        chc_of[idx[first]] = chc[first]
        back_log.append((src_of, chc_of, cost.copy()))

    final = cost + np.where(digits == 0, wkey[:, I][None, :], 0.0).sum(axis=1)
    if not np.isfinite(final).any():
        raise UnreachableStackError("no valid lane structure covers every stack")
    state = int(np.argmin(final))
    best = float(final[state])

    west_len = {j: I for j in range(J) if digits[state, j] == 0}
    east_start: Dict[int, int] = {}
    col_choice: Dict[int, Tuple[int, int]] = {}
    for col in range(I - 1, -1, -1):
        src_of, chc_of, _ = back_log[col]
        prev = int(src_of[state])
        col_choice[col] = choices[int(chc_of[state])]
        for j in range(J):
            if digits[state, j] == 2 and digits[prev, j] == 1:
                east_start[j] = col
        state = prev
        # undo the optional west-run closings of this column, last row first
        for j in range(J - 1, -1, -1):
            if close_log[col][j][state] and digits[state, j] == 1:
                state -= int(pow3[j])
                west_len[j] = col
    if state != 0:
        raise RuntimeError("fixing back-tracking did not return to the start state")

    lanes: List[VirtualLane] = []
    for col in range(I):
        a, b = col_choice[col]
        if a:
            lanes.append(VirtualLane(N, run_from_boundary(dims, N, col + 1, a)))
        if b:
            lanes.append(VirtualLane(S, run_from_boundary(dims, S, col + 1, b)))
    for j in range(J):
        if west_len.get(j):
            lanes.append(VirtualLane(W, run_from_boundary(dims, W, j + 1, west_len[j])))
        if j in east_start:
            lanes.append(VirtualLane(E, run_from_boundary(dims, E, j + 1, I - east_start[j])))
    lanes.sort(key=lambda lane: (_RANK[lane.direction], lane.stacks[0]))
    solution_lanes = tuple(lanes)
    Fixing(solution_lanes).validate(dims, network.bay.variant.allowed)
    objective = int(best // _W_COST)
    used = _used_edges(network, solution_lanes)
    if sum(e.cost for e in used) != objective:
        raise RuntimeError("edge costs of the extracted lanes disagree with the objective")
    return FixingSolution(objective, solution_lanes, used)


def _used_edges(network: FlowNetwork, lanes: Sequence[VirtualLane]) -> Tuple[Edge, ...]:
    by_key = {(e.src, e.dst, e.direction): e for e in network.edges}
    used = [by_key[("o", lane.direction.value, lane.direction)] for lane in lanes]
    used = list(dict.fromkeys(used))
    for lane in lanes:
        prev = lane.direction.value
        for s in lane.stacks:
            name = stack_name(network.bay, s)
            used.append(by_key[(prev, name, lane.direction)])
            prev = name
    return tuple(used)


def extract_lanes(solution: FixingSolution) -> List[VirtualLane]:
    return list(solution.lanes)


def fix_access(bay: Bay, cost: LaneCost = lane_cost) -> FixingSolution:
    """Build and solve the fixing network; single-direction bays are forced."""
    if len(bay.variant.allowed) == 1:
        (d,) = bay.variant.allowed
        fixing = Fixing.uniform(bay.dims, d)
        network = build_network(bay, cost)
        obj = sum(cost(lane_groups(bay, lane.stacks)) for lane in fixing.lanes)
        return FixingSolution(obj, fixing.lanes, _used_edges(network, fixing.lanes))
    return solve_fixing(build_network(bay, cost))


def admits_hole_free_fixing(bay: Bay) -> bool:
    return fix_access(bay, hole_count).objective == 0
