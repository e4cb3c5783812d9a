"""A* over bay states with the access directions held fixed."""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, TextIO, Tuple

from .bounds import h_value
from .lanes import Fixing, Groups, blocking_cut, lane_moves, lane_sequences
from .model import Bay, Coord, Move, apply_move

SOLVED = "solved"
INFEASIBLE = "infeasible"
TIMEOUT = "timeout"

State = Tuple[Groups, ...]
LaneMove = Tuple[int, int, int, int]


class BrokenChainError(RuntimeError):
    pass


@dataclass
class SearchNode:
    state: State
    g: int
    h: float
    parent: Optional["SearchNode"] = None
    move: Optional[LaneMove] = None

    @property
    def f(self) -> float:
        return self.g + self.h


@dataclass
class SearchOutcome:
    status: str
    moves: List[Move] = field(default_factory=list)
    nodes: int = 0
    runtime: float = 0.0
    root_h: float = 0.0
    best_f: float = 0.0
    reason: str = ""

    @property
    def n_moves(self) -> Optional[int]:
        return len(self.moves) if self.status == SOLVED else None


class LaneSpace:
    """Raw lane-tuple view of a bay under one fixing."""

    def __init__(self, bay: Bay, fixing: Fixing):
        self.bay = bay
        self.fixing = fixing
        self.lanes = lane_sequences(bay, fixing)
        self.root: State = tuple(lane.groups for lane in self.lanes)

    def to_move(self, state: State, lm: LaneMove) -> Move:
        a, pa, b, pb = lm
        return Move(self.lanes[a].slots[pa], self.lanes[b].slots[pb], state[a][pa])

    def to_bay(self, state: State) -> Bay:
        updates: List[Tuple[Coord, int]] = []
        for lane, groups in zip(self.lanes, state):
            updates.extend(zip(lane.slots, groups))
        return self.bay.replace(updates)


def apply_lane_move(state: State, lm: LaneMove) -> State:
    a, pa, b, pb = lm
    lanes = list(state)
    src = list(lanes[a])
    dst = list(lanes[b])
    dst[pb] = src[pa]
    src[pa] = 0
    lanes[a] = tuple(src)
    lanes[b] = tuple(dst)
    return tuple(lanes)


def is_goal_state(state: State) -> bool:
    return all(blocking_cut(g) == 0 for g in state)


def branch(node: SearchNode, groups: int, kind: str = "full") -> List[SearchNode]:
    """Successors of ``node`` minus the move undoing its generating move."""
    undo = None
    if node.move is not None:
        a, _, b, _ = node.move
        undo = (b, a)
    out = []
    for lm in lane_moves(node.state):
        if undo is not None and (lm[0], lm[2]) == undo:
            continue
        child = apply_lane_move(node.state, lm)
        out.append(SearchNode(child, node.g + 1, h_value(child, groups, kind), node, lm))
    return out


def reconstruct(node: SearchNode, space: LaneSpace) -> List[Move]:
    chain = []
    while node.parent is not None:
        if node.move is None:
            raise BrokenChainError("node without generating move inside the chain")
        chain.append(node)
        node = node.parent
    if node.state != space.root:
        raise BrokenChainError("parent chain does not end at the root")
    moves = [space.to_move(n.parent.state, n.move) for n in reversed(chain)]
    bay = space.bay
    for m in moves:
        bay = apply_move(bay, m)
    if bay != space.to_bay(chain[0].state if chain else space.root):
        raise BrokenChainError("replayed moves do not reproduce the goal state")
    return moves


def astar(
    root: Bay,
    fixing: Fixing,
    timeout: Optional[float] = None,
    node_cap: Optional[int] = None,
    bound: str = "full",
    trace: Optional[TextIO] = None,
    clock: Callable[[], float] = time.perf_counter,
) -> SearchOutcome:
    """Optimal move sequence under ``fixing``, an infeasibility proof or a timeout.

    Ties on ``f`` go to the deeper node, then to the earlier push. A state is
    expanded again only when it is reached with a strictly smaller ``g``.
    Successors whose bound is infinite are dropped; if the root itself has an
    infinite bound the search re-runs with the finite blocking part of the
    bound so that infeasibility is always decided by exhausting the open list.
    """
    start = clock()
    space = LaneSpace(root, fixing)
    root_h = h_value(space.root, root.groups, bound)
    kind = bound
    if math.isinf(root_h):
        kind = "bx"
    out = _run(space, root.groups, kind, timeout, node_cap, trace, clock, start)
    out.root_h = root_h
    out.runtime = clock() - start
    return out


def _run(space, groups, kind, timeout, node_cap, trace, clock, start) -> SearchOutcome:
    h0 = h_value(space.root, groups, kind)
    root = SearchNode(space.root, 0, h0)
    tick = itertools.count()
    heap = [(root.f, 0, next(tick), root)]
    open_f: Dict[State, float] = {root.state: root.f}
    closed: Dict[State, int] = {}
    nodes = 0
    best_f = root.f
    while heap:
        if timeout is not None and nodes % 64 == 0 and clock() - start > timeout:
            return SearchOutcome(TIMEOUT, nodes=nodes, best_f=best_f, reason="time limit")
        f, _, _, node = heapq.heappop(heap)
        seen = closed.get(node.state)
        if seen is not None and seen <= node.g:
            continue
        closed[node.state] = node.g
        nodes += 1
        best_f = f
        if trace is not None:
            trace.write(f"{f} {node.g} {node.h} {hash(node.state) & 0xFFFFFFFF:08x}\n")
        if node.h == 0 and is_goal_state(node.state):
            return SearchOutcome(SOLVED, reconstruct(node, space), nodes=nodes, best_f=f)
        if node_cap is not None and nodes >= node_cap:
            return SearchOutcome(TIMEOUT, nodes=nodes, best_f=best_f, reason="node cap")
        for child in branch(node, groups, kind):
            if math.isinf(child.h):
                continue
            prev = closed.get(child.state)
            if prev is not None and prev <= child.g:
                continue
            cf = child.f
            known = open_f.get(child.state)
            if known is not None and known <= cf:
                continue
            open_f[child.state] = cf
            heapq.heappush(heap, (cf, -child.g, next(tick), child))
    return SearchOutcome(INFEASIBLE, nodes=nodes, best_f=best_f)


def replay(bay: Bay, moves: Sequence[Move]) -> Bay:
    for m in moves:
        bay = apply_move(bay, m)
    return bay
