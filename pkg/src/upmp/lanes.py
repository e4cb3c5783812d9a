"""Lanes under a fixed access-direction assignment.

A lane is a straight run of stacks entered from one boundary. Its slots form
an access sequence ordered from the access side inward: the outermost stack
first, each stack listed top tier first. Index 0 is therefore the first slot
a vehicle reaches. In a gap-free lane all empty slots come before all
occupied ones; an empty slot behind a load is a hole.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from .model import Bay, Coord, Dims, Direction, IllegalMoveError, Move, Stack

Groups = Tuple[int, ...]


class FixingError(ValueError):
    """The lanes of a fixing do not partition the bay into valid straight runs."""


class Label(str, enum.Enum):
    EMPTY = "empty"
    BLOCKING = "blocking"
    WELL_PLACED = "well-placed"


def _step(direction: Direction) -> Tuple[int, int]:
    # unit step pointing away from the boundary the direction enters from
    return {
        Direction.NORTH: (0, 1),
        Direction.SOUTH: (0, -1),
        Direction.WEST: (1, 0),
        Direction.EAST: (-1, 0),
    }[direction]


def boundary_stack(dims: Dims, direction: Direction, line: int) -> Stack:
    """First stack of grid line ``line`` seen from ``direction``."""
    if direction is Direction.NORTH:
        return (line, 1)
    if direction is Direction.SOUTH:
        return (line, dims.rows)
    if direction is Direction.WEST:
        return (1, line)
    return (dims.columns, line)


def run_from_boundary(dims: Dims, direction: Direction, line: int, length: int) -> Tuple[Stack, ...]:
    i, j = boundary_stack(dims, direction, line)
    di, dj = _step(direction)
    return tuple((i + k * di, j + k * dj) for k in range(length))


def is_boundary(dims: Dims, stack: Stack, direction: Direction) -> bool:
    i, j = stack
    return {
        Direction.NORTH: j == 1,
        Direction.SOUTH: j == dims.rows,
        Direction.WEST: i == 1,
        Direction.EAST: i == dims.columns,
    }[direction]


@dataclass(frozen=True)
class VirtualLane:
    direction: Direction
    stacks: Tuple[Stack, ...]

    def slots(self, tiers: int) -> Tuple[Coord, ...]:
        return tuple((i, j, t) for i, j in self.stacks for t in range(tiers, 0, -1))


@dataclass(frozen=True)
class Fixing:
    """Access direction per stack, stored as the lanes it induces."""

    lanes: Tuple[VirtualLane, ...]

    @classmethod
    def uniform(cls, dims: Dims, direction: Direction = Direction.NORTH) -> "Fixing":
        """Every stack served from ``direction``: one lane per grid line."""
        if direction in (Direction.NORTH, Direction.SOUTH):
            count, length = dims.columns, dims.rows
        else:
            count, length = dims.rows, dims.columns
        return cls(tuple(VirtualLane(direction, run_from_boundary(dims, direction, k, length))
                         for k in range(1, count + 1)))

    def direction_of(self, stack: Stack) -> Direction:
        for lane in self.lanes:
            if stack in lane.stacks:
                return lane.direction
        raise KeyError(stack)

    def validate(self, dims: Dims, allowed=None) -> None:
        seen: Dict[Stack, int] = {}
        for n, lane in enumerate(self.lanes):
            if not lane.stacks:
                raise FixingError(f"lane {n} has no stacks")
            if allowed is not None and lane.direction not in allowed:
                raise FixingError(f"lane {n} uses direction {lane.direction} outside the variant")
            if not is_boundary(dims, lane.stacks[0], lane.direction):
                raise FixingError(f"lane {n} does not start at the {lane.direction} boundary")
            di, dj = _step(lane.direction)
            for (a, b), (c, d) in zip(lane.stacks, lane.stacks[1:]):
                if (c - a, d - b) != (di, dj):
                    raise FixingError(f"lane {n} is not a straight contiguous run")
            for s in lane.stacks:
                if not (1 <= s[0] <= dims.columns and 1 <= s[1] <= dims.rows):
                    raise FixingError(f"lane {n} leaves the grid at {s}")
                if s in seen:
                    raise FixingError(f"stack {s} claimed by lanes {seen[s]} and {n}")
                seen[s] = n
        missing = [(i, j) for i in range(1, dims.columns + 1) for j in range(1, dims.rows + 1)
                   if (i, j) not in seen]
        if missing:
            raise FixingError(f"stacks without a lane: {missing}")


@dataclass(frozen=True)
class LaneSequence:
    lane_id: int
    lane: VirtualLane
    slots: Tuple[Coord, ...]
    groups: Groups

    @property
    def length(self) -> int:
        return len(self.slots)


def lane_sequences(bay: Bay, fixing: Fixing) -> List[LaneSequence]:
    fixing.validate(bay.dims)
    out = []
    for n, lane in enumerate(fixing.lanes):
        slots = lane.slots(bay.dims.tiers)
        out.append(LaneSequence(n, lane, slots, tuple(bay[c] for c in slots)))
    return out


@lru_cache(maxsize=1 << 16)
def blocking_cut(groups: Groups) -> int:
    """Number of leading sequence positions whose loads are all blocking.

    Every load before the returned index is blocking, every load at or after
    it is well placed. A load is blocking when a strictly smaller group sits
    deeper in the lane, or when it sits in front of a blocking load.
    """
    smallest = None
    for pos in range(len(groups) - 1, -1, -1):
        g = groups[pos]
        if not g:
            continue
        if smallest is not None and g > smallest:
            return pos + 1
        if smallest is None or g < smallest:
            smallest = g
    return 0


def classify(groups) -> Tuple[Label, ...]:
    groups = _groups(groups)
    cut = blocking_cut(groups)
    return tuple(
        Label.EMPTY if not g else Label.BLOCKING if pos < cut else Label.WELL_PLACED
        for pos, g in enumerate(groups)
    )


def blocking_count(groups) -> int:
    groups = _groups(groups)
    cut = blocking_cut(groups)
    return sum(1 for g in groups[:cut] if g)


def hole_count(groups) -> int:
    """Empty slots lying behind at least one load of the same lane."""
    groups = _groups(groups)
    first = first_occupied(groups)
    return sum(1 for g in groups[first:] if not g)


def first_occupied(groups: Groups) -> int:
    for pos, g in enumerate(groups):
        if g:
            return pos
    return len(groups)


def _groups(lane) -> Groups:
    return lane.groups if isinstance(lane, LaneSequence) else tuple(lane)


def lane_moves(state: Sequence[Groups]) -> List[Tuple[int, int, int, int]]:
    """All moves on raw lane tuples as ``(src_lane, src_pos, dst_lane, dst_pos)``.

    The outermost load of a lane goes to the slot directly in front of the
    outermost load of a different lane (the deepest slot of an empty lane).
    """
    fronts = [first_occupied(g) for g in state]
    moves = []
    for a, fa in enumerate(fronts):
        if fa == len(state[a]):
            continue
        for b, fb in enumerate(fronts):
            if b != a and fb > 0:
                moves.append((a, fa, b, fb - 1))
    return moves


def legal_moves(bay: Bay, fixing: Fixing) -> List[Move]:
    lanes = lane_sequences(bay, fixing)
    state = [lane.groups for lane in lanes]
    return [
        Move(lanes[a].slots[pa], lanes[b].slots[pb], state[a][pa])
        for a, pa, b, pb in lane_moves(state)
    ]


def is_goal(bay: Bay, fixing: Fixing) -> bool:
    return all(blocking_cut(lane.groups) == 0 for lane in lane_sequences(bay, fixing))


def check_hole_free(bay: Bay, fixing: Fixing) -> None:
    """Raise if some lane has a load in front of an empty slot."""
    for lane in lane_sequences(bay, fixing):
        if hole_count(lane.groups):
            raise IllegalMoveError(f"lane {lane.lane_id} has holes: {lane.groups}")
