"""Bay grid, coordinates, moves and access variants.

Coordinates are 1-based ``(i, j, t)``: column ``i`` runs west to east, row
``j`` runs north to south and tier ``t`` counts upwards from the floor.
Group ``0`` marks an empty slot; ``1..G`` are retrieval groups and lower
groups leave the bay earlier.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Tuple

Coord = Tuple[int, int, int]
Stack = Tuple[int, int]


class IllegalMoveError(ValueError):
    """Raised when a move does not fit the bay it is applied to."""


class Direction(str, enum.Enum):
    NORTH = "N"
    SOUTH = "S"
    WEST = "W"
    EAST = "E"

    def __str__(self) -> str:
        return self.value


# lexicographic tie-break order used by the access fixing
DIRECTION_ORDER = (Direction.NORTH, Direction.SOUTH, Direction.WEST, Direction.EAST)


@dataclass(frozen=True)
class Dims:
    columns: int
    rows: int
    tiers: int

    def __post_init__(self) -> None:
        if self.columns < 1 or self.rows < 1 or self.tiers < 1:
            raise ValueError(f"dimensions must be positive, got {self.label}")

    @property
    def capacity(self) -> int:
        return self.columns * self.rows * self.tiers

    @property
    def label(self) -> str:
        return f"{self.columns}x{self.rows}x{self.tiers}"

    @classmethod
    def parse(cls, text: str) -> "Dims":
        parts = text.lower().split("x")
        if len(parts) != 3:
            raise ValueError(f"expected LxWxT, got {text!r}")
        return cls(*(int(p) for p in parts))


_VARIANT_DIRECTIONS = {
    "single": frozenset({Direction.NORTH}),
    "corner": frozenset({Direction.NORTH, Direction.WEST}),
    "opposite": frozenset({Direction.NORTH, Direction.SOUTH}),
    "three": frozenset({Direction.NORTH, Direction.SOUTH, Direction.WEST}),
    "four": frozenset(DIRECTION_ORDER),
}
VARIANT_NAMES = tuple(_VARIANT_DIRECTIONS)


@dataclass(frozen=True)
class AccessVariant:
    allowed: frozenset

    def __post_init__(self) -> None:
        if not self.allowed:
            raise ValueError("an access variant needs at least one direction")
        object.__setattr__(self, "allowed", frozenset(Direction(d) for d in self.allowed))

    @classmethod
    def named(cls, name: str) -> "AccessVariant":
        try:
            return cls(_VARIANT_DIRECTIONS[name])
        except KeyError:
            raise ValueError(f"unknown access variant {name!r}") from None

    @classmethod
    def parse(cls, text: str) -> "AccessVariant":
        """Accept a variant name or a comma separated direction list like ``N,E``."""
        if text in _VARIANT_DIRECTIONS:
            return cls.named(text)
        return cls(frozenset(Direction(p.strip().upper()) for p in text.split(",") if p.strip()))

    @property
    def name(self) -> str:
        for name, dirs in _VARIANT_DIRECTIONS.items():
            if dirs == self.allowed:
                return name
        return ",".join(d.value for d in self.ordered)

    @property
    def ordered(self) -> Tuple[Direction, ...]:
        return tuple(d for d in DIRECTION_ORDER if d in self.allowed)

    def __contains__(self, direction: object) -> bool:
        return direction in self.allowed


SINGLE = AccessVariant.named("single")


@dataclass(frozen=True)
class Move:
    src: Coord
    dst: Coord
    group: int

    def __post_init__(self) -> None:
        if self.src == self.dst:
            raise IllegalMoveError("a move needs distinct source and destination")
        if self.group < 1:
            raise IllegalMoveError("only occupied slots can be moved")

    def inverse(self) -> "Move":
        return Move(self.dst, self.src, self.group)

    def __str__(self) -> str:
        return "{} {} {} -> {} {} {}".format(*self.src, *self.dst)


@dataclass(frozen=True)
class Bay:
    dims: Dims
    cells: Tuple[int, ...]
    variant: AccessVariant = SINGLE
    groups: int = 5

    def __post_init__(self) -> None:
        object.__setattr__(self, "cells", tuple(self.cells))
        if len(self.cells) != self.dims.capacity:
            raise ValueError(
                f"expected {self.dims.capacity} cells for {self.dims.label}, got {len(self.cells)}"
            )

    @classmethod
    def empty(cls, dims: Dims, variant: AccessVariant = SINGLE, groups: int = 5) -> "Bay":
        return cls(dims, (0,) * dims.capacity, variant, groups)

    @classmethod
    def from_stacks(
        cls,
        dims: Dims,
        stacks: Mapping[Stack, Sequence[int]],
        variant: AccessVariant = SINGLE,
        groups: int = 5,
    ) -> "Bay":
        """Build a bay from ``{(i, j): (bottom, ..., top)}``; omitted stacks are empty."""
        cells = [0] * dims.capacity
        for (i, j), loads in stacks.items():
            if len(loads) > dims.tiers:
                raise ValueError(f"stack {(i, j)} holds {len(loads)} loads, only {dims.tiers} tiers")
            for t, g in enumerate(loads, start=1):
                cells[_flat(dims, i, j, t)] = g
        return cls(dims, tuple(cells), variant, groups)

    def index(self, i: int, j: int, t: int) -> int:
        if not (1 <= i <= self.dims.columns and 1 <= j <= self.dims.rows and 1 <= t <= self.dims.tiers):
            raise IndexError(f"coordinate {(i, j, t)} outside {self.dims.label}")
        return _flat(self.dims, i, j, t)

    def __getitem__(self, coord: Coord) -> int:
        return self.cells[self.index(*coord)]

    def stack(self, i: int, j: int) -> Tuple[int, ...]:
        """Groups of one stack, bottom tier first."""
        start = _flat(self.dims, i, j, 1)
        return self.cells[start : start + self.dims.tiers]

    def height(self, i: int, j: int) -> int:
        return sum(1 for g in self.stack(i, j) if g)

    def stacks(self) -> Iterator[Stack]:
        for i in range(1, self.dims.columns + 1):
            for j in range(1, self.dims.rows + 1):
                yield (i, j)

    def coords(self) -> Iterator[Coord]:
        for i, j in self.stacks():
            for t in range(1, self.dims.tiers + 1):
                yield (i, j, t)

    @property
    def n_loads(self) -> int:
        return sum(1 for g in self.cells if g)

    def load_multiset(self) -> Tuple[int, ...]:
        return tuple(sorted(g for g in self.cells if g))

    def replace(self, updates: Iterable[Tuple[Coord, int]]) -> "Bay":
        cells = list(self.cells)
        for coord, g in updates:
            cells[self.index(*coord)] = g
        return Bay(self.dims, tuple(cells), self.variant, self.groups)

    def render(self) -> str:
        """Top view, one line per row; each stack shown bottom-to-top, ``-`` for empty tiers."""
        lines = []
        for j in range(1, self.dims.rows + 1):
            cells = []
            for i in range(1, self.dims.columns + 1):
                cells.append("".join(str(g) if g else "-" for g in self.stack(i, j)))
            lines.append(" ".join(cells))
        return "\n".join(lines)


def _flat(dims: Dims, i: int, j: int, t: int) -> int:
    return ((i - 1) * dims.rows + (j - 1)) * dims.tiers + (t - 1)


def validate_bay(bay: Bay) -> Optional[str]:
    """Return a description of the first violated structural rule, or ``None``."""
    for idx, g in enumerate(bay.cells):
        if not 0 <= g <= bay.groups:
            i, j, t = _unflat(bay.dims, idx)
            return f"group range: cell {(i, j, t)} holds {g}, expected 0..{bay.groups}"
    for i, j in bay.stacks():
        stack = bay.stack(i, j)
        for t in range(1, len(stack)):
            if stack[t] and not stack[t - 1]:
                return f"gravity: cell {(i, j, t + 1)} is occupied above an empty tier {t}"
    return None


def _unflat(dims: Dims, idx: int) -> Coord:
    t = idx % dims.tiers
    rest = idx // dims.tiers
    return (rest // dims.rows + 1, rest % dims.rows + 1, t + 1)


def state_key(bay: Bay) -> Tuple:
    """Hashable key; equal keys iff the bays hold the same groups in the same slots."""
    return (bay.dims.columns, bay.dims.rows, bay.dims.tiers, bay.cells)


def apply_move(bay: Bay, move: Move, fixing=None) -> Bay:
    """Return the bay after ``move``.

    Without ``fixing`` only the physical rules are checked (occupied source at
    the top of its stack, empty destination resting on a load or the floor).
    With ``fixing`` the move must also be one of ``legal_moves(bay, fixing)``.
    """
    try:
        src_group = bay[move.src]
        dst_group = bay[move.dst]
    except IndexError as exc:
        raise IllegalMoveError(str(exc)) from None
    if src_group == 0:
        raise IllegalMoveError(f"source {move.src} is empty")
    if src_group != move.group:
        raise IllegalMoveError(f"source {move.src} holds group {src_group}, move records {move.group}")
    if dst_group != 0:
        raise IllegalMoveError(f"destination {move.dst} is occupied")
    si, sj, st = move.src
    if st < bay.dims.tiers and bay[(si, sj, st + 1)]:
        raise IllegalMoveError(f"source {move.src} is not the top of its stack")
    di, dj, dt = move.dst
    below_ok = dt == 1 or bay[(di, dj, dt - 1)] or (di, dj, dt - 1) == move.src
    if not below_ok or (di, dj) == (si, sj):
        raise IllegalMoveError(f"destination {move.dst} would violate gravity")
    if fixing is not None:
        from .lanes import legal_moves

        if move not in legal_moves(bay, fixing):
            raise IllegalMoveError(f"{move} is not legal under the given fixing")
    return bay.replace([(move.src, 0), (move.dst, src_group)])
