"""Admissible lower bounds on the number of moves left.

The bound adds three parts:

* ``n_b`` counts blocking loads, since each of them moves at least once.
* ``n_h`` is the smallest per-lane blocking count. It is zero as soon as one
  lane is free of blocking loads; otherwise some lane has to be cleared onto
  other blocking loads first, so its loads move twice.
* ``n_gx`` counts well-placed loads that must be relocated to open enough
  slots at the group level with the largest demand surplus.

Supply of a lane is credited at the group of its outermost well-placed load
and counts every slot in front of the well-placed block. Lanes without a
well-placed load behave like empty lanes and credit their full length at
every level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from .lanes import Fixing, Groups, _groups, blocking_cut, lane_sequences
from .model import Bay

INFEASIBLE = math.inf


class NoFeasibleGX(ValueError):
    """Not enough lanes can be cleared to cover the demand surplus."""


@dataclass(frozen=True)
class LaneProfile:
    length: int
    n_blocking: int
    blocking_groups: Tuple[int, ...]
    well_placed: Tuple[int, ...]  # outer to inner, non-decreasing

    @property
    def top_group(self) -> Optional[int]:
        return self.well_placed[0] if self.well_placed else None

    def below(self, g: int) -> int:
        """Well-placed loads with a group smaller than ``g``."""
        return sum(1 for x in self.well_placed if x < g)


@lru_cache(maxsize=1 << 18)
def lane_profile(groups: Groups) -> LaneProfile:
    cut = blocking_cut(groups)
    bad = tuple(g for g in groups[:cut] if g)
    good = tuple(g for g in groups[cut:] if g)
    return LaneProfile(len(groups), len(bad), bad, good)


def _profiles(lanes) -> List[LaneProfile]:
    return [lane_profile(_groups(lane)) for lane in lanes]


@dataclass(frozen=True)
class DemandSupplyTable:
    groups: int
    demand: Tuple[int, ...]  # index g, entry 0 unused
    supply: Tuple[int, ...]
    empty_capacity: int

    def d(self, g: int) -> int:
        return self.demand[g]

    def s(self, g: int) -> int:
        return self.supply[g]

    def D(self, g: int) -> int:
        return sum(self.demand[g:])

    def S(self, g: int) -> int:
        return sum(self.supply[g:]) + self.empty_capacity

    def DS(self, g: int) -> int:
        return self.D(g) - self.S(g)

    @property
    def g_star(self) -> int:
        # argmax over DS; ties go to the largest group
        return max(range(self.groups, 0, -1), key=lambda g: (self.DS(g), g))

    @property
    def ds_star(self) -> int:
        return self.DS(self.g_star)

    def rows(self) -> List[Tuple[int, int, int, int, int, int]]:
        """``(g, d, D, s, S, DS)`` from the highest group down."""
        return [(g, self.d(g), self.D(g), self.s(g), self.S(g), self.DS(g))
                for g in range(self.groups, 0, -1)]


@dataclass(frozen=True)
class CoveringInstance:
    costs: Tuple[int, ...]  # k_l
    space: Tuple[int, ...]  # p_l
    demand: int

    @classmethod
    def from_lanes(cls, lanes, g_star: int, demand: int) -> "CoveringInstance":
        costs, space = [], []
        for prof in _profiles(lanes):
            k = prof.below(g_star)
            if k:
                costs.append(k)
                space.append(prof.length - (len(prof.well_placed) - k))
        return cls(tuple(costs), tuple(space), demand)


@dataclass(frozen=True)
class LowerBoundReport:
    n_b: int
    n_h: int
    table: DemandSupplyTable
    n_gx: float

    @property
    def bx(self) -> int:
        return self.n_b + self.n_h

    @property
    def h(self) -> float:
        return self.bx + self.n_gx

    @property
    def feasible(self) -> bool:
        return self.n_gx != INFEASIBLE


def lb_simple(lanes) -> int:
    return sum(p.n_blocking for p in _profiles(lanes))


def lb_bx(lanes) -> Tuple[int, int]:
    profs = _profiles(lanes)
    n_b = sum(p.n_blocking for p in profs)
    n_h = min((p.n_blocking for p in profs), default=0)
    return n_b, n_h


def demand_supply(lanes, groups: int = 5) -> DemandSupplyTable:
    demand = [0] * (groups + 1)
    supply = [0] * (groups + 1)
    empty = 0
    for prof in _profiles(lanes):
        for g in prof.blocking_groups:
            demand[g] += 1
        if prof.well_placed:
            supply[prof.top_group] += prof.length - len(prof.well_placed)
        else:
            empty += prof.length
    return DemandSupplyTable(groups, tuple(demand), tuple(supply), empty)


def lb_gx_uniform(table: DemandSupplyTable, rows: int, tiers: int, lanes) -> int:
    """GX moves when every lane has ``rows * tiers`` slots."""
    surplus = table.ds_star
    if surplus <= 0:
        return 0
    needed = -(-surplus // (rows * tiers))
    g_star = table.g_star
    counts = sorted(k for k in (p.below(g_star) for p in _profiles(lanes)) if k)
    if len(counts) < needed:
        raise NoFeasibleGX(f"{needed} lanes needed, {len(counts)} can be cleared")
    return sum(counts[:needed])


def lb_gx_covering(instance: CoveringInstance) -> int:
    """Cheapest lane subset whose freed space covers the demand (exact)."""
    return _cover(tuple(zip(instance.costs, instance.space)), instance.demand)


@lru_cache(maxsize=1 << 16)
def _cover(items: Tuple[Tuple[int, int], ...], demand: int) -> int:
    if demand <= 0:
        return 0
    if sum(p for _, p in items) < demand:
        raise NoFeasibleGX(f"freed space {sum(p for _, p in items)} below demand {demand}")
    # best[r]: cheapest cost freeing at least r slots, r capped at demand
    best = [0] + [math.inf] * demand
    for k, p in items:
        for r in range(demand, 0, -1):
            c = best[max(0, r - p)] + k
            if c < best[r]:
                best[r] = c
    return int(best[demand])


def cover_brute_force(instance: CoveringInstance) -> Optional[int]:
    """Enumerate every subset; ``None`` when no subset covers the demand."""
    n = len(instance.costs)
    best = None
    for r in range(n + 1):
        for subset in combinations(range(n), r):
            if sum(instance.space[l] for l in subset) >= instance.demand:
                cost = sum(instance.costs[l] for l in subset)
                if best is None or cost < best:
                    best = cost
    return best


def _gx(lanes, table: DemandSupplyTable) -> float:
    surplus = table.ds_star
    if surplus <= 0:
        return 0
    lengths = {len(_groups(lane)) for lane in lanes}
    try:
        if len(lengths) == 1:
            (length,) = lengths
            return lb_gx_uniform(table, length, 1, lanes)
        return lb_gx_covering(CoveringInstance.from_lanes(lanes, table.g_star, surplus))
    except NoFeasibleGX:
        return INFEASIBLE


def bound_lanes(lanes: Sequence, groups: int = 5) -> LowerBoundReport:
    lanes = [_groups(lane) for lane in lanes]
    n_b, n_h = lb_bx(lanes)
    table = demand_supply(lanes, groups)
    return LowerBoundReport(n_b, n_h, table, _gx(lanes, table))


def lower_bound(bay: Bay, fixing: Fixing) -> LowerBoundReport:
    return bound_lanes(lane_sequences(bay, fixing), bay.groups)


def h_value(state: Sequence[Groups], groups: int, kind: str = "full") -> float:
    """Bound of a raw lane state; ``kind`` is ``simple``, ``bx`` or ``full``."""
    profs = [lane_profile(g) for g in state]
    n_b = sum(p.n_blocking for p in profs)
    if kind == "simple" or n_b == 0:
        return n_b
    n_h = min(p.n_blocking for p in profs)
    if kind == "bx":
        return n_b + n_h
    demand = [0] * (groups + 1)
    supply = [0] * (groups + 1)
    empty = 0
    for p in profs:
        for g in p.blocking_groups:
            demand[g] += 1
        if p.well_placed:
            supply[p.top_group] += p.length - len(p.well_placed)
        else:
            empty += p.length
    surplus, g_star = -math.inf, 0
    cum = -empty
    for g in range(groups, 0, -1):
        cum += demand[g] - supply[g]
        if cum > surplus:
            surplus, g_star = cum, g
    if surplus <= 0:
        return n_b + n_h
    lengths = {p.length for p in profs}
    if len(lengths) == 1:
        counts = sorted(k for k in (p.below(g_star) for p in profs) if k)
        needed = -(-surplus // profs[0].length)
        if len(counts) < needed:
            return INFEASIBLE
        return n_b + n_h + sum(counts[:needed])
    items = []
    for p in profs:
        k = p.below(g_star)
        if k:
            items.append((k, p.length - (len(p.well_placed) - k)))
    try:
        return n_b + n_h + _cover(tuple(sorted(items)), surplus)
    except NoFeasibleGX:
        return INFEASIBLE
