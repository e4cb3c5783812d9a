"""Breadth-first verification oracle.

Works on bay cells directly and re-derives access order, move rules and the
blocking test from their definitions instead of reusing the search code, so
agreement between the two is meaningful.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .lanes import Fixing
from .model import Bay, Coord

Cells = Tuple[int, ...]


class CapExceeded(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"state count exceeded cap {cap}")
        self.cap = cap


@dataclass(frozen=True)
class OracleResult:
    optimum: Optional[int]  # None when no goal is reachable
    states: int

    @property
    def infeasible(self) -> bool:
        return self.optimum is None


def _access_orders(bay: Bay, fixing: Fixing) -> List[List[int]]:
    # flat cell indices per lane, first reachable slot first
    T, J = bay.dims.tiers, bay.dims.rows
    orders = []
    for lane in fixing.lanes:
        order = []
        for i, j in lane.stacks:
            base = ((i - 1) * J + (j - 1)) * T
            order.extend(base + t for t in range(T - 1, -1, -1))
        orders.append(order)
    return orders


def _sorted(cells: Cells, orders: List[List[int]]) -> bool:
    for order in orders:
        loads = [cells[k] for k in order if cells[k]]
        # no load may have a strictly smaller one behind it
        for a in range(len(loads)):
            if any(loads[b] < loads[a] for b in range(a + 1, len(loads))):
                return False
    return True


def _successors(cells: Cells, orders: List[List[int]]):
    fronts = []
    for order in orders:
        pos = next((p for p, k in enumerate(order) if cells[k]), len(order))
        fronts.append(pos)
    for a, order_a in enumerate(orders):
        if fronts[a] == len(order_a):
            continue
        src = order_a[fronts[a]]
        for b, order_b in enumerate(orders):
            if b == a or fronts[b] == 0:
                continue
            dst = order_b[fronts[b] - 1]
            nxt = list(cells)
            nxt[dst], nxt[src] = nxt[src], 0
            yield tuple(nxt)


def oracle_solve(bay: Bay, fixing: Fixing, cap: int = 2_000_000) -> OracleResult:
    """Exact optimum by exhaustive breadth-first search, or infeasibility."""
    orders = _access_orders(bay, fixing)
    start = bay.cells
    depth: Dict[Cells, int] = {start: 0}
    queue = deque([start])
    while queue:
        cells = queue.popleft()
        if _sorted(cells, orders):
            return OracleResult(depth[cells], len(depth))
        d = depth[cells] + 1
        for nxt in _successors(cells, orders):
            if nxt not in depth:
                depth[nxt] = d
                if len(depth) > cap:
                    raise CapExceeded(cap)
                queue.append(nxt)
    return OracleResult(None, len(depth))


def goal_cells(bay: Bay, fixing: Fixing) -> bool:
    return _sorted(bay.cells, _access_orders(bay, fixing))


def slot_coord(bay: Bay, flat: int) -> Coord:
    T, J = bay.dims.tiers, bay.dims.rows
    rest, t = divmod(flat, T)
    i, j = divmod(rest, J)
    return (i + 1, j + 1, t + 1)
