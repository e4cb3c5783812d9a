"""Solve pipeline and batch benchmarking."""

from __future__ import annotations

import csv
import io
import json
import math
import multiprocessing
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from statistics import mean
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .fixing import fix_access
from .instances import Instance, SolutionRecord, find_instances, instance_hash, load
from .lanes import Fixing
from .model import VARIANT_NAMES, Bay, apply_move
from .oracle import goal_cells
from .search import SOLVED, TIMEOUT, SearchOutcome, astar

CSV_COLUMNS = ["size", "variant", "fill", "solved", "infeasible", "timeout",
               "mean_moves", "mean_nodes", "mean_runtime_s"]
GAP_COLUMNS = ["variant", "tiers", "solved", "mean_root_gap_pct"]


def choose_fixing(bay: Bay) -> Fixing:
    """Forced for one direction, otherwise the cheapest access fixing."""
    return fix_access(bay).fixing


def solve_bay(bay: Bay, timeout: Optional[float] = None, node_cap: Optional[int] = None,
              trace=None) -> Tuple[SearchOutcome, Fixing]:
    start = time.perf_counter()
    fixing = choose_fixing(bay)
    remaining = None if timeout is None else max(0.0, timeout - (time.perf_counter() - start))
    out = astar(bay, fixing, timeout=remaining, node_cap=node_cap, trace=trace)
    out.runtime = time.perf_counter() - start
    if out.status == SOLVED:
        final = bay
        for m in out.moves:
            final = apply_move(final, m, fixing)
        if not goal_cells(final, fixing):
            raise RuntimeError("solution does not replay to a sorted bay")
    return out, fixing


def solution_record(inst: Instance, out: SearchOutcome, fixing: Fixing,
                    timing: bool = True) -> SolutionRecord:
    return SolutionRecord(instance_hash(inst), out.status, tuple(out.moves), out.nodes,
                          out.runtime if timing else None, fixing)


@dataclass(frozen=True)
class InstanceResult:
    path: str
    size: str
    variant: str
    fill: int
    tiers: int
    outcome: str
    moves: Optional[int]
    nodes: int
    runtime: float
    root_h: float
    root_gap: Optional[float]

    def to_json(self) -> str:
        data = asdict(self)
        if math.isinf(data["root_h"]):
            data["root_h"] = None
        return json.dumps(data, sort_keys=True)


def run_instance(path, timeout: Optional[float] = None,
                 node_cap: Optional[int] = None) -> InstanceResult:
    inst = load(path)
    bay = inst.bay
    out, _ = solve_bay(bay, timeout, node_cap)
    moves = out.n_moves
    gap = None
    if moves is not None:
        gap = 0.0 if moves == 0 else (moves - out.root_h) / moves
    return InstanceResult(str(path), bay.dims.label, bay.variant.name, inst.fill,
                          bay.dims.tiers, out.status, moves, out.nodes, out.runtime,
                          out.root_h, gap)


@dataclass(frozen=True)
class BenchRow:
    size: str
    variant: str
    fill: int
    solved: int
    infeasible: int
    timeout: int
    mean_moves: Optional[float]
    mean_nodes: Optional[float]
    mean_runtime_s: Optional[float]

    @property
    def total(self) -> int:
        return self.solved + self.infeasible + self.timeout

    def cells(self, timing: bool = True) -> List[str]:
        def fmt(x, digits):
            return "-" if x is None else f"{x:.{digits}f}"
        return [self.size, self.variant, str(self.fill), str(self.solved), str(self.infeasible),
                str(self.timeout), fmt(self.mean_moves, 2), fmt(self.mean_nodes, 1),
                fmt(self.mean_runtime_s if timing else None, 3)]


@dataclass(frozen=True)
class RootGapRow:
    variant: str
    tiers: int
    solved: int
    mean_root_gap_pct: Optional[float]


def _size_key(label: str):
    return tuple(int(x) for x in label.split("x"))


def _variant_key(name: str):
    return (VARIANT_NAMES.index(name), "") if name in VARIANT_NAMES else (len(VARIANT_NAMES), name)


def aggregate(results: Iterable[InstanceResult]) -> List[BenchRow]:
    groups: Dict[Tuple[str, str, int], List[InstanceResult]] = {}
    for r in results:
        groups.setdefault((r.size, r.variant, r.fill), []).append(r)
    rows = []
    for key in sorted(groups, key=lambda k: (_size_key(k[0]), _variant_key(k[1]), k[2])):
        rs = groups[key]
        solved = [r for r in rs if r.outcome == SOLVED]
        rows.append(BenchRow(
            *key,
            solved=len(solved),
            infeasible=sum(r.outcome == "infeasible" for r in rs),
            timeout=sum(r.outcome == TIMEOUT for r in rs),
            mean_moves=mean(r.moves for r in solved) if solved else None,
            mean_nodes=mean(r.nodes for r in solved) if solved else None,
            mean_runtime_s=mean(r.runtime for r in solved) if solved else None,
        ))
    return rows


def root_gaps(results: Iterable[InstanceResult]) -> List[RootGapRow]:
    groups: Dict[Tuple[str, int], List[float]] = {}
    for r in results:
        if r.root_gap is not None:
            groups.setdefault((r.variant, r.tiers), []).append(r.root_gap)
    return [RootGapRow(v, t, len(gs), 100 * mean(gs))
            for (v, t), gs in sorted(groups.items(), key=lambda kv: (_variant_key(kv[0][0]), kv[0][1]))]


def write_csv(rows: Sequence[BenchRow], path=None, timing: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow(row.cells(timing))
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def write_gap_csv(rows: Sequence[RootGapRow], path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(GAP_COLUMNS)
    for row in rows:
        pct = "-" if row.mean_root_gap_pct is None else f"{row.mean_root_gap_pct:.2f}"
        w.writerow([row.variant, row.tiers, row.solved, pct])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def _job(args):
    path, timeout, node_cap = args
    return run_instance(path, timeout, node_cap)


def run_bench(dataset, timeout: Optional[float] = None, jobs: int = 1,
              node_cap: Optional[int] = None, log=None) -> List[InstanceResult]:
    """Solve every instance under ``dataset``; results come back in path order.

    Each finished instance is appended to ``log`` (a text stream, JSON lines)
    right away, so an interrupted run keeps what it finished.
    """
    paths = find_instances(dataset)
    tasks = [(p, timeout, node_cap) for p in paths]
    results: List[InstanceResult] = []

    def collect(r: InstanceResult):
        results.append(r)
        if log is not None:
            log.write(r.to_json() + "\n")
            log.flush()

    try:
        if jobs > 1 and len(tasks) > 1:
            with multiprocessing.Pool(jobs) as pool:
                for r in pool.imap(_job, tasks):
                    collect(r)
        else:
            for t in tasks:
                collect(_job(t))
    except KeyboardInterrupt:
        pass
    return results


def admissibility_violations(results: Iterable[InstanceResult]) -> List[InstanceResult]:
    return [r for r in results if r.root_gap is not None and r.root_gap < 0]
