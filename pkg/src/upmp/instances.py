"""Random instance generation and the instance / solution text formats.

See ``docs/FORMAT.md`` for the grammar of both files.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .fixing import fix_access
from .lanes import Fixing, hole_count, run_from_boundary
from .model import AccessVariant, Bay, Coord, Dims, Direction, Move, validate_bay

INSTANCE_HEADER = "upmp-instance v1"
SOLUTION_HEADER = "upmp-solution v1"
GENERATOR = "upmp-gen 1"
SUFFIX = ".upmp"


class UnplaceableError(RuntimeError):
    def __init__(self, placed: int, target: int):
        super().__init__(f"no feasible slot left after {placed} of {target} loads")
        self.placed = placed
        self.target = target


class InstanceFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class GenParams:
    dims: Dims
    variant: AccessVariant
    fill: int  # percent of capacity
    groups: int = 5
    seed: int = 0
    count: int = 1

    def __post_init__(self) -> None:
        if not 0 < self.fill <= 100:
            raise ValueError(f"fill must be in (0, 100], got {self.fill}")
        if self.groups < 1 or self.count < 0:
            raise ValueError("groups must be positive and count non-negative")

    @property
    def target(self) -> int:
        exact = Decimal(self.dims.capacity) * Decimal(self.fill) / Decimal(100)
        return int(exact.quantize(Decimal(1), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class Provenance:
    seed: Optional[int] = None
    index: Optional[int] = None
    fill: Optional[int] = None
    generator: Optional[str] = None


@dataclass(frozen=True)
class Instance:
    bay: Bay
    provenance: Provenance = field(default_factory=Provenance)

    @property
    def fill(self) -> int:
        if self.provenance.fill is not None:
            return self.provenance.fill
        return round(100 * self.bay.n_loads / self.bay.dims.capacity)


def instance_rng(seed: int, index: int) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{index}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _accessible(bay: Bay, stack, allowed) -> bool:
    """Some allowed boundary reaches ``stack`` through empty stacks only."""
    dims = bay.dims
    i, j = stack
    for d in allowed:
        vertical = d in (Direction.NORTH, Direction.SOUTH)
        line, depth = (i, dims.rows) if vertical else (j, dims.columns)
        run = run_from_boundary(dims, d, line, depth)
        front = run[: run.index(stack)]
        if all(bay.height(*s) == 0 for s in front):
            return True
    return False


def _keeps_fixing(bay: Bay, fixing: Fixing, slot: Coord) -> bool:
    # only the lane holding the new load can gain a hole
    for lane in fixing.lanes:
        if slot[:2] in lane.stacks:
            return hole_count(tuple(bay[c] for c in lane.slots(bay.dims.tiers))) == 0
    raise KeyError(slot)


def _hole_free_fixing(bay: Bay) -> Optional[Fixing]:
    sol = fix_access(bay, hole_count)
    return sol.fixing if sol.objective == 0 else None


def generate_one(params: GenParams, index: int) -> Bay:
    rng = instance_rng(params.seed, index)
    dims, allowed = params.dims, params.variant.allowed
    bay = Bay.empty(dims, params.variant, params.groups)
    fixing = _hole_free_fixing(bay)
    target = params.target
    while bay.n_loads < target:
        candidates = [(i, j, bay.height(i, j) + 1) for i, j in bay.stacks()
                      if bay.height(i, j) < dims.tiers]
        rng.shuffle(candidates)
        group = rng.randint(1, params.groups)
        for slot in candidates:
            if not _accessible(bay, slot[:2], allowed):
                continue
            trial = bay.replace([(slot, group)])
            if _keeps_fixing(trial, fixing, slot):
                bay = trial
                break
            if len(allowed) == 1:
                continue  # the fixing is forced
            other = _hole_free_fixing(trial)
            if other is not None:
                bay, fixing = trial, other
                break
        else:
            raise UnplaceableError(bay.n_loads, target)
    return bay


def generate(params: GenParams) -> List[Bay]:
    """``params.count`` bays; loads land uniformly on the currently feasible slots."""
    return [generate_one(params, k) for k in range(params.count)]


def generated_instances(params: GenParams) -> List[Instance]:
    return [Instance(bay, Provenance(params.seed, k, params.fill, GENERATOR))
            for k, bay in enumerate(generate(params))]


def instance_name(params: GenParams, index: int) -> str:
    return f"{params.dims.label}_{params.variant.name}_{params.fill}_{index:03d}{SUFFIX}"


# ---------------------------------------------------------------- text format

def dumps(inst: Instance) -> str:
    bay, prov = inst.bay, inst.provenance
    lines = [
        INSTANCE_HEADER,
        f"dims {bay.dims.columns} {bay.dims.rows} {bay.dims.tiers}",
        f"variant {','.join(d.value for d in bay.variant.ordered)}",
        f"groups {bay.groups}",
    ]
    if prov.generator is not None:
        lines.append(f"generator {prov.generator}")
    for key in ("seed", "index", "fill"):
        value = getattr(prov, key)
        if value is not None:
            lines.append(f"{key} {value}")
    cells = [(c, bay[c]) for c in bay.coords() if bay[c]]
    lines.append(f"cells {len(cells)}")
    lines.extend(f"{i} {j} {t} {g}" for (i, j, t), g in cells)
    lines.append("end")
    return "\n".join(lines) + "\n"


def _ints(text: str, n: int, lineno: int, what: str) -> Tuple[int, ...]:
    parts = text.split()
    if len(parts) != n:
        raise InstanceFormatError(lineno, f"{what}: expected {n} integers, got {text!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise InstanceFormatError(lineno, f"{what}: expected integers, got {text!r}") from None


def loads(text: str) -> Instance:
    lines = text.splitlines()
    if not lines or lines[0].strip() != INSTANCE_HEADER:
        raise InstanceFormatError(1, f"expected header {INSTANCE_HEADER!r}")
    fields: Dict[str, Tuple[int, str]] = {}
    n = 1
    while n < len(lines):
        raw = lines[n].strip()
        n += 1
        if not raw or raw.startswith("#"):
            continue
        key, _, rest = raw.partition(" ")
        if key in fields:
            raise InstanceFormatError(n, f"duplicate field {key!r}")
        fields[key] = (n, rest.strip())
        if key == "cells":
            break
    for key in ("dims", "variant", "groups", "cells"):
        if key not in fields:
            raise InstanceFormatError(n, f"missing field {key!r}")
    unknown = set(fields) - {"dims", "variant", "groups", "cells", "generator", "seed", "index", "fill"}
    if unknown:
        key = min(unknown, key=lambda k: fields[k][0])
        raise InstanceFormatError(fields[key][0], f"unknown field {key!r}")

    line, rest = fields["dims"]
    values = _ints(rest, 3, line, "dims")
    try:
        dims = Dims(*values)
    except ValueError as exc:
        raise InstanceFormatError(line, f"dims: {exc}") from None
    line, rest = fields["variant"]
    try:
        variant = AccessVariant.parse(rest)
    except ValueError as exc:
        raise InstanceFormatError(line, f"variant: {exc}") from None
    (groups,) = _ints(fields["groups"][1], 1, fields["groups"][0], "groups")
    if groups < 1:
        raise InstanceFormatError(fields["groups"][0], "groups must be positive")
    prov = {}
    for key in ("seed", "index", "fill"):
        if key in fields:
            prov[key] = _ints(fields[key][1], 1, fields[key][0], key)[0]
    if "generator" in fields:
        prov["generator"] = fields["generator"][1]

    line, rest = fields["cells"]
    (count,) = _ints(rest, 1, line, "cells")
    cells = [0] * dims.capacity
    origin: Dict[Coord, int] = {}
    bay = Bay.empty(dims, variant, groups)
    for _ in range(count):
        while n < len(lines) and not lines[n].strip():
            n += 1
        if n >= len(lines):
            raise InstanceFormatError(n, f"expected {count} cell lines")
        i, j, t, g = _ints(lines[n], 4, n + 1, "cell")
        try:
            idx = bay.index(i, j, t)
        except IndexError as exc:
            raise InstanceFormatError(n + 1, f"cell: {exc}") from None
        if (i, j, t) in origin:
            raise InstanceFormatError(n + 1, f"cell {(i, j, t)} listed twice")
        origin[(i, j, t)] = n + 1
        cells[idx] = g
        n += 1
    while n < len(lines) and not lines[n].strip():
        n += 1
    if n >= len(lines) or lines[n].strip() != "end":
        raise InstanceFormatError(n + 1, "expected 'end'")
    bay = Bay(dims, tuple(cells), variant, groups)
    problem = validate_bay(bay)
    if problem:
        where = _problem_line(problem, origin)
        raise InstanceFormatError(where, problem)
    return Instance(bay, Provenance(**prov))


def _problem_line(problem: str, origin: Dict[Coord, int]) -> int:
    for coord, line in origin.items():
        if str(coord) in problem:
            return line
    return 0


def save(inst: Instance, path) -> Path:
    path = Path(path)
    path.write_text(dumps(inst))
    return path


def load(path) -> Instance:
    return loads(Path(path).read_text())


def instance_hash(inst: Instance) -> str:
    return hashlib.sha256(dumps(inst).encode()).hexdigest()


# ---------------------------------------------------------------- solutions

@dataclass(frozen=True)
class SolutionRecord:
    instance_hash: str
    outcome: str
    moves: Tuple[Move, ...]
    nodes: int
    runtime: Optional[float]
    fixing: Fixing

    def dumps(self) -> str:
        lines = [
            SOLUTION_HEADER,
            f"instance sha256:{self.instance_hash}",
            f"outcome {self.outcome}",
            f"moves {len(self.moves) if self.outcome == 'solved' else '-'}",
            f"nodes {self.nodes}",
            f"runtime {'-' if self.runtime is None else f'{self.runtime:.6f}'}",
        ]
        for lane in self.fixing.lanes:
            stacks = " ".join(f"{i},{j}" for i, j in lane.stacks)
            lines.append(f"lane {lane.direction.value} {stacks}")
        lines.extend(str(m) for m in self.moves)
        lines.append("end")
        return "\n".join(lines) + "\n"


def parse_move(text: str, bay: Bay) -> Move:
    """Parse ``i j t -> i j t``; the group is read from ``bay``."""
    left, sep, right = text.partition("->")
    if not sep:
        raise ValueError(f"not a move: {text!r}")
    src = tuple(int(p) for p in left.split())
    dst = tuple(int(p) for p in right.split())
    if len(src) != 3 or len(dst) != 3:
        raise ValueError(f"not a move: {text!r}")
    return Move(src, dst, bay[src])


def read_solution_moves(text: str, bay: Bay) -> List[Move]:
    from .model import apply_move

    moves = []
    for raw in text.splitlines():
        if "->" in raw:
            m = parse_move(raw, bay)
            moves.append(m)
            bay = apply_move(bay, m)
    return moves


def find_instances(root) -> List[Path]:
    root = Path(root)
    if root.is_file():
        return [root]
    return sorted(root.rglob(f"*{SUFFIX}"))
