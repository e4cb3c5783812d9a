"""Command-line entry point: ``upmp solve|generate|bench|oracle``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench
from .fixing import fix_access
from .instances import (GenParams, InstanceFormatError, UnplaceableError,
                        generated_instances, instance_name, load, save)
from .model import AccessVariant, Dims
from .oracle import CapExceeded, oracle_solve
from .search import INFEASIBLE, SOLVED

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_TIMEOUT = 0, 1, 2, 3
_EXIT = {SOLVED: EXIT_OK, INFEASIBLE: EXIT_INFEASIBLE}


def cmd_solve(args) -> int:
    inst = load(args.file)
    trace = sys.stderr if args.trace else None
    out, fixing = bench.solve_bay(inst.bay, args.timeout, args.cap, trace=trace)
    record = bench.solution_record(inst, out, fixing, timing=not args.no_timing)
    target = Path(args.out) if args.out else Path(args.file).with_suffix(".sol")
    target.write_text(record.dumps())
    moves = "-" if out.n_moves is None else out.n_moves
    print(f"{out.status} moves={moves} nodes={out.nodes} root_h={out.root_h} -> {target}")
    return _EXIT.get(out.status, EXIT_TIMEOUT)


def cmd_generate(args) -> int:
    params = GenParams(Dims.parse(args.dims), AccessVariant.parse(args.variant),
                       args.fill, args.groups, args.seed, args.count)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for k, inst in enumerate(generated_instances(params)):
        save(inst, out / instance_name(params, k))
    print(f"wrote {params.count} instances to {out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    csv_path = Path(args.csv)
    gap_path = Path(args.gap_csv) if args.gap_csv else csv_path.with_name(csv_path.stem + "_rootgap.csv")
    log_path = Path(args.log) if args.log else csv_path.with_suffix(".jsonl")
    with open(log_path, "w") as log:
        results = bench.run_bench(args.dir, args.timeout, args.jobs, args.cap, log)
    bench.write_csv(bench.aggregate(results), csv_path, timing=not args.no_timing)
    bench.write_gap_csv(bench.root_gaps(results), gap_path)
    bad = bench.admissibility_violations(results)
    for r in bad:
        print(f"warning: negative root gap on {r.path}", file=sys.stderr)
    print(f"{len(results)} instances -> {csv_path}")
    return EXIT_OK if not bad else EXIT_ERROR


def cmd_oracle(args) -> int:
    inst = load(args.file)
    fixing = fix_access(inst.bay).fixing
    try:
        res = oracle_solve(inst.bay, fixing, args.cap)
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}")
        return EXIT_TIMEOUT
    if res.infeasible:
        print(f"infeasible states={res.states}")
        return EXIT_INFEASIBLE
    print(f"optimum {res.optimum} states={res.states}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="upmp", description="Unit-load pre-marshalling solver")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one instance file")
    s.add_argument("file")
    s.add_argument("--timeout", type=float, default=None, help="wall-clock seconds")
    s.add_argument("--cap", type=int, default=None, help="node cap (reported as timeout)")
    s.add_argument("--trace", action="store_true", help="print one line per expansion to stderr")
    s.add_argument("--out", help="solution path (default: instance path with .sol)")
    s.add_argument("--no-timing", action="store_true", help="write '-' for the runtime")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("generate", help="generate random instances")
    g.add_argument("--dims", default="3x3x1")
    g.add_argument("--variant", default="single")
    g.add_argument("--fill", type=int, default=40, help="percent of capacity")
    g.add_argument("--groups", type=int, default=5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=10)
    g.add_argument("--out", default="instances")
    g.set_defaults(func=cmd_generate)

    b = sub.add_parser("bench", help="solve every instance in a directory")
    b.add_argument("dir")
    b.add_argument("--timeout", type=float, default=60.0)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--cap", type=int, default=None)
    b.add_argument("--csv", default="bench.csv")
    b.add_argument("--gap-csv", default=None)
    b.add_argument("--log", default=None, help="JSON lines per instance (default: next to the CSV)")
    b.add_argument("--no-timing", action="store_true", help="write '-' for mean runtime")
    b.set_defaults(func=cmd_bench)

    o = sub.add_parser("oracle", help="breadth-first optimum for a small instance")
    o.add_argument("file")
    o.add_argument("--cap", type=int, default=2_000_000)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, InstanceFormatError, UnplaceableError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
