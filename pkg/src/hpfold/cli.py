"""Command-line entry point: ``hpfold {solve,bench,enumerate,convert}``.

Exit status: 0 success, 1 runtime failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import re
import sys
from fractions import Fraction
from pathlib import Path

from .bench import (
    DuplicateName,
    ParseError,
    aggregate,
    export_results,
    format_table,
    load_instances,
    run_batch,
)
from .heuristics import HeuristicKind
from .model import SequenceError, convert_aa_to_hp, load_hp_table, parse_sequence, validate
from .oracle import TooLong, enumerate_optimal
from .search import SearchParams, lws_run

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("hpfold")


class UsageError(Exception):
    pass


def parse_duration(text: str) -> float:
    """'90', '90s', '10m', '1.5h' -> seconds."""
    m = re.fullmatch(r"\s*(\d+(?:\.\d+)?)\s*([smh]?)\s*", text)
    if m is None:
        raise argparse.ArgumentTypeError(f"bad duration {text!r}")
    scale = {"": 1, "s": 1, "m": 60, "h": 3600}[m.group(2)]
    return float(m.group(1)) * scale


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("search parameters")
    g.add_argument("--segment-size", type=_positive_int, default=1,
                   help="initial segment size (default: 1)")
    g.add_argument("--max-stable", type=_positive_int, default=1000,
                   help="initial stagnation window in steps (default: 1000)")
    g.add_argument("--factor", type=Fraction, default=Fraction(6, 5),
                   help="stagnation window growth factor (default: 1.2)")
    g.add_argument("--tenure-min", type=_positive_int, default=4,
                   help="lower end of the tabu tenure range (default: tenure [4, n/8])")
    g.add_argument("--tenure-divisor", type=_positive_int, default=8,
                   help="upper end of the tenure range is n divided by this (default: 8)")
    g.add_argument("--max-single-segment", type=_positive_int, default=6,
                   help="cap on contiguous segment length (default: 6)")
    g.add_argument("--max-multi-segment", type=_positive_int, default=12,
                   help="cap on scattered sub-segments per move, also limited to n/4 (default: 12)")
    g.add_argument("--sub-segment", type=_positive_int, default=1,
                   help="length of each scattered sub-segment (default: 1)")
    g.add_argument("--max-iters", type=int, default=None,
                   help="iteration budget (default: 100000, unlimited when --budget is given)")
    g.add_argument("--budget", type=parse_duration, default=None,
                   help="wall-clock budget per run, e.g. 60s or 10m (default: none)")
    g.add_argument("--pin-heuristic", default=None,
                   help="use only one heuristic: h1, h2 or h3 (default: random mix)")
    g.add_argument("--target-energy", type=int, default=None,
                   help="stop once this energy is reached (default: none)")
    g.add_argument("--warmup", type=int, default=0,
                   help="greedy single-residue iterations before the search (default: 0)")
    g.add_argument("--debug", action="store_true",
                   help="validate the conformation after every move")


def _params(args, seed: int) -> SearchParams:
    max_iters = args.max_iters
    if max_iters is None:
        max_iters = sys.maxsize if args.budget is not None else 100_000
    if max_iters < 0:
        raise UsageError("--max-iters must be non-negative")
    pinned = HeuristicKind.parse(args.pin_heuristic) if args.pin_heuristic else None
    return SearchParams(
        initial_segment_size=args.segment_size,
        initial_max_stable=args.max_stable,
        stable_factor=args.factor,
        tenure_min=args.tenure_min,
        tenure_max_divisor=args.tenure_divisor,
        max_single_segment_size=args.max_single_segment,
        max_multi_segment_size=args.max_multi_segment,
        sub_segment_size=args.sub_segment,
        max_iterations=max_iters,
        wall_clock_budget=args.budget,
        rng_seed=seed,
        pin_heuristic=pinned,
        target_energy=args.target_energy,
        warmup_iterations=args.warmup,
        debug=args.debug,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hpfold",
        description="Segment-based hybrid local search for HP folding on the FCC lattice.",
        epilog="Defaults: segment size 1, max stable 1000, factor 1.2, tabu tenure [4, n/8].",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="fold one sequence")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--seq", help="H/P string")
    src.add_argument("--instances", type=Path, help="instance file")
    p.add_argument("--name", help="instance to pick from --instances")
    p.add_argument("--convert", action="store_true", help="input is amino-acid text")
    p.add_argument("--table", type=Path, help="residue classification table")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", type=Path, help="also write <name>.conf and <name>_trace.csv here")
    _add_search_flags(p)

    p = sub.add_parser("bench", help="repeated seeded runs over an instance file")
    p.add_argument("--instances", type=Path, required=True)
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--seed-base", "--seed", dest="seed_base", type=int, default=0)
    p.add_argument("--out-dir", type=Path, default=Path("bench_out"))
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--reference", help="reference column (ref:NAME in headers) for R.I.")
    p.add_argument("--convert", action="store_true")
    p.add_argument("--table", type=Path)
    _add_search_flags(p)

    p = sub.add_parser("enumerate", help="exact optimum of a short chain by enumeration")
    p.add_argument("--seq", required=True)
    p.add_argument("--no-symmetry", action="store_true", help="disable symmetry reduction")

    p = sub.add_parser("convert", help="amino-acid FASTA to HP FASTA")
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--output", type=Path)
    p.add_argument("--table", type=Path)
    return parser


def _write_conformation(fh, seq: str, positions) -> None:
    fh.write(seq + "\n")
    for x, y, z in positions:
        fh.write(f"{x} {y} {z}\n")


def cmd_solve(args) -> int:
    table = load_hp_table(args.table) if args.table else None
    if args.seq is not None:
        name = "seq"
        seq = convert_aa_to_hp(args.seq, table) if args.convert else parse_sequence(args.seq)
    else:
        instances = load_instances(args.instances, convert=args.convert, table=table)
        if args.name:
            picked = [i for i in instances if i.name == args.name]
            if not picked:
                raise UsageError(f"no instance named {args.name!r}")
        elif len(instances) == 1:
            picked = instances
        else:
            raise UsageError("file holds several instances; pick one with --name")
        name, seq = picked[0].name, picked[0].sequence
    params = _params(args, args.seed)
    result = lws_run(seq, params)
    if validate(result.best_conformation):
        log.error("best conformation failed validation")
        return EXIT_RUNTIME
    print(f"energy: {result.best_energy}")
    print(f"iterations: {result.iterations}")
    _write_conformation(sys.stdout, str(seq), result.best_conformation.positions)
    if args.out_dir:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        with (args.out_dir / f"{name}.conf").open("w") as fh:
            _write_conformation(fh, str(seq), result.best_conformation.positions)
        with (args.out_dir / f"{name}_trace.csv").open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration", "elapsed_ms", "current_energy", "best_energy"])
            for t in result.trace:
                w.writerow([t.iteration, f"{t.elapsed_ms:.3f}", t.current_energy, t.best_energy])
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.runs < 1:
        raise UsageError("--runs must be at least 1")
    if args.parallel < 1:
        raise UsageError("--parallel must be at least 1")
    table = load_hp_table(args.table) if args.table else None
    instances = load_instances(args.instances, convert=args.convert, table=table)
    params = _params(args, args.seed_base)
    records = run_batch(instances, params, args.runs, args.parallel, args.seed_base)
    stats = aggregate(instances, records, args.reference)
    export_results(records, stats, args.out_dir, args.format)
    print(format_table(instances, stats))
    failed = sum(r.failed for r in records)
    if failed:
        log.warning("%d of %d runs failed", failed, len(records))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    seq = parse_sequence(args.seq)
    res = enumerate_optimal(seq, symmetry_reduction=not args.no_symmetry)
    print(f"optimal energy: {res.optimal_energy}")
    print(f"optimizers: {res.optimizer_count}")
    print(f"enumerated: {res.enumerated}")
    return EXIT_OK


def cmd_convert(args) -> int:
    table = load_hp_table(args.table)
    out_lines: list[str] = []
    body: list[str] = []

    def flush() -> None:
        if body:
            out_lines.append(str(convert_aa_to_hp("".join(body), table)))
            body.clear()

    for line in args.input.read_text().splitlines():
        s = line.strip()
        if not s or s[0] in "#;":
            continue
        if s.startswith(">"):
            flush()
            out_lines.append(s)
        else:
            body.append(s)
    flush()
    text = "".join(line + "\n" for line in out_lines)
    if args.output:
        args.output.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "bench": cmd_bench, "enumerate": cmd_enumerate, "convert": cmd_convert}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SequenceError, ParseError, DuplicateName, TooLong, ValueError, OSError) as exc:
        print(f"hpfold {args.command}: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        log.exception("runtime failure: %s", exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
