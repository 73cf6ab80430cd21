"""Instance files, seeded batches of independent runs, and summary statistics."""

from __future__ import annotations

import csv
import json
import logging
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .model import HPSequence, SequenceError, convert_aa_to_hp, parse_sequence
from .search import SearchParams, TraceRecord, lws_run

log = logging.getLogger(__name__)

STATS_FIELDS = ["instance", "E_l", "best", "avg", "success_rate", "R.I."]
RUN_FIELDS = ["instance", "seed", "best_energy", "iterations", "wall_time_s", "error"]
TRACE_FIELDS = ["iteration", "elapsed_ms", "current_energy", "best_energy"]


class ParseError(ValueError):
    def __init__(self, path, line: int, message: str) -> None:
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class DuplicateName(ValueError):
    pass


class UndefinedBound(ValueError):
    pass


class DegenerateDenominator(ZeroDivisionError):
    pass


@dataclass
class Instance:
    name: str
    sequence: HPSequence
    lower_bound: int | None = None
    bound_note: str = ""  # '*' (bound did not converge) or '?' (unknown), kept verbatim
    references: dict[str, float] = field(default_factory=dict)
    source_note: str = ""


_ATTR = re.compile(r"\[\s*([^=\]\s]+)\s*=\s*([^\]]*?)\s*\]")
_BOUND = re.compile(r"^(-?\d+)\s*([*?]?)$")


def _parse_header(path, lineno: int, text: str) -> tuple[str, dict[str, str]]:
    body = text[1:].strip()
    attrs = {k: v for k, v in _ATTR.findall(body)}
    name = _ATTR.sub("", body).strip()
    if not name or len(name.split()) != 1:
        raise ParseError(path, lineno, f"bad header {text!r}")
    return name, attrs


def load_instances(path: str | Path, convert: bool = False, table: Mapping[str, str] | None = None) -> list[Instance]:
    """Read a FASTA-like instance file.

    Headers look like ``>H1 [El=-69]``; further ``[ref:NAME=<energy>]``
    attributes record reference energies for relative improvement.
    Lines starting with ``#`` or ``;`` are comments.
    """
    path = Path(path)
    records: list[tuple[int, str, dict[str, str], list[tuple[int, str]]]] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith(">"):
            name, attrs = _parse_header(path, lineno, line)
            records.append((lineno, name, attrs, []))
        elif not records:
            raise ParseError(path, lineno, "sequence data before the first header")
        else:
            records[-1][3].append((lineno, line))

    instances: list[Instance] = []
    seen: set[str] = set()
    for lineno, name, attrs, body in records:
        if name in seen:
            raise DuplicateName(f"{path}:{lineno}: duplicate instance name {name!r}")
        seen.add(name)
        text = "".join(part for _, part in body)
        try:
            seq = convert_aa_to_hp(text, table) if convert else parse_sequence(text)
        except SequenceError as exc:
            raise ParseError(path, body[0][0] if body else lineno, str(exc)) from exc
        bound, note = None, ""
        if "El" in attrs:
            value = attrs["El"]
            if value == "?":
                note = "?"
            else:
                m = _BOUND.match(value)
                if m is None:
                    raise ParseError(path, lineno, f"bad El value {value!r}")
                bound, note = int(m.group(1)), m.group(2)
                if bound > 0:
                    raise ParseError(path, lineno, "El must be <= 0")
        refs = {}
        for key, value in attrs.items():
            if key.startswith("ref:"):
                try:
                    refs[key[4:]] = float(value)
                except ValueError:
                    raise ParseError(path, lineno, f"bad reference value {value!r}") from None
        instances.append(Instance(name, seq, bound, note, refs, attrs.get("source", "")))
    return instances


# --- runs ---------------------------------------------------------------

@dataclass
class RunRecord:
    instance: str
    seed: int
    best_energy: int | None
    wall_time_s: float
    iterations: int
    trace: list[TraceRecord] = field(default_factory=list)
    positions: list[tuple[int, int, int]] = field(default_factory=list)
    error: str = ""

    @property
    def failed(self) -> bool:
        return bool(self.error)


def _one_run(job: tuple[Instance, SearchParams]) -> RunRecord:
    inst, params = job
    t0 = time.perf_counter()
    try:
        result = lws_run(inst.sequence, params)
    except Exception as exc:  # a failed run is data, not a reason to stop the batch
        log.warning("run %s/seed %d failed: %s", inst.name, params.rng_seed, exc)
        return RunRecord(inst.name, params.rng_seed, None, time.perf_counter() - t0, 0, error=f"{type(exc).__name__}: {exc}")
    return RunRecord(
        inst.name,
        params.rng_seed,
        result.best_energy,
        time.perf_counter() - t0,
        result.iterations,
        result.trace,
        list(result.best_conformation.positions),
    )


def run_batch(
    instances: Sequence[Instance],
    params: SearchParams,
    runs_per_instance: int,
    parallelism: int = 1,
    seed_base: int | None = None,
) -> list[RunRecord]:
    """Independent runs; run ``r`` of every instance uses seed ``seed_base + r``."""
    if runs_per_instance < 1:
        raise ValueError("runs_per_instance must be at least 1")
    base = params.rng_seed if seed_base is None else seed_base
    jobs = [(inst, replace(params, rng_seed=base + r)) for inst in instances for r in range(runs_per_instance)]
    if parallelism <= 1 or len(jobs) <= 1:
        return [_one_run(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(_one_run, jobs))


# --- statistics ---------------------------------------------------------

def relative_improvement(e_o, e_r, e_l) -> float:
    """Progress of ``e_o`` over ``e_r`` towards the bound ``e_l``, in percent."""
    if e_l is None:
        raise UndefinedBound("no lower bound available")
    e_o, e_r, e_l = Fraction(e_o), Fraction(e_r), Fraction(e_l)
    if e_l == e_r:
        raise DegenerateDenominator("lower bound equals the reference energy")
    return float((e_o - e_r) / (e_l - e_r) * 100)


def success_rate(records: Iterable, target_energy: int) -> float:
    """Percentage of runs whose best energy is at or below ``target_energy``.

    ``records`` may hold RunRecords or plain best energies.
    """
    energies = [getattr(r, "best_energy", r) for r in records]
    if not energies:
        raise ValueError("success rate of an empty batch")
    hits = sum(1 for e in energies if e is not None and e <= target_energy)
    return 100.0 * hits / len(energies)


@dataclass
class AggregateStats:
    instance: str
    E_l: int | None
    best: int | None
    avg: float | None
    success_rate: float | None
    relative_improvement: float | None = None
    reference: str | None = None
    runs: int = 0


def aggregate(
    instances: Sequence[Instance],
    records: Sequence[RunRecord],
    reference: str | None = None,
) -> list[AggregateStats]:
    out = []
    for inst in instances:
        mine = [r for r in records if r.instance == inst.name and not r.failed]
        best = min((r.best_energy for r in mine), default=None)
        avg = sum(r.best_energy for r in mine) / len(mine) if mine else None
        rate = success_rate(mine, inst.lower_bound) if mine and inst.lower_bound is not None else None
        ri = None
        if reference is not None and avg is not None and reference in inst.references:
            try:
                ri = relative_improvement(Fraction(avg), inst.references[reference], inst.lower_bound)
            except (UndefinedBound, DegenerateDenominator):
                ri = None
        out.append(AggregateStats(inst.name, inst.lower_bound, best, avg, rate, ri, reference, len(mine)))
    return out


def _fmt(value, spec: str) -> str:
    return "" if value is None else format(value, spec)


def stats_rows(stats: Sequence[AggregateStats]) -> list[dict[str, str]]:
    return [
        {
            "instance": s.instance,
            "E_l": _fmt(s.E_l, "d"),
            "best": _fmt(s.best, "d"),
            "avg": _fmt(s.avg, ".3f"),
            "success_rate": _fmt(s.success_rate, ".1f"),
            "R.I.": _fmt(s.relative_improvement, ".2f"),
        }
        for s in stats
    ]


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", name)


def export_results(
    records: Sequence[RunRecord],
    stats: Sequence[AggregateStats],
    out_dir: str | Path,
    fmt: str = "csv",
) -> list[Path]:
    """Write the stats table, the per-run table and one trace CSV per run."""
    fmt = fmt.lower()
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    out = Path(out_dir)
    (out / "traces").mkdir(parents=True, exist_ok=True)
    written = []

    if fmt == "csv":
        p = out / "stats.csv"
        with p.open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=STATS_FIELDS, lineterminator="\n")
            w.writeheader()
            w.writerows(stats_rows(stats))
        written.append(p)
        p = out / "runs.csv"
        with p.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(RUN_FIELDS)
            for r in records:
                w.writerow([r.instance, r.seed, _fmt(r.best_energy, "d"), r.iterations, f"{r.wall_time_s:.3f}", r.error])
        written.append(p)
    else:
        p = out / "stats.json"
        p.write_text(json.dumps([asdict(s) for s in stats], indent=2) + "\n")
        written.append(p)
        p = out / "runs.json"
        rows = [{k: getattr(r, k) for k in RUN_FIELDS} for r in records]
        p.write_text(json.dumps(rows, indent=2) + "\n")
        written.append(p)

    for r in records:
        p = out / "traces" / f"{_safe(r.instance)}__seed{r.seed}.csv"
        with p.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRACE_FIELDS)
            for t in r.trace:
                w.writerow([t.iteration, f"{t.elapsed_ms:.3f}", t.current_energy, t.best_energy])
        written.append(p)
    return written


def read_stats_json(path: str | Path) -> list[AggregateStats]:
    return [AggregateStats(**row) for row in json.loads(Path(path).read_text())]


def format_table(instances: Sequence[Instance], stats: Sequence[AggregateStats]) -> str:
    """Plain-text summary laid out like the usual results table."""
    lengths = {i.name: i.sequence.n for i in instances}
    ref = next((s.reference for s in stats if s.reference), None)
    head = ["Seq", "Len", "E_l", "best", "avg", "succ%"] + ([f"R.I.% vs {ref}"] if ref else [])
    rows = [head]
    for s in stats:
        bound = "-" if s.E_l is None else str(s.E_l)
        row = [s.instance, str(lengths.get(s.instance, "")), bound,
               _fmt(s.best, "d") or "-", _fmt(s.avg, ".1f") or "-", _fmt(s.success_rate, ".0f") or "-"]
        if ref:
            row.append(_fmt(s.relative_improvement, ".2f") or "-")
        rows.append(row)
    widths = [max(len(r[c]) for r in rows) for c in range(len(head))]
    return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in rows)
