"""Segment selection and exhaustive segment-neighbourhood enumeration.

A segment is described as a list of *slots*. Each slot is one monomer to be
re-placed; its new point is ``anchor + BASIS[digit]`` where the anchor is
either a fixed lattice point or the point just materialised for the previous
slot. A slot may also carry a closure target: a fixed point its new position
must be able to reach in a given number of steps (1 means "must be adjacent").

The digits of all slots form the generator string, a base-12 counter whose
most significant digit is the first slot.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from .heuristics import Move
from .lattice import BASIS, Point, add, reachable_offsets, sub
from .model import Conformation

SELECTION_ATTEMPTS = 50


class SegmentKind(Enum):
    SINGLE = "single"
    MULTIPLE = "multiple"


@dataclass(frozen=True)
class SegmentSelection:
    kind: SegmentKind
    indices: tuple[int, ...]


@dataclass(frozen=True)
class Slot:
    monomer: int
    anchor: Point | None  # None: chain predecessor is the previous slot
    target: Point | None = None
    target_steps: int = 0


def select_segment_type(rng: random.Random) -> SegmentKind:
    return SegmentKind.SINGLE if rng.random() < 0.5 else SegmentKind.MULTIPLE


def single_window(center: int, size: int, n: int) -> tuple[int, ...]:
    """Contiguous window of ``size`` indices around ``center``, clamped to the chain."""
    start = center - size // 2
    start = max(0, min(start, n - size))
    return tuple(range(start, start + size))


def _sample_spaced(allowed: list[bool], k: int, rng: random.Random, block: int = 1) -> tuple[int, ...] | None:
    """Uniformly sample ``k`` runs of ``block`` allowed indices, any two runs at least one index apart.

    Returns the chosen indices in increasing order, or None if no such choice exists.
    """
    n = len(allowed)
    # fits[i]: a run may start at i
    fits = [i + block <= n and all(allowed[i:i + block]) for i in range(n)]
    step = block + 1
    # ways[i][j]: number of valid choices of j runs inside positions i..n-1
    ways = [[0] * (k + 1) for _ in range(n + step + 1)]
    for i in range(n + step + 1):
        ways[i][0] = 1
    for i in range(n - 1, -1, -1):
        row, nxt, jump = ways[i], ways[i + 1], ways[i + step]
        for j in range(1, k + 1):
            row[j] = nxt[j] + (jump[j - 1] if fits[i] else 0)
    if ways[0][k] == 0:
        return None
    out: list[int] = []
    i, j = 0, k
    while j > 0:
        take = ways[i + step][j - 1] if fits[i] else 0
        if rng.randrange(ways[i][j]) < take:
            out.extend(range(i, i + block))
            i += step
            j -= 1
        else:
            i += 1
    return tuple(out)


def select_segment_variables(
    n: int,
    size: int,
    kind: SegmentKind,
    is_tabu,
    rng: random.Random,
    sub_size: int = 1,
) -> SegmentSelection | None:
    """Pick the monomers to re-place, or None if no admissible selection was found.

    ``size`` is the effective number of positions for SINGLE and the number of
    sub-segments (each ``sub_size`` long) for MULTIPLE, already capped by the
    caller. ``is_tabu(i)`` reports whether monomer ``i`` is currently tabu.
    """
    if n < 2 or size < 1:
        return None
    if kind is SegmentKind.SINGLE:
        size = min(size, n - 1)
        for _ in range(SELECTION_ATTEMPTS):
            window = single_window(rng.randrange(n), size, n)
            if not any(is_tabu(i) for i in window):
                return SegmentSelection(kind, window)
        return None
    allowed = [not is_tabu(i) for i in range(n)]
    picked = _sample_spaced(allowed, size, rng, sub_size)
    if picked is None or len(picked) >= n:
        return None
    return SegmentSelection(kind, picked)


def _runs(indices: tuple[int, ...]) -> list[tuple[int, int]]:
    runs: list[tuple[int, int]] = []
    for i in sorted(indices):
        if runs and i == runs[-1][1] + 1:
            runs[-1] = (runs[-1][0], i)
        else:
            runs.append((i, i))
    return runs


def build_slots(conf: Conformation, selection: SegmentSelection) -> list[Slot]:
    """Slots for every maximal run of consecutive selected monomers, runs in index order.

    A run is grown from the fixed monomer before it and must close onto the
    fixed monomer after it; a run that starts at the chain head is grown
    backwards from the monomer that follows it.
    """
    pos = conf.positions
    n = len(pos)
    slots: list[Slot] = []
    for s, e in _runs(selection.indices):
        if s > 0:
            order = list(range(s, e + 1))
            anchor = pos[s - 1]
            closure = pos[e + 1] if e + 1 < n else None
        else:
            if e + 1 >= n:
                raise ValueError("a segment must leave at least one monomer fixed")
            order = list(range(e, s - 1, -1))
            anchor = pos[e + 1]
            closure = None
        k = len(order)
        for t, m in enumerate(order):
            steps = k - t if closure is not None else 0
            slots.append(Slot(m, anchor if t == 0 else None, closure, steps))
    return slots


def _enumerate_placements(conf: Conformation, slots: list[Slot]) -> Iterator[list[Point]]:
    """Drive the generator string; yields one point list (slot order) per feasible completion."""
    k = len(slots)
    moving = {s.monomer for s in slots}
    occ = conf.occupancy
    digits = [0] * k  # every slot starts with the same direction

    def fixed_occupied(p: Point) -> bool:
        j = occ.get(p)
        return j is not None and j not in moving

    while True:
        pts: list[Point] = []
        taken: set[Point] = set()
        failed_at = -1
        for t, slot in enumerate(slots):
            base = slot.anchor if slot.anchor is not None else pts[t - 1]
            p = add(base, BASIS[digits[t]])
            ok = not fixed_occupied(p) and p not in taken
            if ok and slot.target is not None:
                ok = sub(slot.target, p) in reachable_offsets(slot.target_steps)
            if not ok:
                failed_at = t
                break
            pts.append(p)
            taken.add(p)
        if failed_at < 0:
            yield pts
            t = k - 1  # next(): bump the least significant digit
        else:
            t = failed_at  # skip(): discard every completion of this prefix
            for u in range(t + 1, k):
                digits[u] = 0
        while t >= 0:
            digits[t] += 1
            if digits[t] < 12:
                break
            digits[t] = 0
            t -= 1
        if t < 0:
            return


def generate_moves(conf: Conformation, selection: SegmentSelection) -> list[Move]:
    """All feasible simultaneous repositionings of the selected monomers.

    Other monomers stay fixed; the identity placement is not returned.
    """
    if len(conf.positions) < 2:
        return []
    slots = build_slots(conf, selection)
    pos = conf.positions
    moves = []
    for pts in _enumerate_placements(conf, slots):
        changes = [(s.monomer, p) for s, p in zip(slots, pts) if pos[s.monomer] != p]
        if changes:
            moves.append(Move.from_pairs(changes))
    return moves
