"""Brute-force ground truth for short chains and small segment neighbourhoods."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .heuristics import Move
from .lattice import BASIS, Point, is_neighbor, neighbors
from .model import Conformation, HPSequence, validate
from .segments import SegmentSelection

MAX_ENUMERATION_LENGTH = 9
MAX_ORACLE_POSITIONS = 4


class TooLong(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    optimal_energy: int
    optimizer_count: int
    enumerated: int
    example: tuple[Point, ...] = ()


def _stabilizer_of_first_step() -> list[list[int]]:
    """Direction permutations induced by the lattice symmetries fixing BASIS[0]."""
    index = {v: i for i, v in enumerate(BASIS)}
    perms = []
    for axes in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            def apply(v, axes=axes, signs=signs):
                return tuple(signs[a] * v[axes[a]] for a in range(3))
            if apply(BASIS[0]) != BASIS[0]:
                continue
            if axes == (0, 1, 2) and signs == (1, 1, 1):
                continue
            perms.append([index[apply(v)] for v in BASIS])
    return perms


def enumerate_optimal(seq: HPSequence, symmetry_reduction: bool = True) -> OracleResult:
    """Exact minimum energy by visiting every self-avoiding walk.

    The walk starts at the origin with its first step fixed to BASIS[0]. With
    ``symmetry_reduction`` only the lexicographically smallest direction string
    among the walks related by a symmetry fixing that first step is visited;
    counts then refer to those canonical walks.
    """
    n = seq.n
    if n > MAX_ENUMERATION_LENGTH:
        raise TooLong(f"exhaustive enumeration is limited to {MAX_ENUMERATION_LENGTH} monomers, got {n}")
    if n == 1:
        return OracleResult(0, 1, 1, ((0, 0, 0),))
    is_h = seq.is_h
    perms = _stabilizer_of_first_step() if symmetry_reduction else []

    pts: list[Point] = [(0, 0, 0), BASIS[0]]
    where = {pts[0]: 0, pts[1]: 1}
    best = 1
    best_count = 0
    best_walk: tuple[Point, ...] = ()
    visited = 0

    def contacts_of(i: int, p: Point) -> int:
        if not is_h[i]:
            return 0
        c = 0
        x, y, z = p
        for dx, dy, dz in BASIS:
            j = where.get((x + dx, y + dy, z + dz))
            if j is not None and j < i - 1 and is_h[j]:
                c += 1
        return c

    def extend(e: int, tied: list[list[int]]) -> None:
        nonlocal best, best_count, best_walk, visited
        i = len(pts)
        if i == n:
            visited += 1
            if e < best:
                best, best_count, best_walk = e, 1, tuple(pts)
            elif e == best:
                best_count += 1
            return
        x, y, z = pts[-1]
        for d, (dx, dy, dz) in enumerate(BASIS):
            still = []
            smaller = False
            for perm in tied:
                if perm[d] < d:
                    smaller = True
                    break
                if perm[d] == d:
                    still.append(perm)
            if smaller:
                continue
            p = (x + dx, y + dy, z + dz)
            if p in where:
                continue
            pts.append(p)
            where[p] = i
            extend(e - contacts_of(i, p), still)
            del where[p]
            pts.pop()

    extend(0, perms)
    return OracleResult(best, best_count, visited, best_walk)


def _ball(center: Point, radius: int) -> set[Point]:
    seen = {center}
    frontier = [center]
    for _ in range(radius):
        nxt = []
        for p in frontier:
            for q in neighbors(p):
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return seen


def neighborhood_oracle(conf: Conformation, selection: SegmentSelection) -> list[Move]:
    """Every feasible re-placement of the selected monomers, by exhaustive placement.

    Each selected monomer ranges over all points within its chain distance of
    the nearest fixed monomer; every combination is checked with ``validate``.
    """
    chosen = sorted(selection.indices)
    if len(chosen) > MAX_ORACLE_POSITIONS:
        raise ValueError(f"oracle handles at most {MAX_ORACLE_POSITIONS} positions")
    pos = conf.positions
    n = len(pos)
    moving = set(chosen)
    fixed = [i for i in range(n) if i not in moving]
    if not fixed:
        return []
    candidates = []
    for m in chosen:
        ref = min(fixed, key=lambda j: abs(j - m))
        candidates.append(sorted(_ball(pos[ref], abs(ref - m))))

    moves: set[Move] = set()
    trial = list(pos)

    def place(t: int) -> None:
        if t == len(chosen):
            if not validate(Conformation(list(trial))):
                changes = [(m, trial[m]) for m in chosen if trial[m] != pos[m]]
                if changes:
                    moves.add(Move.from_pairs(changes))
            return
        m = chosen[t]
        for c in candidates[t]:
            if m - 1 in moving and not is_neighbor(trial[m - 1], c):
                continue
            trial[m] = c
            place(t + 1)
        trial[m] = pos[m]

    place(0)
    return sorted(moves, key=lambda mv: mv.changes)
