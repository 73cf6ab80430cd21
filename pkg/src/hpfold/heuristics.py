"""The three guiding objectives with exact incremental evaluation.

* H1: HP contact energy (negated count of non-consecutive H-H contacts).
* H2: sum of squared distances over non-consecutive H-H pairs.
* H3: sum of squared distances of H monomers to their centroid, stored
  multiplied by the number of H monomers so it stays an integer.

All accumulators are Python ints, so ``simulate``, ``execute`` and
``recompute`` agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple

from .lattice import BASIS, Point, is_neighbor, squared_distance
from .model import Conformation, HPSequence


class HeuristicKind(IntEnum):
    H1_CONTACTS = 0
    H2_ALLPAIR_DIST = 1
    H3_CENTROID_DIST = 2

    @classmethod
    def parse(cls, text: str) -> "HeuristicKind":
        key = text.strip().lower()
        for kind in cls:
            if key in (kind.name.lower(), kind.name.lower().split("_")[0]):
                return kind
        raise ValueError(f"unknown heuristic {text!r} (expected h1, h2 or h3)")


class InfeasibleMove(RuntimeError):
    pass


@dataclass(frozen=True)
class Move:
    """Simultaneous repositioning of monomers; indices strictly increasing."""

    changes: tuple[tuple[int, Point], ...]

    @classmethod
    def from_pairs(cls, pairs) -> "Move":
        return cls(tuple(sorted((int(i), tuple(p)) for i, p in pairs)))

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.changes)


class Deltas(NamedTuple):
    h1: int
    h2: int
    h3: int

    def __getitem__(self, key):  # accept HeuristicKind as well as ints
        return tuple.__getitem__(self, int(key))


@dataclass
class HeuristicState:
    contact_energy: int
    allpair_sum: int
    consecutive_sum: int
    h_coord_sum: tuple[int, int, int]
    h_norm_sum: int
    n_h: int

    def copy(self) -> "HeuristicState":
        return HeuristicState(**self.__dict__)

    @property
    def scaled_centroid(self) -> int:
        cx, cy, cz = self.h_coord_sum
        return self.n_h * self.h_norm_sum - (cx * cx + cy * cy + cz * cz)


def _norm(p: Point) -> int:
    return p[0] * p[0] + p[1] * p[1] + p[2] * p[2]


def recompute(conf: Conformation, seq: HPSequence) -> HeuristicState:
    """Build every accumulator from scratch by direct summation."""
    pos = conf.positions
    hs = seq.h_indices
    contact = 0
    allpair = 0
    consecutive = 0
    for a, i in enumerate(hs):
        for j in hs[a + 1:]:
            d2 = squared_distance(pos[i], pos[j])
            allpair += d2
            if j == i + 1:
                consecutive += d2
            elif d2 == 2 and is_neighbor(pos[i], pos[j]):
                contact -= 1
    sx = sum(pos[i][0] for i in hs)
    sy = sum(pos[i][1] for i in hs)
    sz = sum(pos[i][2] for i in hs)
    norm = sum(_norm(pos[i]) for i in hs)
    return HeuristicState(contact, allpair, consecutive, (sx, sy, sz), norm, len(hs))


def value(state: HeuristicState, kind: HeuristicKind) -> int:
    """Objective for ``kind``; lower is better for all three."""
    if kind == HeuristicKind.H1_CONTACTS:
        return state.contact_energy
    if kind == HeuristicKind.H2_ALLPAIR_DIST:
        return state.allpair_sum - state.consecutive_sum
    return state.scaled_centroid


def _contacts_of(points: dict[int, Point], lookup, is_h) -> int:
    """Count non-consecutive H-H contacts that involve at least one index in ``points``."""
    count = 0
    for i, (x, y, z) in points.items():
        if not is_h[i]:
            continue
        for dx, dy, dz in BASIS:
            j = lookup((x + dx, y + dy, z + dz))
            if j is None or not is_h[j] or abs(i - j) < 2:
                continue
            if j in points and j < i:
                continue  # pair already counted from the lower index
            count += 1
    return count


def _raw_deltas(state: HeuristicState, conf: Conformation, seq: HPSequence, move: Move):
    is_h = seq.is_h
    pos = conf.positions
    occ = conf.occupancy
    old = {i: pos[i] for i, _ in move.changes}
    new = dict(move.changes)

    def old_lookup(p):
        return occ.get(p)

    moved_at = {p: i for i, p in new.items()}

    def new_lookup(p):
        j = moved_at.get(p)
        if j is not None:
            return j
        j = occ.get(p)
        if j is None or j in new:
            return None
        return j

    d_contact = _contacts_of(old, old_lookup, is_h) - _contacts_of(new, new_lookup, is_h)

    moved_h = [i for i in new if is_h[i]]
    if not moved_h:
        return d_contact, 0, 0, (0, 0, 0), 0

    # Fixed-H sums for the all-pairs term.
    cx, cy, cz = state.h_coord_sum
    norm = state.h_norm_sum
    fx, fy, fz, fn = cx, cy, cz, norm
    for i in moved_h:
        p = old[i]
        fx -= p[0]
        fy -= p[1]
        fz -= p[2]
        fn -= _norm(p)
    nf = state.n_h - len(moved_h)

    def to_fixed(p: Point) -> int:
        return nf * _norm(p) - 2 * (p[0] * fx + p[1] * fy + p[2] * fz) + fn

    d_allpair = 0
    d_consec = 0
    for a, i in enumerate(moved_h):
        d_allpair += to_fixed(new[i]) - to_fixed(old[i])
        for j in moved_h[a + 1:]:
            d_allpair += squared_distance(new[i], new[j]) - squared_distance(old[i], old[j])
        for j in (i - 1, i + 1):
            if 0 <= j < len(pos) and is_h[j] and (j not in new or j > i):
                pj_old = pos[j]
                pj_new = new.get(j, pj_old)
                d_consec += squared_distance(new[i], pj_new) - squared_distance(old[i], pj_old)

    dcx = sum(new[i][0] - old[i][0] for i in moved_h)
    dcy = sum(new[i][1] - old[i][1] for i in moved_h)
    dcz = sum(new[i][2] - old[i][2] for i in moved_h)
    dnorm = sum(_norm(new[i]) - _norm(old[i]) for i in moved_h)
    return d_contact, d_allpair, d_consec, (dcx, dcy, dcz), dnorm


def simulate(state: HeuristicState, conf: Conformation, seq: HPSequence, move: Move) -> Deltas:
    """Exact change of each objective if ``move`` were executed; mutates nothing."""
    d_contact, d_allpair, d_consec, dc, dnorm = _raw_deltas(state, conf, seq, move)
    cx, cy, cz = state.h_coord_sum
    nx, ny, nz = cx + dc[0], cy + dc[1], cz + dc[2]
    new_scaled = state.n_h * (state.h_norm_sum + dnorm) - (nx * nx + ny * ny + nz * nz)
    return Deltas(d_contact, d_allpair - d_consec, new_scaled - state.scaled_centroid)


def check_move(conf: Conformation, move: Move) -> None:
    """Raise InfeasibleMove unless applying ``move`` keeps the chain a self-avoiding walk."""
    new = dict(move.changes)
    if len(new) != len(move.changes):
        raise InfeasibleMove("duplicate index in move")
    n = len(conf.positions)
    seen: set[Point] = set()
    for i, p in new.items():
        if not 0 <= i < n:
            raise InfeasibleMove(f"index {i} out of range")
        if p in seen:
            raise InfeasibleMove(f"two moved monomers share {p}")
        seen.add(p)
        j = conf.occupancy.get(p)
        if j is not None and j not in new:
            raise InfeasibleMove(f"monomer {i} collides with monomer {j} at {p}")
        for k in (i - 1, i + 1):
            if 0 <= k < n and not is_neighbor(p, new.get(k, conf.positions[k])):
                raise InfeasibleMove(f"chain broken between {min(i, k)} and {max(i, k)}")


def execute(
    state: HeuristicState,
    conf: Conformation,
    seq: HPSequence,
    move: Move,
    check: bool = False,
) -> HeuristicState:
    """Apply ``move`` to ``conf`` and update ``state`` in place."""
    if check:
        check_move(conf, move)
    d_contact, d_allpair, d_consec, dc, dnorm = _raw_deltas(state, conf, seq, move)
    state.contact_energy += d_contact
    state.allpair_sum += d_allpair
    state.consecutive_sum += d_consec
    cx, cy, cz = state.h_coord_sum
    state.h_coord_sum = (cx + dc[0], cy + dc[1], cz + dc[2])
    state.h_norm_sum += dnorm
    conf.apply(move.changes)
    return state
