"""HP sequences, FCC conformations and the HP contact energy.

Monomer indices are 0-based everywhere in the API. Character positions in
parse errors are 1-based because they point into user-supplied text.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .lattice import BASIS, Point, has_even_parity, is_neighbor, sub


class SequenceError(ValueError):
    pass


class EmptySequence(SequenceError):
    def __init__(self) -> None:
        super().__init__("sequence contains no monomers")


class InvalidCharacter(SequenceError):
    def __init__(self, position: int, char: str) -> None:
        self.position = position
        self.char = char
        super().__init__(f"invalid character {char!r} at position {position}")


class UnknownResidue(SequenceError):
    def __init__(self, position: int, char: str) -> None:
        self.position = position
        self.char = char
        super().__init__(f"unknown residue {char!r} at position {position}")


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class HPSequence:
    monomers: str

    def __post_init__(self) -> None:
        if not self.monomers:
            raise EmptySequence()
        bad = next((i for i, c in enumerate(self.monomers) if c not in "HP"), None)
        if bad is not None:
            raise InvalidCharacter(bad + 1, self.monomers[bad])

    def __len__(self) -> int:
        return len(self.monomers)

    def __str__(self) -> str:
        return self.monomers

    @property
    def n(self) -> int:
        return len(self.monomers)

    @cached_property
    def is_h(self) -> tuple[bool, ...]:
        return tuple(c == "H" for c in self.monomers)

    @cached_property
    def h_indices(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.monomers) if c == "H")

    @property
    def n_h(self) -> int:
        return len(self.h_indices)


def parse_sequence(text: str) -> HPSequence:
    """Parse an H/P string, case-insensitively, ignoring whitespace."""
    out = []
    for pos, c in enumerate(text, start=1):
        if c.isspace():
            continue
        u = c.upper()
        if u not in ("H", "P"):
            raise InvalidCharacter(pos, c)
        out.append(u)
    if not out:
        raise EmptySequence()
    return HPSequence("".join(out))


# --- amino-acid classification -------------------------------------------

def load_hp_table(path: str | Path | None = None) -> dict[str, str]:
    """Read a residue -> H/P table (two whitespace-separated columns, '#' comments).

    Without ``path`` the packaged default table is used.
    """
    if path is None:
        text = resources.files("hpfold.data").joinpath("hp_table.tsv").read_text()
    else:
        text = Path(path).read_text()
    table: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or parts[1].upper() not in ("H", "P") or len(parts[0]) != 1:
            raise ValueError(f"{path or 'default table'}:{lineno}: expected '<residue> <H|P>'")
        table[parts[0].upper()] = parts[1].upper()
    return table


def convert_aa_to_hp(text: str, table: Mapping[str, str] | None = None) -> HPSequence:
    """Map one-letter amino-acid codes to H/P via ``table``."""
    if table is None:
        table = load_hp_table()
    out = []
    for pos, c in enumerate(text, start=1):
        if c.isspace():
            continue
        hp = table.get(c.upper())
        if hp is None:
            raise UnknownResidue(pos, c)
        out.append(hp)
    if not out:
        raise EmptySequence()
    return HPSequence("".join(out))


# --- conformations --------------------------------------------------------

@dataclass
class Conformation:
    """A chain placement on the lattice plus a point -> monomer index."""

    positions: list[Point]
    occupancy: dict[Point, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.positions = [tuple(p) for p in self.positions]
        if not self.occupancy:
            self.occupancy = {p: i for i, p in enumerate(self.positions)}

    @classmethod
    def from_directions(cls, directions: Iterable[int], start: Point = (0, 0, 0)) -> "Conformation":
        pts = [start]
        for d in directions:
            v = BASIS[d]
            p = pts[-1]
            pts.append((p[0] + v[0], p[1] + v[1], p[2] + v[2]))
        return cls(pts)

    def __len__(self) -> int:
        return len(self.positions)

    def copy(self) -> "Conformation":
        return Conformation(list(self.positions), dict(self.occupancy))

    def apply(self, changes: Iterable[tuple[int, Point]]) -> None:
        """Move monomers in place; callers guarantee feasibility."""
        changes = list(changes)
        for i, _ in changes:
            old = self.positions[i]
            if self.occupancy.get(old) == i:
                del self.occupancy[old]
        for i, p in changes:
            self.positions[i] = p
            self.occupancy[p] = i


@dataclass(frozen=True)
class Violation:
    kind: str  # "chain", "self_avoiding", "parity" or "occupancy"
    i: int
    j: int


def validate(conf: Conformation) -> list[Violation]:
    """List every violated constraint; an empty list means feasible."""
    report: list[Violation] = []
    pos = conf.positions
    if not pos:
        return report
    for i in range(len(pos) - 1):
        if not is_neighbor(pos[i], pos[i + 1]):
            report.append(Violation("chain", i, i + 1))
    first_seen: dict[Point, int] = {}
    for j, p in enumerate(pos):
        if p in first_seen:
            report.append(Violation("self_avoiding", first_seen[p], j))
        else:
            first_seen[p] = j
        if not has_even_parity(sub(p, pos[0])):
            report.append(Violation("parity", 0, j))
    expected = {p: i for p, i in first_seen.items()}
    if conf.occupancy != expected:
        for p in set(conf.occupancy) | set(expected):
            if conf.occupancy.get(p) != expected.get(p):
                i = expected.get(p, conf.occupancy.get(p))
                report.append(Violation("occupancy", i, i))
    return report


def energy(conf: Conformation, seq: HPSequence) -> int:
    """HP energy: minus the number of non-consecutive H-H lattice contacts."""
    if len(conf.positions) != seq.n:
        raise LengthMismatch(f"{len(conf.positions)} positions for a sequence of length {seq.n}")
    is_h = seq.is_h
    occ = conf.occupancy
    e = 0
    for i in seq.h_indices:
        x, y, z = conf.positions[i]
        for dx, dy, dz in BASIS:
            j = occ.get((x + dx, y + dy, z + dz))
            if j is not None and j > i + 1 and is_h[j]:
                e -= 1
    return e
