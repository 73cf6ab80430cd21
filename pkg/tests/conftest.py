import random

import pytest

from hpfold.lattice import BASIS
from hpfold.model import Conformation, HPSequence
from hpfold.search import random_walk
from hpfold.segments import SegmentKind, SegmentSelection, generate_moves, single_window


def brute_energy(positions, monomers: str) -> int:
    """Independent O(n^2) pair scan of the HP energy."""
    e = 0
    n = len(positions)
    for i in range(n):
        for j in range(i + 2, n):
            if monomers[i] == "H" and monomers[j] == "H":
                d = tuple(b - a for a, b in zip(positions[i], positions[j]))
                if d in BASIS:
                    e -= 1
    return e


def random_sequence(rng: random.Random, n: int, p_h: float = 0.5) -> HPSequence:
    return HPSequence("".join("H" if rng.random() < p_h else "P" for _ in range(n)))


def random_selection(rng: random.Random, n: int, max_size: int = 3) -> SegmentSelection:
    size = rng.randint(1, max_size)
    if rng.random() < 0.5 or n < 2 * size:
        return SegmentSelection(SegmentKind.SINGLE, single_window(rng.randrange(n), min(size, n - 1), n))
    while True:
        picked = sorted(rng.sample(range(n), size))
        if all(b - a >= 2 for a, b in zip(picked, picked[1:])):
            return SegmentSelection(SegmentKind.MULTIPLE, tuple(picked))


def compact_conformation(rng: random.Random, n: int, shuffles: int = 200) -> Conformation:
    """Random walk folded further by random local moves, so that it is dense."""
    conf = random_walk(n, rng)
    for _ in range(shuffles):
        moves = generate_moves(conf, random_selection(rng, n, 2))
        if moves:
            conf.apply(rng.choice(moves).changes)
    return conf


@pytest.fixture
def rng():
    return random.Random(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
