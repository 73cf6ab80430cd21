"""Integer geometry of the face-centered cubic (FCC) lattice.

Points are plain ``(x, y, z)`` integer tuples. One lattice step has squared
Euclidean length 2, and every point reachable from the origin has an even
coordinate sum.
"""

from __future__ import annotations

from functools import lru_cache

Point = tuple[int, int, int]

# Order is fixed: direction index d selects BASIS[d] (v_1 .. v_12).
BASIS: tuple[Point, ...] = (
    (1, 1, 0),
    (-1, -1, 0),
    (-1, 1, 0),
    (1, -1, 0),
    (0, 1, 1),
    (0, 1, -1),
    (0, -1, -1),
    (0, -1, 1),
    (1, 0, 1),
    (-1, 0, 1),
    (-1, 0, -1),
    (1, 0, -1),
)

_BASIS_SET = frozenset(BASIS)

ORIGIN: Point = (0, 0, 0)


def basis_vectors() -> list[Point]:
    """Return the 12 FCC basis vectors in their canonical order."""
    return list(BASIS)


def add(p: Point, q: Point) -> Point:
    return (p[0] + q[0], p[1] + q[1], p[2] + q[2])


def sub(p: Point, q: Point) -> Point:
    return (p[0] - q[0], p[1] - q[1], p[2] - q[2])


def squared_distance(p: Point, q: Point) -> int:
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    dz = p[2] - q[2]
    return dx * dx + dy * dy + dz * dz


def is_neighbor(p: Point, q: Point) -> bool:
    """True iff ``q - p`` is one of the basis vectors."""
    return (q[0] - p[0], q[1] - p[1], q[2] - p[2]) in _BASIS_SET


def has_even_parity(p: Point) -> bool:
    return (p[0] + p[1] + p[2]) % 2 == 0


def neighbors(p: Point) -> list[Point]:
    x, y, z = p
    return [(x + dx, y + dy, z + dz) for dx, dy, dz in BASIS]


def common_neighbors(p: Point, q: Point) -> list[Point]:
    """All lattice points adjacent to both ``p`` and ``q``, sorted."""
    if squared_distance(p, q) > 8:
        return []
    return sorted(r for r in neighbors(p) if is_neighbor(q, r))


@lru_cache(maxsize=None)
def reachable_offsets(steps: int) -> frozenset[Point]:
    """Offsets reachable by a walk of exactly ``steps`` basis steps.

    Walks may revisit points; this is a necessary condition used to prune
    segment completions that cannot close onto a fixed anchor.
    """
    if steps == 0:
        return frozenset([ORIGIN])
    prev = reachable_offsets(steps - 1)
    return frozenset(add(p, v) for p in prev for v in BASIS)
