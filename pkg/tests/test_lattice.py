import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hpfold.lattice import (
    BASIS,
    add,
    basis_vectors,
    common_neighbors,
    is_neighbor,
    neighbors,
    reachable_offsets,
    squared_distance,
    sub,
)

coords = st.integers(-50, 50)
points = st.tuples(coords, coords, coords)


def test_basis_vectors_order_and_size():
    vs = basis_vectors()
    assert len(vs) == 12
    assert vs[0] == (1, 1, 0)
    assert vs[11] == (1, 0, -1)
    assert len(set(vs)) == 12


def test_basis_closed_under_negation():
    vs = set(basis_vectors())
    assert all((-x, -y, -z) in vs for x, y, z in vs)
    # listed in +/- pairs for the first four
    assert BASIS[1] == tuple(-c for c in BASIS[0])
    assert BASIS[3] == tuple(-c for c in BASIS[2])


def test_basis_has_even_parity_and_length_two():
    for v in BASIS:
        assert sum(v) % 2 == 0
        assert squared_distance((0, 0, 0), v) == 2


@pytest.mark.parametrize(
    "p,q,expected",
    [((0, 0, 0), (1, 1, 0), True), ((0, 0, 0), (2, 0, 0), False), ((0, 0, 0), (0, 0, 0), False)],
)
def test_is_neighbor_examples(p, q, expected):
    assert is_neighbor(p, q) is expected


@pytest.mark.parametrize(
    "p,q,d2", [((0, 0, 0), (1, 1, 0), 2), ((0, 0, 0), (0, 0, 0), 0), ((0, 0, 0), (2, 0, 2), 8)]
)
def test_squared_distance_examples(p, q, d2):
    assert squared_distance(p, q) == d2


@given(points, st.integers(0, 11))
def test_every_basis_step_is_a_neighbor(p, d):
    assert is_neighbor(p, add(p, BASIS[d]))


@given(points, points)
def test_neighbor_characterisations_agree(p, q):
    diff = sub(q, p)
    alt = squared_distance(p, q) == 2 and sum(diff) % 2 == 0
    assert is_neighbor(p, q) == alt


def test_neighbor_characterisations_agree_exhaustively():
    for diff in itertools.product(range(-3, 4), repeat=3):
        alt = sum(c * c for c in diff) == 2 and sum(diff) % 2 == 0
        assert is_neighbor((0, 0, 0), diff) == alt


def _common_brute(p, q):
    out = set()
    for a in BASIS:
        for b in BASIS:
            if add(p, a) == add(q, b):
                out.add(add(p, a))
    return sorted(out)


def test_common_neighbors_of_adjacent_pair():
    got = common_neighbors((0, 0, 0), (1, 1, 0))
    assert got == _common_brute((0, 0, 0), (1, 1, 0))
    assert got == [(0, 1, -1), (0, 1, 1), (1, 0, -1), (1, 0, 1)]


def test_common_neighbors_degenerate_cases():
    assert common_neighbors((0, 0, 0), (0, 0, 0)) == sorted(neighbors((0, 0, 0)))
    assert common_neighbors((0, 0, 0), (10, 10, 0)) == []


def test_common_neighbor_counts_exhaustive():
    # Scan of every lattice difference with |d|_inf <= 4. Sizes are 0, 1, 2, 4 or 12:
    # squared distance 6 gives 2 and squared distance 8 gives 1.
    sizes_by_d2 = {}
    for diff in itertools.product(range(-4, 5), repeat=3):
        if sum(diff) % 2:
            continue
        got = common_neighbors((0, 0, 0), diff)
        assert got == _common_brute((0, 0, 0), diff)
        sizes_by_d2.setdefault(squared_distance((0, 0, 0), diff), set()).add(len(got))
    assert sizes_by_d2[0] == {12}
    assert sizes_by_d2[2] == {4}
    assert sizes_by_d2[4] == {4}
    assert sizes_by_d2[6] == {2}
    assert sizes_by_d2[8] == {1}
    assert all(s == {0} for d2, s in sizes_by_d2.items() if d2 > 8)


def test_reachable_offsets_counts():
    # distinct endpoints of 1- and 2-step walks
    assert reachable_offsets(1) == frozenset(BASIS)
    two = reachable_offsets(2)
    assert (0, 0, 0) in two
    assert (2, 2, 0) in two and (2, 0, 0) in two and (2, 1, 1) in two
    assert len(two) == 1 + 12 + 42
