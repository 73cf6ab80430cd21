import itertools
import random

import pytest

from hpfold.lattice import BASIS
from hpfold.model import (
    Conformation,
    EmptySequence,
    HPSequence,
    InvalidCharacter,
    LengthMismatch,
    UnknownResidue,
    Violation,
    convert_aa_to_hp,
    energy,
    load_hp_table,
    parse_sequence,
    validate,
)
from hpfold.search import random_walk

from conftest import brute_energy, compact_conformation, random_sequence


def test_parse_sequence_basic():
    s = parse_sequence("HPH")
    assert s.monomers == "HPH"
    assert s.n == 3 and s.n_h == 2
    assert s.h_indices == (0, 2)


def test_parse_sequence_normalises_case_and_whitespace():
    assert parse_sequence("hp hP").monomers == "HPHP"
    assert parse_sequence(" h\np\t").monomers == "HP"


def test_parse_sequence_errors():
    with pytest.raises(InvalidCharacter) as exc:
        parse_sequence("HXH")
    assert (exc.value.position, exc.value.char) == (2, "X")
    with pytest.raises(EmptySequence):
        parse_sequence("  \n")
    with pytest.raises(EmptySequence):
        HPSequence("")


def test_validate_feasible_walk():
    assert validate(Conformation([(0, 0, 0), (1, 1, 0), (1, 0, 1)])) == []


def test_validate_chain_violation():
    assert validate(Conformation([(0, 0, 0), (2, 0, 0)])) == [Violation("chain", 0, 1)]


def test_validate_self_avoidance_violation():
    report = validate(Conformation([(0, 0, 0), (1, 1, 0), (0, 0, 0)]))
    assert Violation("self_avoiding", 0, 2) in report


def test_validate_parity_and_stale_occupancy():
    conf = Conformation([(0, 0, 0), (1, 0, 0)])
    kinds = {v.kind for v in validate(conf)}
    assert {"chain", "parity"} <= kinds
    conf = Conformation([(0, 0, 0), (1, 1, 0)])
    conf.occupancy[(5, 5, 0)] = 1
    assert any(v.kind == "occupancy" for v in validate(conf))


def test_energy_examples():
    straight = Conformation([(k, k, 0) for k in range(6)])
    assert energy(straight, parse_sequence("HHHHHH")) == 0
    bent = Conformation([(0, 0, 0), (1, 1, 0), (1, 0, 1)])
    assert energy(bent, parse_sequence("HHH")) == -1
    assert brute_energy(bent.positions, "HHH") == -1
    assert energy(bent, parse_sequence("PPP")) == 0


def test_energy_length_mismatch():
    with pytest.raises(LengthMismatch):
        energy(Conformation([(0, 0, 0), (1, 1, 0)]), parse_sequence("HHH"))


def test_energy_matches_pair_scan_on_random_conformations():
    rng = random.Random(7)
    for trial in range(300):
        n = rng.randint(2, 40)
        seq = random_sequence(rng, n)
        conf = compact_conformation(rng, n, 30) if trial % 2 else random_walk(n, rng)
        assert validate(conf) == []
        e = energy(conf, seq)
        assert e == brute_energy(conf.positions, seq.monomers)
        assert e <= 0


def _lattice_symmetries():
    basis = set(BASIS)
    out = []
    for axes in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            def f(p, axes=axes, signs=signs):
                return tuple(signs[a] * p[axes[a]] for a in range(3))
            if {f(v) for v in basis} == basis:
                out.append(f)
    return out


def test_energy_invariant_under_symmetries_and_translation():
    syms = _lattice_symmetries()
    assert len(syms) == 48
    rng = random.Random(3)
    for _ in range(20):
        n = rng.randint(5, 30)
        seq = random_sequence(rng, n)
        conf = compact_conformation(rng, n, 40)
        e = energy(conf, seq)
        shift = (2 * rng.randint(-5, 5), 0, 2 * rng.randint(-5, 5))
        for f in syms:
            moved = Conformation([tuple(a + b for a, b in zip(f(p), shift)) for p in conf.positions])
            assert validate(moved) == []
            assert energy(moved, seq) == e


def test_convert_default_table():
    assert convert_aa_to_hp("LVA").monomers == "HHH"
    assert convert_aa_to_hp("DEKR").monomers == "PPPP"
    assert convert_aa_to_hp("gaCy").monomers == "HHHH"
    with pytest.raises(UnknownResidue) as exc:
        convert_aa_to_hp("LXA")
    assert (exc.value.position, exc.value.char) == (2, "X")


def test_default_table_covers_twenty_residues():
    table = load_hp_table()
    assert len(table) == 20
    assert {k for k, v in table.items() if v == "H"} == set("ACFGILMVWY")


def test_custom_table(tmp_path):
    p = tmp_path / "t.tsv"
    p.write_text("# tiny\nL\tP\nK H\n")
    table = load_hp_table(p)
    assert convert_aa_to_hp("LK", table).monomers == "PH"
    with pytest.raises(UnknownResidue):
        convert_aa_to_hp("A", table)
    bad = tmp_path / "bad.tsv"
    bad.write_text("L X\n")
    with pytest.raises(ValueError):
        load_hp_table(bad)


def test_conformation_apply_keeps_occupancy_consistent():
    conf = Conformation([(0, 0, 0), (1, 1, 0), (2, 2, 0)])
    conf.apply([(2, (1, 0, 1))])
    assert validate(conf) == []
    assert conf.occupancy == {(0, 0, 0): 0, (1, 1, 0): 1, (1, 0, 1): 2}
