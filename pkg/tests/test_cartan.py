from fractions import Fraction

import pytest

from qgroup.cartan import build_cartan, parse_labels
from qgroup.errors import CartanError


@pytest.mark.parametrize("name,count", [
    ("A1", 1), ("A2", 3), ("A3", 6), ("B2", 4), ("C2", 4), ("G2", 6), ("D4", 12), ("F4", 24),
])
def test_positive_root_count_and_longest_word(name, count):
    datum = build_cartan(name)
    assert len(datum.positive_roots) == count
    w0 = datum.longest_word()
    assert len(w0) == count
    assert datum.is_reduced(w0)


def test_f4_symmetrizer_and_bonds():
    datum = build_cartan("F4")
    assert datum.d == (Fraction(1, 2), Fraction(1, 2), Fraction(1), Fraction(1))
    assert datum.cartan[1][2] == -2
    assert datum.cartan[2][1] == -1


@pytest.mark.parametrize("name,dims", [
    ("A2", [3, 3]),
    ("B2", [5, 4]),
    ("C2", [4, 5]),
    ("G2", [7, 14]),
    ("D4", [8, 28, 8, 8]),
    ("F4", [26, 273, 1274, 52]),
])
def test_fundamental_weyl_dimensions(name, dims):
    datum = build_cartan(name)
    fundamentals = [tuple(1 if k == j else 0 for k in datum.index_set) for j in datum.index_set]
    assert [datum.weyl_dim(w) for w in fundamentals] == dims


def test_form_on_simple_roots():
    datum = build_cartan("G2")
    for r in datum.index_set:
        assert datum.form(datum.alpha(r), datum.alpha(r)) == 2 * datum.d[r]


def test_cartan_inverse():
    datum = build_cartan("B2")
    inv = datum.cartan_inverse
    for i in datum.index_set:
        for j in datum.index_set:
            entry = sum(datum.cartan[i][k] * inv[k][j] for k in datum.index_set)
            assert entry == (1 if i == j else 0)


def test_reflection_negates_simple_root():
    datum = build_cartan("A3")
    for r in datum.index_set:
        assert datum.reflect(datum.alpha(r), r) == tuple(-x for x in datum.alpha(r))


def test_opposition_involution():
    assert build_cartan("A2").tau0 == (1, 0)
    assert build_cartan("A3").tau0 == (2, 1, 0)
    assert build_cartan("B2").tau0 == (0, 1)
    assert build_cartan("D4").tau0 == (0, 1, 2, 3)


def test_diagram_involution_on_a_subsystem():
    datum = build_cartan("A3")
    assert datum.diagram_involution(datum.longest_word((0, 1)), (0, 1)) == (1, 0, 2)


def test_diagram_involution_rejects_a_short_word():
    with pytest.raises(CartanError):
        build_cartan("A2").diagram_involution((0,))


def test_sum_of_simple_factors():
    datum = build_cartan("A1+A1")
    assert datum.rank == 2
    assert datum.name == "A1+A1"
    assert datum.cartan == ((2, 0), (0, 2))


@pytest.mark.parametrize("bad", ["H3", "B1", "F5", "", "A0"])
def test_invalid_labels(bad):
    with pytest.raises(CartanError):
        parse_labels(bad)


def test_weyl_dim_rejects_non_dominant():
    with pytest.raises(CartanError):
        build_cartan("A2").weyl_dim((1, -1))
