from fractions import Fraction

import pytest

from qgroup import linalg as la
from qgroup.f4case import (
    LABELS,
    VARPI_1,
    F4Basis,
    build_f4_fundamental,
    epsilon_to_fundamental,
    intertwiner_to_generic,
    label_weight,
    verify_f4_identities,
)
from qgroup.repn import check_relations

LIMIT = 1e-35


def test_labels_cover_the_module():
    assert len(LABELS) == 26
    assert len(set(LABELS)) == 26
    weights = [epsilon_to_fundamental(label_weight(label)) for label in LABELS]
    assert weights[0] == VARPI_1
    assert weights[-1] == (-1, 0, 0, 0)
    assert weights.count((0, 0, 0, 0)) == 2


def test_label_weights():
    h = Fraction(1, 2)
    assert label_weight("f+-+-") == (h, -h, h, -h)
    assert label_weight("e3-") == (0, 0, -1, 0)
    assert label_weight("e0'") == (0, 0, 0, 0)


def test_derived_zero_vector_is_a_unit_vector(ctx):
    basis = F4Basis(ctx)
    assert basis.dim == 26
    assert abs(la.norm(basis.vector("f0")) - 1) < LIMIT
    v = basis.combo((2, "e1+"), (-1, "e1-"))
    assert v[basis.index["e1+"]] == 2 and v[basis.index["e1-"]] == -1


def test_explicit_module_relations(ctx):
    V = build_f4_fundamental(ctx)
    assert V.dim == 26
    assert check_relations(V)["max"] < LIMIT


def test_explicit_module_matches_generic_construction(ctx):
    found = intertwiner_to_generic(build_f4_fundamental(ctx))
    assert found["intertwines"] < LIMIT
    assert found["unitary"] < LIMIT


@pytest.mark.slow
def test_fii_identities(ctx):
    report = verify_f4_identities(ctx)
    assert report["failed"] == []
    assert report["positive"]
    assert report["passed"]
    assert report["a"] != 0
