import pytest
from mpmath import mp

from qgroup import linalg as la
from qgroup.cartan import build_cartan
from qgroup.diagrams import SignFunction, admissible_sign, diagram_from_text
from qgroup.errors import ModuleMismatchError
from qgroup.kmatrix import coideal_data, modified_k
from qgroup.repn import build_module, trivial_module
from qgroup.spherical import (
    algebra_span,
    cartan_part_check,
    dominant_weights,
    extremal_vector,
    flag_phihat_check,
    flag_support,
    image_range_check,
    in_spherical_cone,
    invariant_vectors,
    phihat_image,
    spherical_scan,
    span_gap,
    wj_component_check,
)

LIMIT = 1e-30
AII = "g=A3; X=1,3; tau=id"


def _bundle(text):
    s = diagram_from_text(text)
    return modified_k(coideal_data(s), admissible_sign(s))


def test_dominant_weights_ordered_by_height():
    assert dominant_weights(build_cartan("A1"), 3) == [(0,), (1,), (2,), (3,)]
    assert dominant_weights(build_cartan("A2"), 1) == [(0, 0), (0, 1), (1, 0)]


@pytest.mark.parametrize("weight,generators,expected", [
    ((4,), [(2,)], True),
    ((3,), [(2,)], False),
    ((0, 0), [], True),
    ((1, 1), [(1, 1)], True),
    ((1, 0), [(1, 1)], False),
])
def test_spherical_cone_membership(weight, generators, expected):
    assert in_spherical_cone(weight, generators) is expected


def test_split_rank_one_scan(ctx):
    rows = spherical_scan(coideal_data(diagram_from_text("g=A1; X=; tau=id")), ctx, 4)
    assert [row["multiplicity"] for row in rows] == [1, 0, 1, 0, 1]
    assert all(row["agrees"] for row in rows)


@pytest.mark.parametrize("weight,expected", [((0, 1, 0), 1), ((1, 0, 0), 0), ((0, 0, 0), 1)])
def test_invariant_vectors_symplectic(ctx, weight, expected):
    cd = coideal_data(diagram_from_text(AII))
    report = invariant_vectors(cd, build_module(cd.datum, weight, ctx))
    assert report.dim_invariants == expected
    assert report.weight == weight


def test_exterior_square_component(ctx):
    cd = coideal_data(diagram_from_text(AII))
    found = wj_component_check(cd, ctx, 1)
    assert found["invariants"] == 1
    assert found["passed"]
    with pytest.raises(ModuleMismatchError):
        wj_component_check(cd, ctx, 2)


def test_extremal_vector_needs_a_simple_weight(ctx):
    V = build_module(build_cartan("A2"), (1, 1), ctx)
    assert la.norm(extremal_vector(V, (1, 1))) == 1
    with pytest.raises(ModuleMismatchError):
        extremal_vector(V, (0, 0))
    with pytest.raises(ModuleMismatchError):
        extremal_vector(V, (3, 3))


def test_cartan_part_on_split_rank_one(ctx):
    bundle = _bundle("g=A1; X=; tau=id")
    W = build_module(bundle.coideal.datum, (1,), ctx)
    assert cartan_part_check(bundle, (1,), W)["passed"]


def test_image_range(ctx):
    bundle = _bundle(AII)
    assert image_range_check(bundle, (0, 1, 0), ctx)["passed"]
    with pytest.raises(ModuleMismatchError):
        image_range_check(bundle, (1, 0, 0), ctx)


def test_flag_phihat_is_a_torus_element(ctx):
    datum = build_cartan("A2")
    eps = SignFunction.painted(2, [1], flag=True)
    assert flag_support(datum, eps) == (1,)
    W = build_module(datum, (0, 1), ctx)
    assert flag_phihat_check(datum, eps, (1, 0), W) < LIMIT


@pytest.mark.parametrize("name,painted,varpi,module", [
    ("A2", [1], (0, 1), (1, 0)),
    ("A3", [1, 2], (1, 0, 0), (0, 0, 1)),
    ("B2", [0], (0, 1), (1, 0)),
])
def test_flag_phihat_at_the_levi_extremal_weight(ctx, name, painted, varpi, module):
    datum = build_cartan(name)
    eps = SignFunction.painted(datum.rank, painted, flag=True)
    W = build_module(datum, module, ctx)
    assert flag_phihat_check(datum, eps, varpi, W) < LIMIT


def test_flag_support_follows_the_longest_element(ctx):
    datum = build_cartan("A3")
    assert flag_support(datum, SignFunction.painted(3, [1, 2], flag=True)) == (2,)
    assert flag_support(build_cartan("B2"), SignFunction.painted(2, [0], flag=True)) == (1,)


def test_algebra_span_of_rank_one_generators(ctx):
    V = build_module(build_cartan("A1"), (1,), ctx)
    full = algebra_span([V.E[0], V.F[0]], ctx)
    assert len(full) == 4
    diagonal = algebra_span([V.Kr(0)], ctx)
    assert len(diagonal) == 2
    assert span_gap(full, full) < LIMIT
    assert span_gap(full, diagonal) > mp.mpf("0.5")
    assert algebra_span([], ctx) == []


def test_phihat_of_the_unit_coefficient_is_the_identity(ctx):
    bundle = _bundle("g=A1; X=; tau=id")
    datum = bundle.coideal.datum
    one = la.vector([mp.mpf(1)])
    W = build_module(datum, (1,), ctx)
    image = phihat_image(bundle, trivial_module(datum, ctx), one, one, W)
    assert la.residual(image, W.identity()) < LIMIT
