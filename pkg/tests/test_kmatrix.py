from fractions import Fraction

import pytest

from qgroup import linalg as la
from qgroup.cartan import build_cartan
from qgroup.diagrams import SignFunction, admissible_sign, diagram_from_text
from qgroup.errors import ModuleMismatchError
from qgroup.kmatrix import (
    character_chi,
    coideal_data,
    coideal_generators,
    coproduct_report,
    flag_k,
    flag_report,
    k_matrix,
    kmatrix_report,
    modified_k,
    omega_epsilon,
    scalar_gap,
    theta_fixed_weights,
)
from qgroup.repn import build_module, contragredient, trivial_module
from qgroup.rmat import flip, r_matrix

LIMIT = 1e-30


def _bundle(text):
    s = diagram_from_text(text)
    return modified_k(coideal_data(s), admissible_sign(s))


def test_coideal_constants_split_rank_one():
    cd = coideal_data(diagram_from_text("g=A1; X=; tau=id"))
    assert cd.omega0 == (Fraction(-1, 2),)
    assert theta_fixed_weights(cd.satake) == []


def test_theta_fixed_weights_quasi_split():
    fixed = theta_fixed_weights(diagram_from_text("g=A2; X=; tau=(1 2)"))
    assert len(fixed) == 1
    a, b = fixed[0]
    assert a == -b and a != 0


def test_generators_split_by_painted_nodes(ctx):
    cd = coideal_data(diagram_from_text("g=A3; X=1,3; tau=id"))
    V = build_module(cd.datum, (1, 0, 0), ctx)
    gens = coideal_generators(cd, V)
    assert sorted(gens["B"]) == [1]
    assert sorted(gens["E"]) == [0, 2]
    assert coideal_generators(cd, V) is gens


@pytest.mark.parametrize("text,weights", [
    ("g=A1; X=; tau=id", [(1,), (2,)]),
    ("g=A2; X=; tau=(1 2)", [(1, 0)]),
    ("g=A3; X=1,3; tau=id", [(1, 0, 0)]),
])
def test_single_module_identities(ctx, text, weights):
    bundle = _bundle(text)
    for w in weights:
        V = build_module(bundle.coideal.datum, w, ctx)
        report = kmatrix_report(bundle, V)
        assert {"quasi_k", "intertwines", "star_modified", "generators_C", "counit"} <= set(report)
        assert report["max"] < LIMIT


@pytest.mark.parametrize("text,weight", [
    ("g=A1; X=; tau=id", (1,)),
    ("g=A2; X=; tau=(1 2)", (1, 0)),
])
def test_coproduct_and_reflection_equation(ctx, text, weight):
    bundle = _bundle(text)
    V = build_module(bundle.coideal.datum, weight, ctx)
    report = coproduct_report(bundle, V, V)
    assert "reflection" in report
    assert report["omega"] < LIMIT
    assert report["max"] < LIMIT


@pytest.mark.parametrize("eps", [
    SignFunction.painted(2, [0]),
    SignFunction.painted(2, [1], flag=True),
])
def test_r_matrix_swaps_the_legs_of_omega(ctx, eps):
    datum = build_cartan("A2")
    M, N = build_module(datum, (1, 0), ctx), build_module(datum, (0, 1), ctx)
    R = r_matrix(M, N).R
    omega = omega_epsilon(M, N, eps)
    omega21 = flip(omega_epsilon(N, M, eps), N.dim, M.dim)
    assert la.residual(la.matmul(R, omega), la.matmul(omega21, R)) < LIMIT
    # the trivial component of V(1,0) (x) V(0,1) carries eps_1 eps_2
    assert la.residual(omega, la.eye(M.dim * N.dim)) > 0.1


@pytest.mark.slow
def test_fii_single_module(ctx):
    bundle = _bundle("g=F4; X=2,3,4; tau=id")
    V = build_module(bundle.coideal.datum, (1, 0, 0, 0), ctx)
    assert kmatrix_report(bundle, V)["max"] < LIMIT


def test_counit_of_modified_k(ctx):
    bundle = _bundle("g=A1; X=; tau=id")
    T = trivial_module(bundle.coideal.datum, ctx)
    one = la.unit_vector(1, 0)
    assert abs(character_chi(bundle, T, one, one) - 1) < LIMIT


def test_k_matrix_checks_need_an_inner_product(ctx):
    bundle = _bundle("g=A1; X=; tau=id")
    V = build_module(bundle.coideal.datum, (1,), ctx)
    with pytest.raises(ModuleMismatchError):
        kmatrix_report(bundle, contragredient(V))


@pytest.mark.parametrize("name,support", [("A2", [0]), ("B2", [1])])
def test_flag_k_matrices(ctx, name, support):
    datum = build_cartan(name)
    eps = SignFunction.painted(2, [r for r in range(2) if r not in support], flag=True)
    V = build_module(datum, (1, 0), ctx)
    report = flag_report(datum, eps, V, V)
    assert report["max"] < LIMIT


def test_flag_k_is_diagonal_projection(ctx):
    datum = build_cartan("A2")
    eps = SignFunction.painted(2, [1], flag=True)
    K = flag_k(datum, eps, build_module(datum, (1, 0), ctx))
    assert all(K[i, j] == 0 for i in range(3) for j in range(3) if i != j)
    assert sorted(int(K[i, i]) for i in range(3)) in ([0, 0, 1], [0, 1, 1])


def test_flag_report_rejects_sign_functions(ctx):
    datum = build_cartan("A2")
    V = build_module(datum, (1, 0), ctx)
    with pytest.raises(ModuleMismatchError):
        flag_report(datum, SignFunction.painted(2, [0]), V, V)


def test_scalar_gap():
    assert scalar_gap(la.eye(3)) == 0
    assert scalar_gap(la.diag([1, 2, 3])) > 0


def test_raw_k_matrix_matches_the_bundle(ctx):
    bundle = _bundle("g=A2; X=; tau=(1 2)")
    V = build_module(bundle.coideal.datum, (1, 0), ctx)
    assert la.residual(k_matrix(bundle.coideal, V), bundle.raw.on(V)) < LIMIT
