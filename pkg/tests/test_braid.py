import pytest

from qgroup import linalg as la
from qgroup.braid import (
    T_longest,
    braid_T,
    braid_relation_report,
    braid_word,
    commutation_reports,
    s_zero,
    torus_operator,
)
from qgroup.cartan import build_cartan
from qgroup.errors import CartanError
from qgroup.repn import build_module

LIMIT = 1e-35


@pytest.mark.parametrize("n", range(5))
def test_rank_one_action_on_highest_vector(ctx, n):
    V = build_module(build_cartan("A1"), (n,), ctx)
    top = la.unit_vector(V.dim, 0)
    lowered = top
    for _ in range(n):
        lowered = la.matvec(V.F[0], lowered)
    expected = ((-1) ** n) * ctx.q_power(n) / ctx.qfactorial(n) * lowered
    assert la.residual(la.matvec(braid_T(V, 0), top), expected) < LIMIT


@pytest.mark.parametrize("name", ["A2", "B2"])
def test_braid_relations(ctx, name):
    report = braid_relation_report(build_cartan(name), ctx)
    assert list(report) == ["1-2"]
    assert report["1-2"] < LIMIT


def test_braid_operator_moves_weight_spaces(ctx):
    datum = build_cartan("A2")
    V = build_module(datum, (1, 0), ctx)
    T1 = braid_T(V, 0)
    target = datum.reflect((1, 0), 0)
    for i in range(V.dim):
        if T1[i, 0] != 0:
            assert V.weights[i] == target


def test_braid_operator_is_invertible(ctx):
    V = build_module(build_cartan("B2"), (0, 1), ctx)
    assert la.rank(braid_T(V, 1), ctx) == V.dim


def test_longest_element_matches_reduced_words(ctx):
    datum = build_cartan("A2")
    V = build_module(datum, (1, 1), ctx)
    assert la.residual(T_longest(V), braid_word(V, (1, 0, 1))) < LIMIT


def test_non_reduced_word_rejected(ctx):
    V = build_module(build_cartan("A2"), (1, 0), ctx)
    with pytest.raises(CartanError):
        braid_word(V, (0, 0))


@pytest.mark.parametrize("name,weight,subsets", [
    ("B2", (1, 0), [(), (1,)]),
    ("A3", (1, 0, 0), [(), (1,), (0, 2)]),
])
def test_unitarity_properties(ctx, name, weight, subsets):
    V = build_module(build_cartan(name), weight, ctx)
    report = commutation_reports(V, subsets)
    assert "T_r_star" in report and "T_w0_T_r" in report
    assert max(report.values()) < LIMIT


def test_s_zero_is_a_sign(ctx):
    V = build_module(build_cartan("B2"), (0, 1), ctx)
    S0 = torus_operator(V, s_zero(V.datum))
    assert la.residual(la.matmul(S0, S0), V.identity()) < LIMIT
