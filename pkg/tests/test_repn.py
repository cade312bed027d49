from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from qgroup import linalg as la
from qgroup.cartan import build_cartan
from qgroup.errors import CartanError, ModuleMismatchError
from qgroup.repn import (
    ElementFamily,
    build_module,
    check_relations,
    contragredient,
    decompose,
    find_intertwiner,
    isotypic_projector,
    monomial_span,
    tensor,
    twist_module,
)
from qgroup.scalars import ScalarContext

LIMIT = 1e-35


@pytest.mark.parametrize("n", [0, 1, 2, 3, 5])
def test_rank_one_modules(ctx, n):
    M = build_module(build_cartan("A1"), (n,), ctx)
    assert M.dim == n + 1
    assert check_relations(M)["max"] < LIMIT


@pytest.mark.parametrize("name", ["A2", "B2", "C2", "G2", "A3"])
def test_fundamental_modules_satisfy_relations(ctx, name):
    datum = build_cartan(name)
    for j in datum.index_set:
        w = tuple(1 if k == j else 0 for k in datum.index_set)
        M = build_module(datum, w, ctx)
        assert M.dim == datum.weyl_dim(w)
        report = check_relations(M)
        assert "adjoint" in report
        assert report["max"] < LIMIT


def test_f4_first_fundamental(ctx):
    datum = build_cartan("F4")
    M = build_module(datum, (1, 0, 0, 0), ctx)
    assert M.dim == 26
    assert len(M.weight_blocks()[(0, 0, 0, 0)]) == 2
    assert check_relations(M)["max"] < LIMIT


@pytest.mark.parametrize("name", ["A1", "A2", "A3", "B2", "C2", "G2", "D4", "F4"])
def test_fundamental_modules_build_at_default_precision(name):
    ctx = ScalarContext().activate()
    datum = build_cartan(name)
    for j in datum.index_set:
        w = tuple(1 if k == j else 0 for k in datum.index_set)
        if datum.weyl_dim(w) > 28:
            continue
        M = build_module(datum, w, ctx)
        assert M.dim == datum.weyl_dim(w)
        assert check_relations(M)["max"] < ctx.tol_mpf


@pytest.mark.slow
def test_f4_adjoint_module(ctx):
    M = build_module(build_cartan("F4"), (0, 0, 0, 1), ctx)
    assert M.dim == 52
    assert check_relations(M)["max"] < LIMIT


def test_modules_are_cached(ctx):
    datum = build_cartan("A2")
    assert build_module(datum, (1, 0), ctx) is build_module(datum, [1, 0], ctx)


def test_non_dominant_weight_rejected(ctx):
    with pytest.raises(CartanError):
        build_module(build_cartan("A2"), (1, -1), ctx)


def test_tensor_decomposition_of_two_spin_halves(ctx):
    V = build_module(build_cartan("A1"), (1,), ctx)
    VV = tensor(V, V)
    assert VV.dim == 4
    assert check_relations(VV)["max"] < LIMIT
    parts = decompose(VV)
    assert sorted(mu for mu, _ in parts) == [(0,), (2,)]
    assert VV.highest_weights == (((2,), 1), ((0,), 1))
    for _, iota in parts:
        assert la.check_unitary(iota) < LIMIT


def test_isotypic_projector_is_idempotent(ctx):
    V = build_module(build_cartan("A2"), (1, 0), ctx)
    VV = tensor(V, V)
    P = isotypic_projector(VV, (2, 0))
    assert la.residual(la.matmul(P, P), P) < LIMIT
    assert la.rank(P, ctx) == 6


def test_find_intertwiner_commutes_with_generators(ctx):
    datum = build_cartan("A2")
    V = build_module(datum, (1, 0), ctx)
    VV = tensor(V, V)
    J = find_intertwiner(VV, (0, 1))
    W = build_module(datum, (0, 1), ctx)
    for r in datum.index_set:
        assert la.residual(la.matmul(VV.E[r], J), la.matmul(J, W.E[r])) < LIMIT
        assert la.residual(la.matmul(VV.F[r], J), la.matmul(J, W.F[r])) < LIMIT


def test_contragredient_is_a_module(ctx):
    V = build_module(build_cartan("B2"), (0, 1), ctx)
    D = contragredient(V)
    assert not D.unitary
    report = check_relations(D)
    assert "adjoint" not in report
    assert report["max"] < LIMIT


def test_twist_by_diagram_automorphism(ctx):
    datum = build_cartan("A2")
    V = build_module(datum, (1, 0), ctx)
    T = twist_module(V, (1, 0))
    assert T.highest_weights == (((0, 1), 1),)
    assert check_relations(T)["max"] < LIMIT
    assert twist_module(V, (0, 1)) is V


def test_twist_rejects_non_automorphism(ctx):
    V = build_module(build_cartan("B2"), (1, 0), ctx)
    with pytest.raises(CartanError):
        twist_module(V, (1, 0))


def test_tensor_rejects_mixed_contexts(ctx):
    datum = build_cartan("A1")
    V = build_module(datum, (1,), ctx)
    W = build_module(datum, (1,), ScalarContext("1/3", 200, 1e-40))
    with pytest.raises(ModuleMismatchError):
        tensor(V, W)


def test_monomial_span_dimension(ctx):
    V = build_module(build_cartan("A2"), (1, 0), ctx)
    assert len(monomial_span(V, (1, 1))) == 1
    assert len(monomial_span(V, (0, 0))) == 1
    assert monomial_span(V, (2, 0)) == []


def test_element_family_caches_per_module(ctx):
    V = build_module(build_cartan("A1"), (1,), ctx)
    calls = []

    def rule(M):
        calls.append(M.label)
        return M.identity()

    family = ElementFamily("one", rule)
    assert np.array_equal(family.on(V), V.identity())
    family(V)
    assert calls == [V.label]


def test_element_family_cache_is_shared_across_threads(ctx):
    V = build_module(build_cartan("A2"), (1, 0), ctx)
    family = ElementFamily("K2", lambda M: M.K((2, 0)) + M.identity())
    with ThreadPoolExecutor(max_workers=4) as pool:
        results = list(pool.map(lambda _: family.on(V), range(16)))
    assert all(r is results[0] for r in results)
    assert family.on(V) is results[0]
