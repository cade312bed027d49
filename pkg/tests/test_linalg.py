from fractions import Fraction

import pytest
from mpmath import mp, mpf

from qgroup import linalg as la
from qgroup.errors import PrecisionError, SolveError
from qgroup.scalars import ScalarContext, is_small, root_of_unity


def test_context_reads_q_exactly():
    assert ScalarContext("0.5").q == Fraction(1, 2)
    assert ScalarContext("3/7").q == Fraction(3, 7)


@pytest.mark.parametrize("q", ["1", "0", "-1/2"])
def test_context_rejects_bad_q(q):
    with pytest.raises(ValueError):
        ScalarContext(q)


def test_context_rejects_tol_below_round_off():
    with pytest.raises(PrecisionError):
        ScalarContext("1/2", 64, 1e-60)


def test_context_activate_sets_precision():
    ScalarContext("1/2", 200, 1e-40).activate()
    assert mp.prec == 200


def test_quantum_numbers(ctx):
    assert abs(ctx.qnumber(2) - mpf("2.5")) < ctx.tol_mpf
    assert abs(ctx.qnumber(3) - mpf("5.25")) < ctx.tol_mpf
    assert abs(ctx.bracket(2) - (mp.sqrt(mpf(2)) + 1 / mp.sqrt(mpf(2)))) < ctx.tol_mpf
    assert abs(ctx.qfactorial(3) - mpf("2.5") * mpf("5.25")) < ctx.tol_mpf


def test_root_of_unity_exact_quarters():
    assert root_of_unity(Fraction(1, 2)) == -1
    assert root_of_unity(Fraction(3, 2)) == -1
    assert root_of_unity(Fraction(1, 4)) == mp.mpc(0, 1)
    assert root_of_unity(2) == 1


def test_is_small_three_way(ctx):
    assert is_small(mpf("1e-50"), 1, ctx) is True
    assert is_small(mpf("1e-5"), 1, ctx) is False
    with pytest.raises(PrecisionError):
        is_small(mpf("1e-30"), 1, ctx)


def test_solve_and_inverse(ctx):
    a = la.to_mp([[2, 1, 0], [1, 3, 1], [0, 1, 4]])
    b = la.to_mp([1, 2, 3])
    x = la.solve(a, b, ctx)
    assert la.residual(la.matvec(a, x), b) < ctx.tol_mpf
    assert la.residual(la.matmul(a, la.inverse(a, ctx)), la.eye(3)) < ctx.tol_mpf


def test_solve_singular_raises(ctx):
    a = la.to_mp([[1, 2], [2, 4]])
    with pytest.raises(SolveError):
        la.solve(a, la.to_mp([1, 1]), ctx)


def test_rank_and_nullspace(ctx):
    a = la.to_mp([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert la.rank(a, ctx) == 2
    kernel = la.nullspace(a, ctx)
    assert len(kernel) == 1
    assert la.norm(la.matvec(a, kernel[0])) < ctx.tol_mpf


def test_round_off_matrix_has_rank_zero(ctx):
    a = la.to_mp([[mpf("-4.9e-61"), 0], [0, mpf("3e-62")]])
    assert la.rank(a, ctx) == 0
    assert len(la.nullspace(a, ctx)) == 2
    basis, accepted = la.gram_schmidt([la.vector([mpf("2e-61"), 0])], ctx)
    assert basis == [] and accepted == []

def test_gram_schmidt_drops_dependent_vectors(ctx):
    vectors = [la.to_mp([1, 1, 0]), la.to_mp([2, 2, 0]), la.to_mp([0, 1, 1])]
    basis, accepted = la.gram_schmidt(vectors, ctx)
    assert accepted == [0, 2]
    for i, u in enumerate(basis):
        for j, v in enumerate(basis):
            expected = 1 if i == j else 0
            assert abs(la.inner(u, v) - expected) < ctx.tol_mpf


def test_kron_shape_and_entries():
    a = la.to_mp([[1, 2], [3, 4]])
    b = la.eye(3)
    k = la.kron(a, b)
    assert k.shape == (6, 6)
    assert k[3, 0] == 3
    assert k[3, 3] == 4
    assert k[1, 4] == 2
    assert k[1, 3] == 0


def test_residual_is_relative():
    a = la.to_mp([[1000, 0], [0, 0]])
    b = la.to_mp([[1001, 0], [0, 0]])
    assert abs(la.residual(a, b) - mpf(1) / 1001) < mpf("1e-20")


def test_dagger_conjugates():
    a = la.to_mp([[complex(1, 2), 0], [3, 0]])
    d = la.dagger(a)
    assert d[0, 0] == mp.mpc(1, -2)
    assert d[0, 1] == 3
