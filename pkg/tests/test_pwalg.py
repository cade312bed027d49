import random

import pytest
from mpmath import mp

from qgroup import linalg as la
from qgroup.cartan import build_cartan
from qgroup.diagrams import admissible_sign, diagram_from_text
from qgroup.errors import ModuleMismatchError, TruncationError
from qgroup.kmatrix import coideal_data, modified_k
from qgroup.pwalg import (
    Coefficient,
    coeff_power,
    coeff_product,
    coeff_star,
    counit,
    generation_check,
    phi_spectral_components,
)
from qgroup.repn import build_module, generator_family, weight_family

LIMIT = 1e-35


@pytest.fixture
def a1_vector(ctx):
    V = build_module(build_cartan("A1"), (1,), ctx)
    return V, la.unit_vector(2, 0), la.unit_vector(2, 1)


def test_unit_coefficient(ctx):
    one = Coefficient.unit(build_cartan("A2"), ctx)
    assert one.components() == [(0, 0)]
    assert counit(one) == 1


def test_evaluate_matrix_coefficient(a1_vector, ctx):
    V, top, low = a1_vector
    f = Coefficient.from_vectors(V, top, top)
    assert abs(f.evaluate(weight_family((1,))) - V.K((1,))[0, 0]) < LIMIT
    assert abs(Coefficient.from_vectors(V, top, low).evaluate(generator_family("E", 0)) - V.E[0][0, 1]) < LIMIT


def test_product_is_multiplicative_on_group_likes(a1_vector):
    V, top, low = a1_vector
    f = Coefficient.from_vectors(V, top, top)
    g = Coefficient.from_vectors(V, low, low)
    K = weight_family((1,))
    fg = coeff_product(f, g)
    assert set(fg.components()) <= {(0,), (2,)}
    assert abs(fg.evaluate(K) - f.evaluate(K) * g.evaluate(K)) < LIMIT
    assert abs(counit(fg) - counit(f) * counit(g)) < LIMIT


def test_sums_and_scaling(a1_vector):
    V, top, low = a1_vector
    f = Coefficient.from_vectors(V, top, top)
    assert counit(f + f.scaled(2)) == 3
    assert (f + f.scaled(-1)).components() == []


def test_power_and_window(a1_vector):
    V, top, _ = a1_vector
    f = Coefficient.from_vectors(V, top, top, window=2)
    assert (2,) in coeff_power(f, 2).components()
    with pytest.raises(TruncationError):
        coeff_power(f, 3)


def test_mixed_algebras_rejected(a1_vector, ctx):
    V, top, _ = a1_vector
    other = Coefficient.unit(build_cartan("A2"), ctx)
    with pytest.raises(ModuleMismatchError):
        coeff_product(Coefficient.from_vectors(V, top, top), other)


def test_spherical_coefficient_generates(ctx):
    cd = coideal_data(diagram_from_text("g=A1; X=; tau=id"))
    found = generation_check(cd, ctx, 3)
    assert found["reached"] == [1, 2, 3]
    assert found["passed"]


def test_phi_image_stays_in_the_square(ctx):
    s = diagram_from_text("g=A1; X=; tau=id")
    bundle = modified_k(coideal_data(s), admissible_sign(s))
    found = phi_spectral_components(bundle, (1,), ctx)
    assert (0,) in found
    assert set(found) <= {(0,), (2,)}


def _random_coefficient(V, rng):
    A = la.zeros(V.dim)
    for a in range(V.dim):
        for b in range(V.dim):
            A[a, b] = mp.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
    return Coefficient(V.datum, V.ctx, {V.highest_weight: A})


def _distance(f, g):
    diff = f + g.scaled(-1)
    return max((la.norm(A) for A in diff.blocks.values()), default=0)


@pytest.fixture
def spin_triple(a1_vector):
    V = a1_vector[0]
    rng = random.Random(7)
    return [_random_coefficient(V, rng) for _ in range(3)]


def test_product_is_associative(spin_triple):
    a, b, c = spin_triple
    left = coeff_product(coeff_product(a, b), c)
    right = coeff_product(a, coeff_product(b, c))
    assert set(left.components()) <= {(1,), (3,)}
    assert _distance(left, right) < LIMIT


def test_product_of_spin_coefficients_stays_in_the_square(spin_triple):
    a, b, _ = spin_triple
    assert set(coeff_product(a, b).components()) <= {(0,), (2,)}


def test_counit_is_multiplicative(spin_triple, ctx):
    a, b, _ = spin_triple
    assert abs(counit(coeff_product(a, b)) - counit(a) * counit(b)) < LIMIT
    W = build_module(build_cartan("A1"), (2,), ctx)
    c = _random_coefficient(W, random.Random(11))
    assert abs(counit(coeff_product(a, c)) - counit(a) * counit(c)) < LIMIT


def test_star_reverses_products(spin_triple):
    a, b, _ = spin_triple
    assert _distance(coeff_star(coeff_product(a, b)), coeff_product(coeff_star(b), coeff_star(a))) < LIMIT


def test_star_is_an_antilinear_involution(spin_triple):
    a, b, _ = spin_triple
    assert _distance(coeff_star(coeff_star(a)), a) < LIMIT
    assert abs(counit(coeff_star(a)) - mp.conj(counit(a))) < LIMIT
    s = mp.mpc(0.5, 2)
    assert _distance(coeff_star((a + b).scaled(s)), (coeff_star(a) + coeff_star(b)).scaled(mp.conj(s))) < LIMIT


def test_star_of_a_diagonal_coefficient(a1_vector):
    V, top, low = a1_vector
    # U(xi, xi)^* evaluated at K is U(xi, xi)(K^-1)
    f = Coefficient.from_vectors(V, top, top)
    K = weight_family((1,))
    assert abs(coeff_star(f).evaluate(K) - f.evaluate(weight_family((-1,)))) < LIMIT


def test_phi_image_contains_the_trivial_type(ctx):
    s = diagram_from_text("g=A2; X=; tau=(1 2)")
    bundle = modified_k(coideal_data(s), admissible_sign(s))
    assert (0, 0) in phi_spectral_components(bundle, (1, 0), ctx)


@pytest.mark.slow
def test_spin_square_of_b2_reaches_the_vector_type(ctx):
    s = diagram_from_text("g=B2; X=2; tau=id")
    bundle = modified_k(coideal_data(s), admissible_sign(s))
    found = phi_spectral_components(bundle, (0, 1), ctx)
    assert (0, 0) in found
    assert (1, 0) in found
    assert set(found) <= {(0, 0), (1, 0), (0, 2)}
