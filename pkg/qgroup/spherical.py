"""Coideal-invariant vectors, phi-hat images and fixed-module algebra comparisons."""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp

from . import linalg as la
from .cartan import CartanDatum
from .diagrams import SignFunction, fundamental_spherical
from .errors import ModuleMismatchError
from .kmatrix import CoidealData, KMatrixBundle, character_chi, coideal_generators, flag_family
from .repn import ElementFamily, Module, build_module, isotypic_projector, tensor, twist_module
from .rmat import r_matrix, r_twisted_21
from .scalars import ScalarContext

logger = logging.getLogger(__name__)


@dataclass
class InvariantReport:
    weight: Optional[Tuple]
    dim_invariants: int
    basis: List[np.ndarray] = field(default_factory=list, repr=False)


def invariant_vectors(cd: CoidealData, M: Module) -> InvariantReport:
    """Joint kernel of B_r, E_s, F_s and K_omega - 1 (Theta omega = omega)."""
    M.require_unitary("invariant_vectors")
    gens = coideal_generators(cd, M)
    ops = [*gens["B"].values(), *gens["E"].values(), *gens["F"].values()]
    ops += [K - M.identity() for K in gens["K"].values()]
    if ops:
        kernel = la.nullspace(np.concatenate(ops, axis=0), M.ctx)
    else:
        kernel = [la.unit_vector(M.dim, i) for i in range(M.dim)]
    basis, _ = la.gram_schmidt(kernel, M.ctx) if kernel else ([], [])
    weight = M.highest_weight if M.is_irreducible else None
    logger.debug("%s has %d coideal-invariant vectors", M.label, len(basis))
    return InvariantReport(weight, len(basis), basis)


# --- spherical weights -------------------------------------------------------------------


def dominant_weights(datum: CartanDatum, max_height: int) -> List[Tuple[int, ...]]:
    """Dominant weights with coordinate sum at most max_height, by height."""
    out = [w for w in product(range(max_height + 1), repeat=datum.rank) if sum(w) <= max_height]
    return sorted(out, key=lambda w: (sum(w), w))


def in_spherical_cone(weight: Sequence[int], generators: Sequence[Tuple[int, ...]]) -> bool:
    """Whether weight is an N-combination of the given weights."""
    gens = tuple(tuple(g) for g in generators if any(g))

    @lru_cache(maxsize=None)
    def reach(w: Tuple[int, ...]) -> bool:
        if not any(w):
            return True
        return any(reach(tuple(a - b for a, b in zip(w, g))) for g in gens
                   if all(a >= b for a, b in zip(w, g)))

    return reach(tuple(weight))


def spherical_scan(cd: CoidealData, ctx: ScalarContext, max_height: int) -> List[Dict[str, object]]:
    """m_{q,varpi} for every dominant varpi of bounded height, against the spherical cone."""
    cone = list(fundamental_spherical(cd.satake).values())
    rows = []
    for w in dominant_weights(cd.datum, max_height):
        M = build_module(cd.datum, w, ctx)
        found = invariant_vectors(cd, M).dim_invariants
        expected = 1 if in_spherical_cone(w, cone) else 0
        rows.append({"weight": list(w), "multiplicity": found, "expected": expected, "agrees": found == expected})
    logger.info("Spherical scan of %s up to height %d: %d weights", cd.satake.label(), max_height, len(rows))
    return rows


def wj_component_check(cd: CoidealData, ctx: ScalarContext, m: int = 1) -> Dict[str, object]:
    """Component of w^{(x) m} in V_{varpi_{2m}}, with w the invariant vector of V_{varpi_1}^{(x) 2}."""
    datum = cd.datum
    if 2 * m > datum.rank:
        raise ModuleMismatchError(f"varpi_{2 * m} does not exist in rank {datum.rank}.")
    V = build_module(datum, tuple(1 if k == 0 else 0 for k in datum.index_set), ctx)
    VV = tensor(V, V)
    report = invariant_vectors(cd, VV)
    if report.dim_invariants != 1:
        return {"invariants": report.dim_invariants, "norm": mp.zero, "passed": False}
    w = report.basis[0]
    total, vec = VV, w
    for _ in range(m - 1):
        total = tensor(total, VV)
        vec = la.kron_vec(vec, w)
    target = tuple(1 if k == 2 * m - 1 else 0 for k in datum.index_set)
    size = la.norm(la.matvec(isotypic_projector(total, target), vec))
    return {"invariants": 1, "norm": size, "passed": size > mp.sqrt(ctx.tol_mpf)}


# --- phi-hat ------------------------------------------------------------------------------------


def extremal_vector(V: Module, weight: Sequence) -> np.ndarray:
    idx = V.weight_blocks().get(tuple(weight))
    if not idx or len(idx) != 1:
        raise ModuleMismatchError(f"Weight {tuple(weight)} is not a one-dimensional weight of {V.label}.")
    return la.unit_vector(V.dim, idx[0])


def _contract(op: np.ndarray, m: int, n: int, xi: np.ndarray, eta: np.ndarray, leg: int) -> np.ndarray:
    """(<xi| . |eta> on one leg (x) id) of an operator on a (m) (x) b (n)."""
    blocks = op.reshape(m, n, m, n)
    out = la.zeros(n if leg == 0 else m)
    for a in np.flatnonzero(xi):
        ca = mp.conj(xi[a])
        for b in np.flatnonzero(eta):
            block = blocks[a, :, b, :] if leg == 0 else blocks[:, a, :, b]
            out = out + (ca * eta[b]) * block
    return out


def phihat_operator(K: ElementFamily, sigma: Sequence[int], V: Module, W: Module) -> np.ndarray:
    """R_{sigma,21} (K (x) 1) R on V (x) W."""
    return la.mdot(r_twisted_21(V, W, sigma), la.kron(K.on(V), W.identity()), r_matrix(V, W).R)


def phihat_image(bundle: KMatrixBundle, V: Module, xi: np.ndarray, eta: np.ndarray, W: Module) -> np.ndarray:
    """phi-hat of the coefficient U(xi, eta) of V, acting on W."""
    op = phihat_operator(bundle.modified, bundle.satake.tau_nu, V, W)
    return _contract(op, V.dim, W.dim, xi, eta, leg=0)


def phihat_family(K: ElementFamily, sigma: Sequence[int], V: Module, xi: np.ndarray,
                  eta: np.ndarray) -> ElementFamily:
    return ElementFamily("phi^", lambda W: _contract(phihat_operator(K, sigma, V, W), V.dim, W.dim, xi, eta, 0))


def phi_hat_raw(bundle: KMatrixBundle, V: Module, xi: np.ndarray, eta: np.ndarray, W: Module) -> np.ndarray:
    """(id (x) U(xi, eta))(R_{tau tau_0,21} (1 (x) K) R) on W, with the raw K on V."""
    sigma = bundle.satake.tau_nu
    op = la.mdot(r_twisted_21(W, V, sigma), la.kron(W.identity(), bundle.raw.on(V)), r_matrix(W, V).R)
    return _contract(op, W.dim, V.dim, xi, eta, leg=1)


def _image_blocks(op: np.ndarray, m: int, n: int, leg: int) -> List[np.ndarray]:
    units = [la.unit_vector(m if leg == 0 else n, i) for i in range(m if leg == 0 else n)]
    return [_contract(op, m, n, a, b, leg) for a in units for b in units]


def _proportional(image: np.ndarray, target: np.ndarray):
    """(t, residual) for the best fit image ~ t target."""
    t = la.inner(target.reshape(-1), image.reshape(-1)) / la.inner(target.reshape(-1), target.reshape(-1))
    return t, la.residual(image, la.scalar_multiple(target, t))


def cartan_part_check(bundle: KMatrixBundle, varpi: Sequence[int], W: Module) -> Dict[str, object]:
    """Phi-hat of k_varpi = U(eta_{w_0 varpi}, xi_{w_X varpi}) against K_{tau varpi + Theta tau varpi}."""
    s, datum, ctx = bundle.satake, bundle.coideal.datum, W.ctx
    V = build_module(datum, varpi, ctx)
    low = extremal_vector(V, datum.apply_word(datum.longest_word(), varpi))
    mid = extremal_vector(V, datum.apply_word(s.w_X, varpi))
    image = phi_hat_raw(bundle, V, low, mid, W)
    tv = datum.permute_weight(s.tau, varpi)
    t, res = _proportional(image, W.K(tuple(a + b for a, b in zip(tv, s.theta(tv)))))
    return {"t": t, "residual": res, "passed": abs(t) > mp.sqrt(ctx.tol_mpf) and res < mp.sqrt(ctx.tol_mpf)}


def borel_part_check(bundle: KMatrixBundle, r: int, W: Module) -> Dict[str, object]:
    """Phi-hat of f_{Lambda_r, r} against B_{tau tau_0(r)}, Lambda_r = varpi_r - Theta varpi_r."""
    s, datum, ctx = bundle.satake, bundle.coideal.datum, W.ctx
    unit = tuple(1 if k == r else 0 for k in datum.index_set)
    lam = tuple(int(a - b) for a, b in zip(unit, s.theta(unit)))
    V = build_module(datum, lam, ctx)
    low = la.matvec(V.E[r], extremal_vector(V, datum.apply_word(datum.longest_word(), lam)))
    mid = extremal_vector(V, datum.apply_word(s.w_X, lam))
    image = phi_hat_raw(bundle, V, low, mid, W)
    target = coideal_generators(bundle.coideal, W)["B"][s.tau_nu[r]]
    t, res = _proportional(image, target)
    return {"t": t, "residual": res, "passed": abs(t) > mp.sqrt(ctx.tol_mpf) and res < mp.sqrt(ctx.tol_mpf)}


def flag_support(datum: CartanDatum, eps: SignFunction) -> Tuple[int, ...]:
    """S = tau0({r : eps_r = 1}): the nodes whose E_r and F_r commute with the flag K."""
    return tuple(sorted(datum.tau0[r] for r, v in enumerate(eps.values) if v == 1))


def flag_phihat_check(datum: CartanDatum, eps: SignFunction, varpi: Sequence[int], W: Module) -> object:
    """Residual of phi-hat(U(xi, xi)) = K_{-2 w_S varpi} for xi of weight w_S varpi."""
    V = build_module(datum, varpi, W.ctx)
    w_S = datum.apply_word(datum.longest_word(flag_support(datum, eps)), datum.apply_word(datum.longest_word(), varpi))
    xi = extremal_vector(V, w_S)
    op = phihat_operator(flag_family(datum, eps), tuple(datum.index_set), V, W)
    image = _contract(op, V.dim, W.dim, xi, xi, leg=0)
    return la.residual(image, W.K(tuple(-2 * x for x in w_S)))


def image_range_check(bundle: KMatrixBundle, varpi: Sequence[int], ctx: ScalarContext) -> Dict[str, object]:
    """<eta_{w_0 varpi}, K xi_varpi> for varpi vanishing on X."""
    datum, s = bundle.coideal.datum, bundle.satake
    if any(varpi[x] for x in s.X):
        raise ModuleMismatchError(f"Weight {tuple(varpi)} does not vanish on X.")
    V = build_module(datum, varpi, ctx)
    low = extremal_vector(V, datum.apply_word(datum.longest_word(), varpi))
    high = extremal_vector(V, varpi)
    value = character_chi(bundle, V, low, high)
    return {"value": value, "passed": abs(value) > mp.sqrt(ctx.tol_mpf)}


def dual_coideal_check(K: ElementFamily, sigma: Sequence[int], Y: ElementFamily, W1: Module, W2: Module):
    """Residual of (1 (x) K) Delta(Y) = (id (x) sigma)(Delta(Y)) (1 (x) K) on W1 (x) W2."""
    K2 = la.kron(W1.identity(), K.on(W2))
    lhs = la.matmul(K2, Y.on(tensor(W1, W2)))
    rhs = la.matmul(Y.on(tensor(W1, twist_module(W2, sigma))), K2)
    return la.residual(lhs, rhs)


# --- algebra comparisons ---------------------------------------------------------------------------


def algebra_span(generators: Sequence[np.ndarray], ctx: ScalarContext, unital: bool = True) -> List[np.ndarray]:
    """Orthonormal (Frobenius) basis of the *-algebra generated by the operators."""
    if not generators:
        return []
    shape = generators[0].shape
    pool = list(generators) + [la.dagger(g) for g in generators]
    if unital:
        pool.append(la.eye(shape[0]))
    basis, _ = la.gram_schmidt([g.reshape(-1) for g in pool], ctx)
    while True:
        mats = [b.reshape(shape) for b in basis]
        products = [la.matmul(a, b).reshape(-1) for a in mats for b in mats]
        grown, _ = la.gram_schmidt(basis + products, ctx)
        if len(grown) == len(basis):
            return [b.reshape(shape) for b in basis]
        basis = grown


def span_gap(A: Sequence[np.ndarray], B: Sequence[np.ndarray]):
    """Largest distance from a unit vector of either orthonormal span to the other span."""
    def one_way(src, dst):
        worst = mp.zero
        flat = [d.reshape(-1) for d in dst]
        for a in src:
            v = a.reshape(-1)
            rest = v - sum((la.inner(d, v) * d for d in flat), la.zero_vector(len(v)))
            worst = max(worst, la.norm(rest))
        return worst
    return max(one_way(A, B), one_way(B, A))


def coideal_images(cd: CoidealData, W: Module) -> List[np.ndarray]:
    gens = coideal_generators(cd, W)
    return [*gens["B"].values(), *gens["E"].values(), *gens["F"].values(), *gens["K"].values()]


def levi_images(datum: CartanDatum, S: Sequence[int], W: Module) -> List[np.ndarray]:
    """K_{varpi_r} for all r with E_r, F_r for r in S."""
    ops = [W.K(tuple(1 if k == r else 0 for k in datum.index_set)) for r in datum.index_set]
    for r in S:
        ops += [W.E[r], W.F[r]]
    return ops


def symmetric_span_check(bundle: KMatrixBundle, coefficient_weights: Sequence[Sequence[int]],
                         W: Module) -> Dict[str, object]:
    """Algebra of raw phi-hat images on W against the algebra of the coideal generators."""
    ctx, datum, sigma = W.ctx, bundle.coideal.datum, bundle.satake.tau_nu
    images = []
    for varpi in coefficient_weights:
        V = build_module(datum, varpi, ctx)
        op = la.mdot(r_twisted_21(W, V, sigma), la.kron(W.identity(), bundle.raw.on(V)), r_matrix(W, V).R)
        images += _image_blocks(op, W.dim, V.dim, leg=1)
    left = algebra_span(images, ctx)
    right = algebra_span(coideal_images(bundle.coideal, W), ctx)
    gap = span_gap(left, right)
    return {"dim_images": len(left), "dim_coideal": len(right), "gap": gap}


def flag_span_check(datum: CartanDatum, eps: SignFunction, coefficient_weights: Sequence[Sequence[int]],
                    W: Module) -> Dict[str, object]:
    """Algebra of flag phi-hat images on W against the Levi algebra of S."""
    ctx = W.ctx
    family = flag_family(datum, eps)
    images = []
    for varpi in coefficient_weights:
        V = build_module(datum, varpi, ctx)
        images += _image_blocks(phihat_operator(family, tuple(datum.index_set), V, W), V.dim, W.dim, leg=0)
    left = algebra_span(images, ctx)
    right = algebra_span(levi_images(datum, flag_support(datum, eps), W), ctx)
    gap = span_gap(left, right)
    return {"dim_images": len(left), "dim_levi": len(right), "gap": gap}
