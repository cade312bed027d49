"""Peter-Weyl coefficient arithmetic.

A coefficient is stored per irreducible V_varpi as a matrix A with
f(x) = sum_{a,b} A[a, b] pi_varpi(x)[a, b], so U(xi, eta) has A = conj(xi) eta^T.
Products go through the isotypic decomposition of V_varpi (x) V_varpi'.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp

from . import linalg as la
from .cartan import CartanDatum, vadd
from .diagrams import fundamental_spherical
from .errors import ModuleMismatchError, TruncationError
from .kmatrix import CoidealData, KMatrixBundle
from .repn import ElementFamily, Module, build_module, contragredient, decompose, find_intertwiner, tensor, twist_module
from .scalars import ScalarContext

logger = logging.getLogger(__name__)


@dataclass
class Coefficient:
    datum: CartanDatum
    ctx: ScalarContext
    blocks: Dict[Tuple[int, ...], np.ndarray] = field(default_factory=dict)
    window: Optional[int] = None

    @classmethod
    def unit(cls, datum: CartanDatum, ctx: ScalarContext, window: Optional[int] = None) -> "Coefficient":
        zero = (0,) * datum.rank
        return cls(datum, ctx, {zero: la.eye(1)}, window)

    @classmethod
    def from_vectors(cls, V: Module, xi: np.ndarray, eta: np.ndarray, scale=1,
                     window: Optional[int] = None) -> "Coefficient":
        """scale U(xi, eta) for vectors of the built module V."""
        A = la.zeros(V.dim)
        for a in np.flatnonzero(xi):
            for b in np.flatnonzero(eta):
                A[a, b] = scale * mp.conj(xi[a]) * eta[b]
        return cls(V.datum, V.ctx, {V.highest_weight: A}, window).pruned()

    def pruned(self) -> "Coefficient":
        tol = self.ctx.tol_mpf
        self.blocks = {w: A for w, A in self.blocks.items() if la.norm(A) > tol}
        return self

    def __add__(self, other: "Coefficient") -> "Coefficient":
        out = dict(self.blocks)
        for w, A in other.blocks.items():
            out[w] = out[w] + A if w in out else A
        return Coefficient(self.datum, self.ctx, out, self.window).pruned()

    def scaled(self, s) -> "Coefficient":
        return Coefficient(self.datum, self.ctx, {w: la.scalar_multiple(A, s) for w, A in self.blocks.items()},
                           self.window).pruned()

    def components(self) -> List[Tuple[int, ...]]:
        return sorted(self.blocks)

    def component_norm(self, weight: Sequence[int]):
        A = self.blocks.get(tuple(weight))
        return mp.zero if A is None else la.norm(A)

    def evaluate(self, family: ElementFamily):
        """f(x) for x given as an element family."""
        total = mp.zero
        for w, A in self.blocks.items():
            X = family.on(build_module(self.datum, w, self.ctx))
            total += mp.fsum(A[i, j] * X[i, j] for i, j in zip(*np.nonzero(A)) if X[i, j])
        return total


def counit(f: Coefficient):
    """epsilon(f) = f(1) = sum of traces."""
    return mp.fsum(mp.fsum(A[i, i] for i in range(A.shape[0])) for A in f.blocks.values())


def coeff_product(a: Coefficient, b: Coefficient) -> Coefficient:
    """Product in O_q(U): the functional of a (x) b restricted through decompose(V (x) V')."""
    if a.datum != b.datum or a.ctx != b.ctx:
        raise ModuleMismatchError("Coefficients live on different Cartan data or scalar contexts.")
    window = min((w for w in (a.window, b.window) if w is not None), default=None)
    out: Dict[Tuple[int, ...], np.ndarray] = {}
    for mu, A in a.blocks.items():
        for nu, B in b.blocks.items():
            if window is not None and sum(vadd(mu, nu)) > window:
                raise TruncationError(f"Product of components {mu} and {nu} leaves the window of height {window}.")
            V, W = build_module(a.datum, mu, a.ctx), build_module(a.datum, nu, a.ctx)
            AB = la.kron(A, B)
            for lam, iota in decompose(tensor(V, W)):
                block = la.mdot(la.transpose(iota), AB, la.conj(iota))
                out[lam] = out[lam] + block if lam in out else block
    return Coefficient(a.datum, a.ctx, out, window).pruned()


def coeff_power(f: Coefficient, n: int) -> Coefficient:
    out = Coefficient.unit(f.datum, f.ctx, f.window)
    for _ in range(n):
        out = coeff_product(out, f)
    return out


# --- phi-images -------------------------------------------------------------------------------


def _dual_intertwiner(V: Module, sigma: Sequence[int]) -> Tuple[Module, np.ndarray, np.ndarray]:
    """(U, J, J^-1) with U built and J: U -> sigma-twisted contragredient of V an intertwiner."""
    datum = V.datum
    D = twist_module(contragredient(V), sigma)
    top = max(D.weight_blocks(), key=lambda w: datum.height(w))
    U = build_module(datum, top, V.ctx)
    J = find_intertwiner(D, top)
    return U, J, la.inverse(J, V.ctx)


def coeff_star(f: Coefficient) -> Coefficient:
    """f^*(x) = conj(f(S(x)^*)); a block A on V becomes conj(A) on V^*, carried to the built dual."""
    ident = tuple(f.datum.index_set)
    out = Coefficient(f.datum, f.ctx, window=f.window)
    for w, A in f.blocks.items():
        U, J, J_inv = _dual_intertwiner(build_module(f.datum, w, f.ctx), ident)
        block = la.mdot(la.transpose(J), la.conj(A), la.transpose(J_inv))
        out = out + Coefficient(f.datum, f.ctx, {U.highest_weight: block}, f.window)
    return out


def phi_image(bundle: KMatrixBundle, V: Module, xi: np.ndarray, eta: np.ndarray) -> Coefficient:
    """phi(Z(xi, eta))(Y) = <xi, S(tau(Y_(1))) K Y_(2) eta> as a coefficient."""
    sigma = bundle.satake.tau_nu
    U, J, J_inv = _dual_intertwiner(V, sigma)
    K = bundle.modified.on(V)
    top_U, top_V = U.highest_weight, V.highest_weight
    conj_xi = la.conj(xi)
    total: Optional[Coefficient] = None
    for k in range(V.dim):
        row = K[k]
        if not np.count_nonzero(row):
            continue
        # pi_V(S tau y)[i, k] = pi_D(y)[k, i], read through J
        A_D = la.zeros(V.dim)
        A_D[k, :] = conj_xi
        A_U = la.mdot(la.transpose(J), A_D, la.transpose(J_inv))
        A_V = la.zeros(V.dim)
        for l in np.flatnonzero(row):
            for j in np.flatnonzero(eta):
                A_V[l, j] = row[l] * eta[j]
        term = coeff_product(Coefficient(V.datum, V.ctx, {top_U: A_U}), Coefficient(V.datum, V.ctx, {top_V: A_V}))
        total = term if total is None else total + term
    return total if total is not None else Coefficient(V.datum, V.ctx)


def phi_spectral_components(bundle: KMatrixBundle, varpi: Sequence[int], ctx: ScalarContext) -> List[Tuple[int, ...]]:
    """Isotypic types mu reached by phi(Z(e_i, e_j)) over all basis pairs of V_varpi."""
    V = build_module(bundle.coideal.datum, varpi, ctx)
    gate = mp.sqrt(ctx.tol_mpf)
    found = set()
    units = [la.unit_vector(V.dim, i) for i in range(V.dim)]
    for xi in units:
        for eta in units:
            image = phi_image(bundle, V, xi, eta)
            found.update(w for w in image.blocks if image.component_norm(w) > gate)
    logger.info("phi-image of V%s reaches %s", tuple(varpi), sorted(found))
    return sorted(found)


def generation_check(cd: CoidealData, ctx: ScalarContext, max_power: int) -> Dict[str, object]:
    """Powers of a spherical coefficient U(v, xi_mu) reach n mu for n = 1..max_power."""
    from .spherical import invariant_vectors

    mu = next(iter(fundamental_spherical(cd.satake).values()))
    V = build_module(cd.datum, mu, ctx)
    report = invariant_vectors(cd, V)
    if report.dim_invariants != 1:
        return {"reached": [], "passed": False}
    f = Coefficient.from_vectors(V, report.basis[0], la.unit_vector(V.dim, 0))
    gate = mp.sqrt(ctx.tol_mpf)
    reached, power = [], Coefficient.unit(cd.datum, ctx)
    for n in range(1, max_power + 1):
        power = coeff_product(power, f)
        if power.component_norm(tuple(n * x for x in mu)) > gate:
            reached.append(n)
    return {"reached": reached, "passed": reached == list(range(1, max_power + 1))}
