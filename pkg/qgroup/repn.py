"""Unitary highest-weight modules of U_q(u) and operations on them.

A ``Module`` stores the generator actions ``E[r]``, ``F[r]`` in a weight
basis; ``K_omega`` is always diagonal and computed from the weights.  On a
unitary module the basis is orthonormal and ``E_r^* = F_r K_r``.
"""
import logging
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import count
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp

from . import linalg as la
from .cartan import CartanDatum, vadd, vsub
from .errors import CartanError, ModuleMismatchError, PrecisionError
from .scalars import ScalarContext, is_small

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class Module:
    datum: CartanDatum
    ctx: ScalarContext
    weights: List[Tuple]
    E: List[np.ndarray]
    F: List[np.ndarray]
    unitary: bool = True
    highest_weights: Optional[Tuple[Tuple[Tuple, int], ...]] = None
    label: str = ""
    recipe: Optional[dict] = field(default=None, repr=False)
    cache: dict = field(default_factory=dict, repr=False)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def remember(self, key, value):
        """Stores value under key unless another caller got there first; returns the stored value."""
        with self.lock:
            return self.cache.setdefault(key, value)

    def memo(self, key, build: Callable[[], object]):
        """Cached value for key; build runs outside the lock."""
        with self.lock:
            if key in self.cache:
                return self.cache[key]
        return self.remember(key, build())

    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def highest_weight(self) -> Tuple:
        """The highest weight of an irreducible module."""
        if not self.highest_weights or len(self.highest_weights) != 1 or self.highest_weights[0][1] != 1:
            raise ModuleMismatchError(f"Module '{self.label}' is not a known irreducible.")
        return self.highest_weights[0][0]

    @property
    def is_irreducible(self) -> bool:
        return bool(self.highest_weights) and len(self.highest_weights) == 1 and self.highest_weights[0][1] == 1

    def weight_blocks(self) -> Dict[Tuple, List[int]]:
        def build():
            blocks = {}
            for i, w in enumerate(self.weights):
                blocks.setdefault(tuple(w), []).append(i)
            return blocks

        return self.memo("weight_blocks", build)

    def K_diag(self, omega) -> list:
        """Eigenvalues q^{(omega, wt)} of K_omega; omega may be a rational weight."""
        return [self.ctx.q_power(self.datum.form(omega, w)) for w in self.weights]

    def K(self, omega) -> np.ndarray:
        key = ("K", tuple(Fraction(x) for x in omega))
        return self.memo(key, lambda: la.diag(self.K_diag(omega)))

    def Kr(self, r: int, power: int = 1) -> np.ndarray:
        return self.K(tuple(power * x for x in self.datum.alpha(r)))

    def identity(self) -> np.ndarray:
        return self.memo("eye", lambda: la.eye(self.dim))

    def require_unitary(self, what: str = "this operation") -> None:
        if not self.unitary:
            raise ModuleMismatchError(f"{what} needs a module with an inner product; '{self.label}' has none.")

    def compatible(self, other: "Module") -> None:
        if self.datum != other.datum or self.ctx != other.ctx:
            raise ModuleMismatchError("Modules have different Cartan data or scalar contexts.")


# --- construction ----------------------------------------------------------------


def _depth_order(datum: CartanDatum, top: Tuple, mu: Tuple):
    return tuple(datum.to_root(vsub(top, mu)))


def build_module(datum: CartanDatum, weight: Sequence[int], ctx: ScalarContext) -> Module:
    """The irreducible unitary module V_weight with an orthonormal weight basis."""
    return _build_module(datum, tuple(int(x) for x in weight), ctx)


@lru_cache(maxsize=128)
def _build_module(datum: CartanDatum, top: Tuple[int, ...], ctx: ScalarContext) -> Module:
    if len(top) != datum.rank or not datum.is_dominant(top):
        raise CartanError(f"Weight {top} is not dominant integral for {datum.name}.")
    ctx.activate()
    n = datum.rank
    weights: List[Tuple] = [top]
    by_weight: Dict[Tuple, List[int]] = {top: [0]}
    f_action: Dict[int, Dict[int, List[Tuple[int, object]]]] = {0: {}}
    e_action: Dict[int, Dict[int, List[Tuple[int, object]]]] = {0: {r: [] for r in range(n)}}
    recipe: Dict[Tuple, dict] = {}
    frontier = [top]
    while frontier:
        candidates_by_mu: Dict[Tuple, List[Tuple[int, int]]] = {}
        for nu in frontier:
            for r in range(n):
                mu = vsub(nu, datum.alpha(r))
                for j in by_weight[nu]:
                    candidates_by_mu.setdefault(mu, []).append((r, j))
        frontier = []
        for mu in sorted(candidates_by_mu, key=lambda w: _depth_order(datum, top, w)):
            cands = sorted(candidates_by_mu[mu])
            gram = _candidate_gram(datum, ctx, mu, cands, f_action, e_action)
            rows, accepted = _orthonormal_rows(gram, ctx)
            if not accepted:
                continue
            bg = la.matmul(rows, gram)
            new = list(range(len(weights), len(weights) + len(accepted)))
            for idx in new:
                weights.append(mu)
                f_action[idx] = {}
                e_action[idx] = {r: [] for r in range(n)}
            by_weight[mu] = new
            for c, (r, j) in enumerate(cands):
                targets = [(new[i], bg[i, c]) for i in range(len(new)) if bg[i, c]]
                f_action[j][r] = f_action[j].get(r, []) + targets
                for u, value in targets:
                    # E_r[j, u] = q^{(alpha_r, wt j)} F_r[u, j]
                    e_action[u][r].append((j, ctx.q_power(datum.form(datum.alpha(r), weights[j])) * value))
            recipe[mu] = {"candidates": cands, "rows": rows}
            frontier.append(mu)
    dim = len(weights)
    expected = datum.weyl_dim(top)
    if dim != expected:
        raise PrecisionError(f"Built dimension {dim} differs from the Weyl dimension {expected} for {top}.")
    E = [la.zeros(dim) for _ in range(n)]
    F = [la.zeros(dim) for _ in range(n)]
    for j, acts in f_action.items():
        for r, targets in acts.items():
            for u, value in targets:
                F[r][u, j] = value
    for u, acts in e_action.items():
        for r, targets in acts.items():
            for j, value in targets:
                E[r][j, u] = value
    label = f"V[{','.join(map(str, top))}]"
    logger.info("Built %s of %s with dimension %d", label, datum.name, dim)
    return Module(datum, ctx, weights, E, F, unitary=True, highest_weights=((top, 1),),
                  label=label, recipe=recipe)


def _candidate_gram(datum, ctx, mu, cands, f_action, e_action) -> np.ndarray:
    """<F_r v, F_s w> for candidates (r, v), (s, w) at weight mu."""
    size = len(cands)
    gram = la.zeros(size)
    for a, (r, v) in enumerate(cands):
        upper = vadd(mu, datum.alpha(r))
        scale = ctx.q_power(-datum.form(datum.alpha(r), upper))
        for b, (s, w) in enumerate(cands):
            if b < a:
                continue
            total = mp.zero
            # <v, F_s E_r w>
            for x, e_val in e_action[w][r]:
                for y, f_val in f_action[x].get(s, []):
                    if y == v:
                        total += e_val * f_val
            if r == s and v == w:
                total += ctx.qnumber(2 * datum.form(datum.alpha(r), upper) / (2 * datum.d[r]), datum.d[r])
            value = scale * total
            if value:
                gram[a, b] = value
                gram[b, a] = value
    return gram


def _orthonormal_rows(gram: np.ndarray, ctx: ScalarContext):
    """Gram-Schmidt on candidates given their Gram matrix; rows express the basis."""
    size = gram.shape[0]
    # parents are orthonormal, so unit scale bounds the round-off of a null candidate
    scale = max([mp.one] + [abs(gram[i, i]) for i in range(size)])
    rows: List[np.ndarray] = []
    accepted = []
    for c in range(size):
        p = [la.inner(row, gram[:, c]) for row in rows]
        res2 = gram[c, c] - mp.fsum(x * x for x in p)
        if is_small(res2, scale, ctx):
            continue
        if res2 < 0:
            raise PrecisionError("Contravariant form is not positive definite.")
        new = la.unit_vector(size, c)
        for x, row in zip(p, rows):
            if x:
                new = new - x * row
        rows.append(new / mp.sqrt(res2))
        accepted.append(c)
    if not rows:
        return la.zeros(0, size), accepted
    return np.array(rows, dtype=object).reshape(len(rows), size), accepted


# --- derived modules ---------------------------------------------------------------


def trivial_module(datum: CartanDatum, ctx: ScalarContext) -> Module:
    return build_module(datum, (0,) * datum.rank, ctx)


def tensor(M: Module, N: Module) -> Module:
    """M (x) N with actions through Delta(E) = E(x)1 + K(x)E, Delta(F) = F(x)K^-1 + 1(x)F."""
    M.compatible(N)
    key = ("tensor", id(N))
    cached = M.cache.get(key)
    if cached is not None and cached.cache["factors"][1] is N:
        return cached
    E, F = [], []
    for r in M.datum.index_set:
        E.append(la.kron(M.E[r], N.identity()) + la.kron(M.Kr(r), N.E[r]))
        F.append(la.kron(M.F[r], N.Kr(r, -1)) + la.kron(M.identity(), N.F[r]))
    weights = [vadd(a, b) for a in M.weights for b in N.weights]
    out = Module(M.datum, M.ctx, weights, E, F, unitary=M.unitary and N.unitary,
                 label=f"{M.label}*{N.label}")
    out.cache["factors"] = (M, N)
    with M.lock:
        M.cache[key] = out
    logger.debug("Tensor product %s has dimension %d", out.label, out.dim)
    return out


def contragredient(M: Module) -> Module:
    """M* with x . f = f o S(x); matrices are pi_M(S(x))^T."""
    cached = M.cache.get("dual")
    if cached is not None:
        return cached
    E, F = [], []
    for r in M.datum.index_set:
        E.append(la.transpose(-la.matmul(M.Kr(r, -1), M.E[r])))
        F.append(la.transpose(-la.matmul(M.F[r], M.Kr(r))))
    weights = [tuple(-x for x in w) for w in M.weights]
    hw = None
    if M.highest_weights:
        tau0 = M.datum.tau0
        hw = tuple((M.datum.permute_weight(tau0, w), m) for w, m in M.highest_weights)
    out = Module(M.datum, M.ctx, weights, E, F, unitary=False, highest_weights=hw, label=f"{M.label}^*")
    return M.remember("dual", out)


def twist_module(M: Module, sigma: Sequence[int]) -> Module:
    """Same space with E_r, F_r acting as E_{sigma(r)}, F_{sigma(r)}."""
    sigma = tuple(sigma)
    if not M.datum.is_diagram_automorphism(sigma):
        raise CartanError(f"{tuple(s + 1 for s in sigma)} is not a diagram automorphism of {M.datum.name}.")
    if sigma == tuple(M.datum.index_set):
        return M
    key = ("twist", sigma)
    if key in M.cache:
        return M.cache[key]
    inv = [0] * len(sigma)
    for r, s in enumerate(sigma):
        inv[s] = r
    E = [M.E[sigma[r]] for r in M.datum.index_set]
    F = [M.F[sigma[r]] for r in M.datum.index_set]
    weights = [tuple(w[sigma[r]] for r in M.datum.index_set) for w in M.weights]
    hw = None
    if M.highest_weights:
        hw = tuple((tuple(w[sigma[r]] for r in M.datum.index_set), m) for w, m in M.highest_weights)
    out = Module(M.datum, M.ctx, weights, E, F, unitary=M.unitary, highest_weights=hw,
                 label=f"{M.label}^{''.join(str(s + 1) for s in sigma)}")
    if "factors" in M.cache:
        out.cache["twist_of"] = (M, sigma)
    return M.remember(key, out)


# --- decomposition -------------------------------------------------------------------


def _singular_vectors(M: Module, mu: Tuple, idx: List[int]) -> List[np.ndarray]:
    """Kernel of all E_r on the weight space mu, as vectors of M."""
    rows = []
    for r in M.datum.index_set:
        block = M.E[r][:, idx]
        rows.extend(block[i] for i in range(M.dim) if np.count_nonzero(block[i]))
    if rows:
        stacked = np.array(rows, dtype=object).reshape(len(rows), len(idx))
        kernel = la.nullspace(stacked, M.ctx)
    else:
        kernel = [la.unit_vector(len(idx), j) for j in range(len(idx))]
    full = []
    for vec in kernel:
        v = la.zero_vector(M.dim)
        v[idx] = vec
        full.append(v)
    return full


def highest_weight_vectors(M: Module) -> Dict[Tuple, List[np.ndarray]]:
    """Orthonormal bases of the joint kernels of the E_r on each weight space."""
    M.require_unitary("decompose")
    out = {}
    for mu, idx in M.weight_blocks().items():
        if not M.datum.is_dominant(mu):
            continue
        full = _singular_vectors(M, mu, idx)
        if not full:
            continue
        basis, _ = la.gram_schmidt(full, M.ctx)
        if basis:
            out[mu] = basis
    return out


def find_intertwiner(M: Module, top: Sequence[int]) -> np.ndarray:
    """Intertwiner V_top -> M through a singular vector of weight top; M needs no inner product."""
    top = tuple(int(x) for x in top)
    idx = M.weight_blocks().get(top)
    vectors = _singular_vectors(M, top, idx) if idx else []
    if len(vectors) != 1:
        raise ModuleMismatchError(f"{M.label} has {len(vectors)} singular vectors of weight {top}, expected 1.")
    x = vectors[0]
    if M.unitary:
        x = x / la.norm(x)
    return embed_from(M, top, x)


def embed_from(M: Module, top: Tuple, x: np.ndarray) -> np.ndarray:
    """Isometric intertwiner V_top -> M sending the highest weight vector to x."""
    V = build_module(M.datum, top, M.ctx)
    images: List[Optional[np.ndarray]] = [None] * V.dim
    images[0] = x
    order = V.weight_blocks()
    for mu, idx in order.items():
        if mu == tuple(top):
            continue
        step = V.recipe[mu]
        cand_images = [la.matmul(M.F[r], images[j]) for r, j in step["candidates"]]
        rows = step["rows"]
        for i, target in enumerate(idx):
            acc = la.zero_vector(M.dim)
            for c, img in enumerate(cand_images):
                if rows[i, c]:
                    acc = acc + rows[i, c] * img
            images[target] = acc
    out = la.zeros(M.dim, V.dim)
    for j, img in enumerate(images):
        out[:, j] = img
    out[out == 0] = mp.zero
    return out


def decompose(M: Module) -> List[Tuple[Tuple, np.ndarray]]:
    """Isotypic decomposition as a list of (highest weight, isometric embedding)."""
    cached = M.cache.get("decompose")
    if cached is not None:
        return cached
    parts = []
    for mu, vecs in sorted(highest_weight_vectors(M).items(), key=lambda kv: kv[0], reverse=True):
        for x in vecs:
            parts.append((mu, embed_from(M, mu, x)))
    total = sum(iota.shape[1] for _, iota in parts)
    if total != M.dim:
        raise PrecisionError(f"Decomposition of {M.label} covers {total} of {M.dim} dimensions.")
    counts: Dict[Tuple, int] = {}
    for mu, _ in parts:
        counts[mu] = counts.get(mu, 0) + 1
    M.highest_weights = tuple(sorted(counts.items(), reverse=True))
    parts = M.remember("decompose", parts)
    logger.debug("Decomposed %s into %s", M.label, M.highest_weights)
    return parts


def isotypic_projector(M: Module, weight: Sequence[int]) -> np.ndarray:
    weight = tuple(weight)
    out = la.zeros(M.dim)
    for mu, iota in decompose(M):
        if mu == weight:
            out = out + la.matmul(iota, la.dagger(iota))
    return out


def scalar_on_components(M: Module, value: Callable[[Tuple], object]) -> np.ndarray:
    """Operator acting by value(varpi) on each isotypic component."""
    if M.is_irreducible:
        return la.scalar_multiple(M.identity(), value(M.highest_weight))
    out = la.zeros(M.dim)
    for mu, iota in decompose(M):
        s = value(mu)
        if s:
            out = out + s * la.matmul(iota, la.dagger(iota))
    return out


# --- relation checks -------------------------------------------------------------------


def _qbinomial(ctx, n, k, d):
    return ctx.qfactorial(n, d) / (ctx.qfactorial(k, d) * ctx.qfactorial(n - k, d))


def check_relations(M: Module) -> Dict[str, object]:
    """Residuals of the defining relations (and of the adjoint rule when unitary)."""
    ctx, datum = M.ctx, M.datum
    ctx.activate()
    report = {"K_E": mp.zero, "K_F": mp.zero, "EF": mp.zero, "serre_E": mp.zero, "serre_F": mp.zero}
    for r in datum.index_set:
        for s in datum.index_set:
            shift = ctx.q_power(datum.form(datum.alpha(s), datum.alpha(r)))
            Ks = M.Kr(s)
            report["K_E"] = max(report["K_E"], la.residual(la.matmul(Ks, M.E[r]), shift * la.matmul(M.E[r], Ks)))
            report["K_F"] = max(report["K_F"], la.residual(la.matmul(Ks, M.F[r]), la.matmul(M.F[r], Ks) / shift))
            comm = la.commutator(M.E[r], M.F[s])
            if r == s:
                qr = ctx.q_power(datum.d[r])
                expected = (M.Kr(r) - M.Kr(r, -1)) / (qr - 1 / qr)
            else:
                expected = la.zeros(M.dim)
            report["EF"] = max(report["EF"], la.residual(comm, expected))
            if r != s:
                n = 1 - datum.cartan[r][s]
                for key, G in (("serre_E", M.E), ("serre_F", M.F)):
                    total = la.zeros(M.dim)
                    for k in range(n + 1):
                        left = la.mdot(*([G[r]] * (n - k) + [G[s]] + [G[r]] * k))
                        total = total + ((-1) ** k) * _qbinomial(ctx, n, k, datum.d[r]) * left
                    report[key] = max(report[key], la.norm(total) / max(mp.one, la.norm(G[s])))
    if M.unitary:
        report["adjoint"] = max(
            (la.residual(la.dagger(M.E[r]), la.matmul(M.F[r], M.Kr(r))) for r in datum.index_set),
            default=mp.zero,
        )
    report["max"] = max(report.values())
    return report


# --- operator spans ----------------------------------------------------------------------


def monomial_span(M: Module, beta: Sequence[int], raising: bool = True) -> List[np.ndarray]:
    """Orthonormal basis (Frobenius) of pi_M(U_q(n^+)_beta), or of U_q(n^-)_{-beta}.

    beta is in root coordinates and lies in Q^+.
    """
    beta = tuple(int(x) for x in beta)
    key = ("span", raising, beta)
    if key in M.cache:
        return M.cache[key]
    if any(x < 0 for x in beta):
        basis = []
    elif not any(beta):
        basis = [M.identity()]
    else:
        gens = M.E if raising else M.F
        products = []
        for r in M.datum.index_set:
            if beta[r] == 0:
                continue
            lower = tuple(x - (1 if i == r else 0) for i, x in enumerate(beta))
            for S in monomial_span(M, lower, raising):
                prod = la.matmul(gens[r], S)
                if np.count_nonzero(prod):
                    products.append(prod)
        basis = _orthonormal_operators(products, M.ctx)
    return M.remember(key, basis)


def _flat_inner(a: np.ndarray, b: np.ndarray):
    return la.inner(a.reshape(-1), b.reshape(-1))


def _orthonormal_operators(ops: Sequence[np.ndarray], ctx: ScalarContext) -> List[np.ndarray]:
    if not ops:
        return []
    shape = ops[0].shape
    basis, _ = la.gram_schmidt([op.reshape(-1) for op in ops], ctx)
    return [b.reshape(shape) for b in basis]


def operator_inner(a: np.ndarray, b: np.ndarray):
    return _flat_inner(a, b)


class ElementFamily:
    """An element of the completion, realized by a rule Module -> operator.

    Operators are cached on the module, so the family's value on a tensor
    module is what "Delta(x)" means throughout the engine.
    """

    _serial = count()

    def __init__(self, label: str, rule: Callable[[Module], np.ndarray]):
        self.label = label
        self.rule = rule
        self.key = ("family", label, next(self._serial))

    def on(self, M: Module) -> np.ndarray:
        return M.memo(self.key, lambda: self.rule(M))

    __call__ = on

    def __repr__(self):
        return f"ElementFamily({self.label!r})"


def generator_family(kind: str, r: int) -> ElementFamily:
    """The families E_r, F_r, K_r."""
    if kind == "E":
        return ElementFamily(f"E{r + 1}", lambda M: M.E[r])
    if kind == "F":
        return ElementFamily(f"F{r + 1}", lambda M: M.F[r])
    if kind == "K":
        return ElementFamily(f"K{r + 1}", lambda M: M.Kr(r))
    raise ValueError(f"Unknown generator kind '{kind}'.")


def weight_family(omega) -> ElementFamily:
    omega = tuple(omega)
    return ElementFamily(f"K{omega}", lambda M: M.K(omega))
