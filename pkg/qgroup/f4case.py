"""The 26-dimensional module of U_q(f4) written out by hand, and the FII computation on it.

Roots are realized in R^4 with alpha_1 = (e1 - e2 - e3 - e4)/2, alpha_2 = e4,
alpha_3 = e3 - e4, alpha_4 = e2 - e3, so d = (1/2, 1/2, 1, 1).  The bracket
[n] = (q^{n/2} - q^{-n/2})/(q^{1/2} - q^{-1/2}) is ScalarContext.bracket.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Dict, List, Sequence, Tuple

import numpy as np
from mpmath import mp

from . import linalg as la
from .braid import T_longest, T_longest_inverse
from .cartan import CartanDatum, build_cartan
from .diagrams import admissible_sign, enhance
from .kmatrix import coideal_data, coideal_generators, modified_k
from .repn import Module, build_module, check_relations, contragredient, find_intertwiner, tensor
from .scalars import ScalarContext

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)
VARPI_1 = (1, 0, 0, 0)
# X = {2, 3, 4} in 1-based labels
FII_X = (1, 2, 3)

_SIGNS = ("+", "-")


def _f(signs: str) -> str:
    return "f" + signs


# top to bottom through the weight diagram
LABELS: Tuple[str, ...] = (
    "e1+", "f++++", "f+++-", "f++-+", "f++--", "f+-++", "e2+", "f+-+-", "e3+", "f+--+", "e4+", "f+---",
    "e0", "e0'",
    "f-+++", "e4-", "f-++-", "e3-", "f-+-+", "e2-", "f-+--", "f--++", "f--+-", "f---+", "f----", "e1-",
)

# (source, r, target, coefficient key); r is 0-based, "f0" is the derived vector
_ARROWS = (
    ("e1+", 0, "f++++", "q-1/4"), ("f++++", 1, "f+++-", "q-1/4"), ("f+++-", 2, "f++-+", "q-1/2"),
    ("f++-+", 1, "f++--", "q-1/4"), ("f++-+", 3, "f+-++", "q-1/2"),
    ("f++--", 0, "e2+", "q-1/4"), ("f++--", 3, "f+-+-", "q-1/2"), ("f+-++", 1, "f+-+-", "q-1/4"),
    ("e2+", 3, "e3+", "q-1/2"), ("f+-+-", 0, "e3+", "q-1/4"), ("f+-+-", 2, "f+--+", "q-1/2"),
    ("e3+", 2, "e4+", "q-1/2"), ("f+--+", 0, "e4+", "q-1/4"), ("f+--+", 1, "f+---", "q-1/4"),
    ("e4+", 1, "e0", "q-1/2[2]"), ("f+---", 0, "f0", "q-1/2[2]"),
    ("e0", 1, "e4-", "[2]"), ("e0", 0, "f-+++", "1/[2]"), ("f0", 1, "e4-", "1/[2]"), ("f0", 0, "f-+++", "[2]"),
    ("e4-", 2, "e3-", "q-1/2"), ("e4-", 0, "f-++-", "q-1/4"), ("f-+++", 1, "f-++-", "q-1/4"),
    ("e3-", 3, "e2-", "q-1/2"), ("e3-", 0, "f-+-+", "q-1/4"), ("f-++-", 2, "f-+-+", "q-1/2"),
    ("e2-", 0, "f--++", "q-1/4"), ("f-+-+", 3, "f--++", "q-1/2"), ("f-+-+", 1, "f-+--", "q-1/4"),
    ("f--++", 1, "f--+-", "q-1/4"), ("f-+--", 3, "f--+-", "q-1/2"),
    ("f--+-", 2, "f---+", "q-1/2"), ("f---+", 1, "f----", "q-1/4"), ("f----", 0, "e1-", "q-1/4"),
)


def epsilon_to_fundamental(v: Sequence[Fraction]) -> Tuple[int, ...]:
    """Coordinates in R^4 -> fundamental-weight coordinates (lambda, alpha_r^vee)."""
    l1, l2, l3, l4 = (Fraction(x) for x in v)
    return tuple(int(x) for x in (l1 - l2 - l3 - l4, 2 * l4, l3 - l4, l2 - l3))


def label_weight(label: str) -> Tuple[Fraction, ...]:
    """Weight in R^4 coordinates: e_k^{+-} -> +-e_k, f_s -> s/2, e0 and e0' -> 0."""
    if label.startswith("f"):
        return tuple(HALF if s == "+" else -HALF for s in label[1:])
    if label in ("e0", "e0'"):
        return (Fraction(0),) * 4
    k, sign = int(label[1]), label[2]
    return tuple(Fraction(1 if sign == "+" else -1) if i == k - 1 else Fraction(0) for i in range(4))


@dataclass(frozen=True)
class F4Basis:
    """Orthonormal basis e_k^{+-}, f_{s1s2s3s4}, e0, e0' and the unit vector f0 = [2]^-1 (e0 + [3]^{1/2} e0')."""

    ctx: ScalarContext
    labels: Tuple[str, ...] = LABELS

    @cached_property
    def index(self) -> Dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    @property
    def dim(self) -> int:
        return len(self.labels)

    def vector(self, label: str) -> np.ndarray:
        if label == "f0":
            ctx = self.ctx
            out = la.zero_vector(self.dim)
            out[self.index["e0"]] = 1 / ctx.bracket(2)
            out[self.index["e0'"]] = mp.sqrt(ctx.bracket(3)) / ctx.bracket(2)
            return out
        return la.unit_vector(self.dim, self.index[label])

    def combo(self, *terms: Tuple[object, str]) -> np.ndarray:
        """sum of coefficient * vector(label)."""
        out = la.zero_vector(self.dim)
        for coef, label in terms:
            out = out + coef * self.vector(label)
        return out


def _coefficients(ctx: ScalarContext) -> Dict[str, object]:
    r2 = mp.sqrt(ctx.bracket(2))
    return {
        "q-1/4": ctx.q_power(-QUARTER),
        "q-1/2": ctx.q_power(-HALF),
        "q-1/2[2]": ctx.q_power(-HALF) * r2,
        "[2]": r2,
        "1/[2]": 1 / r2,
    }


def build_f4_fundamental(ctx: ScalarContext) -> Module:
    """V_{varpi_1} of U_q(f4) from the explicit F_r arrows; E_r = K_r F_r^*."""
    ctx.activate()
    datum = build_cartan("F4")
    basis = F4Basis(ctx)
    n = basis.dim
    values = _coefficients(ctx)
    images: Dict[Tuple[str, int], np.ndarray] = {}
    for source, r, target, key in _ARROWS:
        img = images.get((source, r), la.zero_vector(n))
        images[(source, r)] = img + values[key] * basis.vector(target)
    bracket2, root3 = ctx.bracket(2), mp.sqrt(ctx.bracket(3))
    F = [la.zeros(n) for _ in range(datum.rank)]
    for r in datum.index_set:
        zero = la.zero_vector(n)
        for label in LABELS:
            if label == "e0'":
                # e0' = ([2] f0 - e0) / [3]^{1/2}
                img = (bracket2 * images.get(("f0", r), zero) - images.get(("e0", r), zero)) / root3
            else:
                img = images.get((label, r), zero)
            F[r][:, basis.index[label]] = img
        F[r][F[r] == 0] = mp.zero
    weights = [epsilon_to_fundamental(label_weight(label)) for label in LABELS]
    E = []
    for r in datum.index_set:
        K_r = la.diag([ctx.q_power(datum.form(datum.alpha(r), w)) for w in weights])
        E.append(la.matmul(K_r, la.dagger(F[r])))
    M = Module(datum, ctx, weights, E, F, unitary=True, highest_weights=((VARPI_1, 1),), label="V26")
    logger.info("Built the explicit 26-dimensional module of F4")
    return M


def intertwiner_to_generic(M: Module) -> Dict[str, object]:
    """Intertwiner build_module(F4, varpi_1) -> M and its residuals."""
    V = build_module(M.datum, VARPI_1, M.ctx)
    J = find_intertwiner(M, VARPI_1)
    res = mp.zero
    for r in M.datum.index_set:
        res = max(res, la.residual(la.matmul(M.E[r], J), la.matmul(J, V.E[r])),
                  la.residual(la.matmul(M.F[r], J), la.matmul(J, V.F[r])))
    unitary = la.check_unitary(J)
    return {"J": J, "intertwines": res, "unitary": unitary, "max": max(res, unitary)}


# --- the FII checks ---------------------------------------------------------------------------


def _sign(s: str) -> int:
    return 1 if s == "+" else -1


def _flip(s: str) -> str:
    return "-" if s == "+" else "+"


def _t_wx_identities(basis: F4Basis, T: np.ndarray, ctx: ScalarContext) -> List[Tuple[str, np.ndarray, np.ndarray]]:
    q = ctx.q_power
    out = []
    for signs in product(_SIGNS, repeat=4):
        s1, s2, s3, s4 = signs
        lhs = la.matvec(T, basis.vector(_f("".join(signs))))
        rhs = _sign(s2) * _sign(s4) * q(Fraction(9, 4)) * basis.vector(_f(s1 + _flip(s2) + _flip(s3) + _flip(s4)))
        out.append((f"T_wX f{''.join(signs)}", lhs, rhs))
    for k, factor in ((1, None), (2, 1), (3, -1), (4, 1)):
        for s in _SIGNS:
            lhs = la.matvec(T, basis.vector(f"e{k}{s}"))
            if factor is None:
                rhs = basis.vector(f"e{k}{s}")
            else:
                rhs = factor * q(Fraction(5, 2)) * basis.vector(f"e{k}{_flip(s)}")
            out.append((f"T_wX e{k}{s}", lhs, rhs))
    out.append(("T_wX e0", la.matvec(T, basis.vector("e0")), -q(3) * basis.vector("e0")))
    out.append(("T_wX f0", la.matvec(T, basis.vector("f0")),
                basis.combo((1, "f0"), (-q(Fraction(3, 2)) * (ctx.bracket(3) - 2), "e0"))))
    return out


def _c1_identities(basis: F4Basis, C1: np.ndarray, ctx: ScalarContext) -> List[Tuple[str, np.ndarray, np.ndarray]]:
    q, r2, b3 = ctx.q_power, mp.sqrt(ctx.bracket(2)), ctx.bracket(3)
    C1_star = la.dagger(C1)
    act = lambda A, label: la.matvec(A, basis.vector(label))  # noqa: E731
    return [
        ("C1 e1+", act(C1, "e1+"), basis.combo((-q(Fraction(13, 4)), "f+---"))),
        ("C1 e1-", act(C1, "e1-"), basis.combo((q(QUARTER), "f----"))),
        ("C1 f++++", act(C1, "f++++"),
         basis.combo((q(QUARTER), "e1+"), (-q(Fraction(-5, 2)) * r2, "f0"), (q(-1) * r2 * (b3 - 2), "e0"))),
        ("C1 f-+++", act(C1, "f-+++"), basis.combo((r2, "f0"), (-q(Fraction(-11, 4)), "e1-"))),
        ("C1* f+--+", act(C1_star, "f+--+"), basis.combo((q(QUARTER), "e4+"))),
        ("C1* f---+", act(C1_star, "f---+"), basis.combo((q(-QUARTER), "e4+"))),
    ]


def _k_identities(basis: F4Basis, aK: np.ndarray, ctx: ScalarContext) -> List[Tuple[str, np.ndarray, np.ndarray]]:
    q, r2 = ctx.q_power, mp.sqrt(ctx.bracket(2))
    act = lambda label: la.matvec(aK, basis.vector(label))  # noqa: E731
    out = [("aK e1+", act("e1+"), basis.vector("e1-"))]
    for signs in product(_SIGNS, repeat=3):
        tail = "".join(signs)
        out.append((f"aK f+{tail}", act(_f("+" + tail)), -q(-3) * basis.vector(_f("-" + tail))))
    out.append(("aK e0", act("e0"), -q(Fraction(-7, 2)) * basis.vector("e0")))
    out.append(("aK f0", act("f0"), basis.combo(
        (q(-HALF), "f0"), (q(-QUARTER) * (q(3) - q(-3)) / r2, "e1-"), (-q(-2) * (ctx.bracket(3) - 2), "e0"))))
    return out


def _z0_coefficients(ctx: ScalarContext) -> Dict[str, object]:
    exponents = {"+++": 0, "++-": 1, "+-+": 3, "+--": 4, "-++": 5, "-+-": 6, "--+": 8, "---": 9}
    return {tail: ctx.q_power(-e) for tail, e in exponents.items()}


def z_vectors(basis: F4Basis, ctx: ScalarContext) -> Dict[str, List[Tuple[object, np.ndarray, np.ndarray]]]:
    """z0, z+, z- and z as lists of (coefficient, xi, eta) for Z_V(xi, eta)."""
    q, r2, b2 = ctx.q_power, mp.sqrt(ctx.bracket(2)), ctx.bracket(2)
    fixed = basis.combo((1, "e0"), (-b2, "f0"))
    parts = {
        "z0": [(a, basis.vector(_f("-" + tail)), basis.vector(_f("+" + tail)))
               for tail, a in _z0_coefficients(ctx).items()],
        "z+": [(mp.one, fixed, basis.vector("e1+"))],
        "z-": [(mp.one, basis.vector("e1-"), fixed)],
    }
    weights = {"z+": q(Fraction(5, 4)), "z0": -ctx.bracket(3) / r2, "z-": q(Fraction(-41, 4))}
    parts["z"] = [(w * c, xi, eta) for name, w in weights.items() for c, xi, eta in parts[name]]
    return parts


def _as_tensor(terms, n: int) -> np.ndarray:
    """Z_V(xi, eta) as conj(xi) (x) eta in V^* (x) V."""
    out = la.zero_vector(n * n)
    for c, xi, eta in terms:
        out = out + c * la.kron_vec(la.conj(xi), eta)
    return out


def _relative(v: np.ndarray, scale: np.ndarray):
    return la.norm(v) / max(mp.one, la.norm(scale))


def verify_f4_identities(ctx: ScalarContext) -> Dict[str, object]:
    """Residuals of every identity of the FII computation on the explicit module.

    Order: module relations, T_{w_X}, C_1, the normalized K-matrix, invariance
    of z, and the counit value a eps(phi(z)) against its closed form.
    """
    ctx.activate()
    V = build_f4_fundamental(ctx)
    datum: CartanDatum = V.datum
    basis = F4Basis(ctx)
    identities: Dict[str, object] = {}

    relations = check_relations(V)
    identities["relations"] = relations["max"]
    identities["intertwiner"] = intertwiner_to_generic(V)["max"]

    T, T_inv = T_longest(V, FII_X), T_longest_inverse(V, FII_X)
    for name, lhs, rhs in _t_wx_identities(basis, T, ctx):
        identities[name] = la.residual(lhs, rhs)

    C1 = V.E[0] - ctx.q_power(Fraction(3, 4)) * la.mdot(T, V.F[0], T_inv, V.Kr(0))
    for name, lhs, rhs in _c1_identities(basis, C1, ctx):
        identities[name] = la.residual(lhs, rhs)
    s = enhance(datum, FII_X, tuple(datum.index_set), name="FII")
    cd = coideal_data(s)
    identities["C1 generator"] = la.residual(coideal_generators(cd, V)["C"][0], C1)

    bundle = modified_k(cd, admissible_sign(s))
    K = bundle.modified.on(V)
    a = 1 / la.inner(basis.vector("e1-"), la.matvec(K, basis.vector("e1+")))
    aK = la.scalar_multiple(K, a)
    for name, lhs, rhs in _k_identities(basis, aK, ctx):
        identities[name] = la.residual(lhs, rhs)

    parts = z_vectors(basis, ctx)
    W = tensor(contragredient(V), V)
    n = V.dim
    for name in ("z0", "z+", "z-"):
        vec = _as_tensor(parts[name], n)
        identities[f"{name} invariant"] = max(
            _relative(la.matvec(G[x], vec), vec) for G in (W.E, W.F) for x in FII_X)
    z = _as_tensor(parts["z"], n)
    identities["z highest"] = max(_relative(la.matvec(W.E[r], z), z) for r in datum.index_set)
    off_weight = la.zero_vector(n * n)
    for i, w in enumerate(W.weights):
        if tuple(w) != VARPI_1 and z[i]:
            off_weight[i] = z[i]
    identities["z weight"] = _relative(off_weight, z)

    value = mp.fsum(c * la.inner(xi, la.matvec(aK, eta)) for c, xi, eta in parts["z"])
    q, b2, b3 = ctx.q_power, ctx.bracket(2), ctx.bracket(3)
    closed = q(-HALF) * mp.sqrt(b2) * (q(-3) * b3 * (1 + q(-3) + q(-5) + q(-8)) + q(-10) * (q(-3) - q(3)))
    identities["counit closed form"] = abs(value - closed) / max(mp.one, abs(closed))

    gate = ctx.tol_mpf
    failed = [name for name, res in identities.items() if res >= gate]
    positive = mp.re(value) > 0 and abs(mp.im(value)) < gate
    for name in failed:
        logger.warning("FII identity %s fails with residual %s", name, mp.nstr(identities[name], 5))
    report = {
        "identities": identities,
        "a": a,
        "counit": value,
        "closed_form": closed,
        "positive": positive,
        "failed": failed,
        "max": max(identities.values()),
        "passed": not failed and positive,
    }
    logger.info("FII verification: %d identities, %d failed", len(identities), len(failed))
    return report
