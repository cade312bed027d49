"""Lusztig braid operators, torus characters and antipode transport."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp

from . import linalg as la
from .cartan import CartanDatum
from .errors import CartanError
from .repn import ElementFamily, Module, build_module, contragredient
from .scalars import ScalarContext, root_of_unity

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TorusCharacter:
    """omega -> e^{2 pi i (chi, omega)} for a rational coweight chi (coroot coordinates)."""

    chi: Tuple[Fraction, ...]
    label: str = ""

    def exponent(self, datum: CartanDatum, weight: Sequence) -> Fraction:
        return datum.pair(self.chi, weight)

    def value(self, datum: CartanDatum, weight: Sequence):
        return root_of_unity(self.exponent(datum, weight))

    def __mul__(self, other: "TorusCharacter") -> "TorusCharacter":
        return TorusCharacter(tuple(a + b for a, b in zip(self.chi, other.chi)), f"{self.label}{other.label}")

    def inverse(self) -> "TorusCharacter":
        return TorusCharacter(tuple(-a for a in self.chi), f"{self.label}^-1")

    def permuted(self, datum: CartanDatum, sigma: Sequence[int]) -> "TorusCharacter":
        """The character omega -> chi(sigma(omega))."""
        return TorusCharacter(tuple(self.chi[sigma[k]] for k in datum.index_set), f"{self.label}o{''.join(str(s + 1) for s in sigma)}")


def zero_character(datum: CartanDatum) -> TorusCharacter:
    return TorusCharacter((Fraction(0),) * datum.rank, "1")


def simple_reflection_character(datum: CartanDatum, r: int) -> TorusCharacter:
    """S_r = e^{pi i alpha_r^vee}."""
    return TorusCharacter(tuple(Fraction(1, 2) if k == r else Fraction(0) for k in datum.index_set), f"S{r + 1}")


def s_half(datum: CartanDatum) -> TorusCharacter:
    """S = e^{pi i rho^vee}."""
    return TorusCharacter(tuple(x / 2 for x in datum.rho_vee()), "S")


def s_zero(datum: CartanDatum) -> TorusCharacter:
    """S_0 = e^{2 pi i rho^vee}."""
    return TorusCharacter(datum.rho_vee(), "S0")


def s_X(datum: CartanDatum, X: Iterable[int]) -> TorusCharacter:
    """S_X = e^{2 pi i rho_X^vee}."""
    return TorusCharacter(datum.rho_vee(X), "SX")


def torus_operator(M: Module, chi: TorusCharacter) -> np.ndarray:
    return la.diag([chi.value(M.datum, w) for w in M.weights])


# --- braid operators ------------------------------------------------------------------


def _divided_powers(M: Module, G: np.ndarray, r: int, top: int):
    ctx = M.ctx
    out = [M.identity()]
    power = M.identity()
    for k in range(1, top + 1):
        power = la.matmul(G, power)
        out.append(power / ctx.qfactorial(k, M.datum.d[r]))
    return out


def braid_T(M: Module, r: int, primed: bool = False) -> np.ndarray:
    """T_r (or T'_r) by the finite triple sum over divided powers."""
    key = ("T_r", r, primed)
    if key in M.cache:
        return M.cache[key]
    ctx, datum = M.ctx, M.datum
    ctx.activate()
    m_values = [int(w[r]) for w in M.weights]
    top = max((abs(x) for x in m_values), default=0)
    Ediv = _divided_powers(M, M.E[r], r, top)
    Fdiv = _divided_powers(M, M.F[r], r, top)
    out = la.zeros(M.dim)
    for n in sorted(set(m_values)):
        cols = [i for i, x in enumerate(m_values) if x == n]
        proj = la.zeros(M.dim)
        for i in cols:
            proj[i, i] = mp.one
        for c in range(top + 1):
            Ec = la.matmul(Ediv[c], proj)
            if not np.count_nonzero(Ec):
                continue
            for a in range(top + 1):
                b = a + c + n
                if b < 0 or b > top:
                    continue
                exponent = (a * c - b) if primed else (b - a * c)
                coef = (-1) ** b * ctx.q_power(datum.d[r] * exponent)
                term = la.mdot(Ediv[a], Fdiv[b], Ec)
                if np.count_nonzero(term):
                    out = out + coef * term
    out[out == 0] = mp.zero
    return M.remember(key, out)


def braid_word(M: Module, word: Sequence[int], primed: bool = False) -> np.ndarray:
    """T_w = T_{r_1} ... T_{r_k} for a reduced word."""
    word = tuple(word)
    if not M.datum.is_reduced(word):
        raise CartanError(f"Word {tuple(r + 1 for r in word)} is not reduced.")
    def build():
        out = M.identity()
        for r in word:
            out = la.matmul(out, braid_T(M, r, primed))
        return out

    return M.memo(("T_w", word, primed), build)


def braid_word_inverse(M: Module, word: Sequence[int], primed: bool = False) -> np.ndarray:
    return M.memo(("T_w^-1", tuple(word), primed), lambda: la.inverse(braid_word(M, word, primed), M.ctx))


def T_longest(M: Module, X: Optional[Iterable[int]] = None, primed: bool = False) -> np.ndarray:
    return braid_word(M, M.datum.longest_word(X), primed)


def T_longest_inverse(M: Module, X: Optional[Iterable[int]] = None, primed: bool = False) -> np.ndarray:
    return braid_word_inverse(M, M.datum.longest_word(X), primed)


def adjoint_action(T: np.ndarray, T_inv: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Ad(T)(x) = T x T^-1."""
    return la.mdot(T, x, T_inv)


def braid_family(X: Optional[Iterable[int]] = None, primed: bool = False) -> ElementFamily:
    X_key = None if X is None else tuple(sorted(X))
    return ElementFamily(f"T[{X_key}]{'p' if primed else ''}", lambda M: T_longest(M, X_key, primed))


# --- antipodes -----------------------------------------------------------------------


def antipode_transport(family: ElementFamily, M: Module, unitary: bool = False) -> np.ndarray:
    """pi_M(S(x)) = pi_{M*}(x)^T, and R(x) = K_rho S(x) K_rho^-1 with the unitary flag."""
    dual = contragredient(M)
    out = la.transpose(family.on(dual))
    if unitary:
        rho = M.datum.rho
        out = la.mdot(M.K(rho), out, M.K(tuple(-x for x in rho)))
    return out


# --- reports -----------------------------------------------------------------------------


def _bond_order(datum: CartanDatum, r: int, s: int) -> int:
    product = datum.cartan[r][s] * datum.cartan[s][r]
    return {0: 2, 1: 3, 2: 4, 3: 6}[product]


def braid_relation_report(datum: CartanDatum, ctx: ScalarContext, modules=None) -> Dict[str, object]:
    """Residuals of T_r T_s T_r ... = T_s T_r T_s ... over all rank-2 subsystems."""
    if modules is None:
        modules = [build_module(datum, tuple(1 if k == j else 0 for k in datum.index_set), ctx)
                   for j in datum.index_set]
    report = {}
    for r, s in combinations(datum.index_set, 2):
        m = _bond_order(datum, r, s)
        worst = mp.zero
        for M in modules:
            left = [r if k % 2 == 0 else s for k in range(m)]
            right = [s if k % 2 == 0 else r for k in range(m)]
            a = la.mdot(*[braid_T(M, k) for k in left])
            b = la.mdot(*[braid_T(M, k) for k in right])
            worst = max(worst, la.residual(a, b))
        report[f"{r + 1}-{s + 1}"] = worst
    return report


def commutation_reports(M: Module, satake_subsets: Sequence[Iterable[int]] = ()) -> Dict[str, object]:
    """Unitarity and conjugation properties of the braid operators on a unitary module."""
    M.require_unitary("braid reports")
    datum = M.datum
    report: Dict[str, object] = {}
    T0 = T_longest(M)
    T0_inv = T_longest_inverse(M)
    worst = mp.zero
    for r in datum.index_set:
        Tr = braid_T(M, r)
        worst = max(worst, la.residual(la.dagger(Tr), la.matmul(Tr, torus_operator(M, simple_reflection_character(datum, r)))))
    report["T_r_star"] = worst
    report["T_w0_star"] = la.residual(la.dagger(T0), la.matmul(T0, torus_operator(M, s_zero(datum))))
    tau0 = datum.tau0
    report["Ad_T_w0_E_star"] = max(
        (la.residual(la.dagger(adjoint_action(T0, T0_inv, M.E[r])), -M.E[tau0[r]]) for r in datum.index_set),
        default=mp.zero)
    report["T_w0_T_r"] = max(
        (la.residual(adjoint_action(T0, T0_inv, braid_T(M, r)), braid_T(M, tau0[r])) for r in datum.index_set),
        default=mp.zero)
    S = torus_operator(M, s_half(datum))
    for X in satake_subsets:
        X = tuple(sorted(X))
        TX = T_longest(M, X)
        TX_inv = T_longest_inverse(M, X)
        tag = ",".join(str(x + 1) for x in X) or "-"
        report[f"T_w0_T_wX[{tag}]"] = la.residual(la.matmul(T0, TX), la.matmul(TX, T0))
        SX_inv = torus_operator(M, s_X(datum, X).inverse())
        report[f"S_T_wX[{tag}]"] = la.residual(la.matmul(S, TX_inv), la.mdot(TX_inv, S, SX_inv))
    return report
