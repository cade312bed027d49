"""Coideal generators, the quasi-K-matrix and the K-matrix pipeline.

For an enhanced Satake diagram the raw K-matrix on a module is

    K = X xi T_{w_X}^-1 T_{w_0}^-1

with X the quasi-K-matrix, solved grade by grade from B_r X = X Bbar_r
(r outside X) and F_s X = X F_s (s in X).  Conjugating by K_{omega_0},
moving to a left coideal with the unitary antipode and the ribbon element,
and twisting by E eps~^-1 gives the modified K-matrix of a Vogan diagram.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
import sympy
from mpmath import mp

from . import linalg as la
from .braid import (TorusCharacter, T_longest, T_longest_inverse, antipode_transport, s_X, s_zero,
                    torus_operator)
from .cartan import CartanDatum, vadd, vsub
from .diagrams import SatakeDiagram, SignFunction, extend_sign, theta_on_weights
from .errors import ModuleMismatchError, SolveError
from .repn import (ElementFamily, Module, build_module, decompose, monomial_span, scalar_on_components,
                   tensor, trivial_module, twist_module)
from .rmat import flip, r_flip, r_matrix, r_twisted, r_twisted_21

logger = logging.getLogger(__name__)


# --- constants of the coideal ----------------------------------------------------------------


def _halves(s: SatakeDiagram, weight: Sequence) -> Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]:
    """(omega^+, omega^-) = ((omega + Theta omega)/2, (omega - Theta omega)/2)."""
    image = s.theta(weight)
    plus = tuple((Fraction(a) + Fraction(b)) / 2 for a, b in zip(weight, image))
    minus = tuple((Fraction(a) - Fraction(b)) / 2 for a, b in zip(weight, image))
    return plus, minus


@dataclass(frozen=True)
class CoidealData:
    """Exact constants of the coideal attached to a Satake diagram."""

    satake: SatakeDiagram
    c_exponents: Tuple[Fraction, ...]
    minus_norms: Tuple[Fraction, ...]
    plus_norms: Tuple[Fraction, ...]
    omega0: Tuple[Fraction, ...]

    @property
    def datum(self) -> CartanDatum:
        return self.satake.datum

    def c(self, ctx, r: int):
        return ctx.q_power(self.c_exponents[r])

    def gamma(self, ctx, weight: Sequence):
        """gamma(omega) = z~_tau(omega) c(omega), with c multiplicative on Q."""
        k = self.datum.to_root(weight)
        exponent = sum((a * b for a, b in zip(k, self.c_exponents)), Fraction(0))
        return self.satake.z_tilde_tau.value(self.datum, weight) * ctx.q_power(exponent)

    def xi_value(self, ctx, weight: Sequence):
        """xi(omega) = gamma(omega) q^{-(omega^+, omega^+) + sum_r (alpha_r^-, alpha_r^-) k_r}."""
        datum = self.datum
        plus, _ = _halves(self.satake, weight)
        k = datum.to_root(weight)
        exponent = -datum.form(plus, plus) + sum((n * kr for n, kr in zip(self.minus_norms, k)), Fraction(0))
        return self.gamma(ctx, weight) * ctx.q_power(exponent)


def coideal_data(s: SatakeDiagram) -> CoidealData:
    datum = s.datum
    two_rho_X = tuple(2 * x for x in s.rho_X)
    exps, minus_norms, plus_norms = [], [], []
    for r in datum.index_set:
        a = datum.alpha(r)
        plus, minus = _halves(s, a)
        minus_norms.append(datum.form(minus, minus))
        plus_norms.append(datum.form(plus, plus))
        exps.append(Fraction(0) if r in s.X else datum.form(a, vsub(s.theta(a), two_rho_X)) / 2)
    omega0 = tuple(-(Fraction(a) - b) / 2 for a, b in zip(datum.rho, s.rho_X))
    return CoidealData(s, tuple(exps), tuple(minus_norms), tuple(plus_norms), omega0)


def theta_fixed_weights(s: SatakeDiagram) -> List[Tuple[int, ...]]:
    """An integral basis of the Theta-fixed weights (rational nullspace of Theta - 1)."""
    theta = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row]
                          for row in theta_on_weights(s)])
    out = []
    for v in (theta - sympy.eye(s.datum.rank)).nullspace():
        den = 1
        for x in v:
            den = lcm(den, int(sympy.Rational(x).q))
        out.append(tuple(int(x * den) for x in v))
    return out


# --- generators on a module -------------------------------------------------------------------


def coideal_generators(cd: CoidealData, M: Module) -> Dict[str, Dict[int, np.ndarray]]:
    """B_r, Bbar_r, B~_r, C_r, X_r, Y_r, Y'_r for r outside X; E_s, F_s on X; K on fixed weights."""
    key = ("coideal", cd)
    cached = M.cache.get(key)
    if cached is not None:
        return cached
    s, datum, ctx = cd.satake, cd.datum, M.ctx
    ctx.activate()
    T, T_inv = T_longest(M, s.X), T_longest_inverse(M, s.X)
    two_rho_X = tuple(2 * x for x in s.rho_X)
    two_rho_X_vee = tuple(2 * x for x in s.rho_X_vee)
    gens: Dict[str, Dict[int, np.ndarray]] = {
        name: {} for name in ("X", "Y", "Y_prime", "B", "B_bar", "B_tilde", "C", "E", "F", "K")}
    for r in s.white:
        t = s.tau[r]
        z = s.z[t]
        X_r = la.scalar_multiple(la.mdot(T, M.E[t], T_inv), -z)
        Y_r = la.scalar_multiple(la.mdot(T, M.F[t], T_inv), -z)
        Y_p = la.mdot(T_inv, M.E[t], T)
        sign = -1 if int(datum.pair(two_rho_X_vee, datum.alpha(t))) % 2 else 1
        b = -sign * z * ctx.q_power(-datum.form(two_rho_X, datum.alpha(t))) / cd.c(ctx, r)
        gens["X"][r], gens["Y"][r], gens["Y_prime"][r] = X_r, Y_r, Y_p
        gens["B"][r] = M.F[r] + cd.c(ctx, r) * la.matmul(X_r, M.Kr(r, -1))
        gens["B_bar"][r] = M.F[r] + b * la.matmul(Y_p, M.Kr(r))
        gens["B_tilde"][r] = M.F[r] + ctx.q_power(-cd.minus_norms[r]) * la.matmul(X_r, M.Kr(r, -1))
        gens["C"][r] = M.E[r] + ctx.q_power(cd.plus_norms[r]) * la.matmul(Y_r, M.Kr(r))
    for x in s.X:
        gens["E"][x], gens["F"][x] = M.E[x], M.F[x]
    for i, omega in enumerate(theta_fixed_weights(s)):
        gens["K"][i] = M.K(omega)
    return M.remember(key, gens)


def generator_family(cd: CoidealData, kind: str, r: int) -> ElementFamily:
    return ElementFamily(f"{kind}{r + 1}", lambda N: coideal_generators(cd, N)[kind][r])


# --- quasi-K-matrix -----------------------------------------------------------------------------


def _stack(ops) -> np.ndarray:
    return np.concatenate([op.reshape(-1) for op in ops])


def _raising_grades(M: Module) -> List[Tuple[int, ...]]:
    datum = M.datum
    roots = {datum.to_root(w) for w in M.weight_blocks()}
    grades = set()
    for a in roots:
        for b in roots:
            diff = tuple(x - y for x, y in zip(a, b))
            if all(x >= 0 and x.denominator == 1 for x in diff) and any(diff):
                grades.add(tuple(int(x) for x in diff))
    return sorted(grades, key=lambda g: (sum(g), g))


def quasi_k_blocks(cd: CoidealData, M: Module) -> Dict[Tuple[int, ...], np.ndarray]:
    """X_alpha per grade alpha (root coordinates); only grades with Theta alpha = -alpha occur."""
    key = ("quasi_k", cd)
    if key in M.cache:
        return M.cache[key]
    s, datum, ctx = cd.satake, cd.datum, M.ctx
    ctx.activate()
    gens = coideal_generators(cd, M)
    lead = {r: gens["B"][r] - M.F[r] for r in s.white}
    trail = {r: gens["B_bar"][r] - M.F[r] for r in s.white}
    beta = {r: tuple(-x for x in s.theta_root([1 if k == r else 0 for k in datum.index_set])) for r in s.white}
    gate = mp.sqrt(ctx.tol_mpf)
    solved = {(0,) * datum.rank: M.identity()}
    for alpha in _raising_grades(M):
        if s.theta_root(alpha) != tuple(-Fraction(a) for a in alpha):
            continue
        parts = []
        for r in datum.index_set:
            total = la.zeros(M.dim)
            if r not in s.X:
                gamma = tuple(a - (1 if k == r else 0) - b for k, (a, b) in enumerate(zip(alpha, beta[r])))
                low = solved.get(gamma)
                if low is not None:
                    total = la.matmul(low, trail[r]) - la.matmul(lead[r], low)
            parts.append(total)
        rhs = _stack(parts)
        span = monomial_span(M, alpha, raising=True)
        if not span:
            size = la.norm(rhs)
            if size > gate:
                raise SolveError(f"Quasi-K grade {alpha} has no room for a nonzero right-hand side.",
                                 grade=alpha, residual=size)
            continue
        columns = [_stack([la.commutator(M.F[r], S) for r in datum.index_set]) for S in span]
        (x,), err = la.lstsq(columns, [rhs], ctx, grade=alpha)
        if err > gate:
            raise SolveError(f"Quasi-K grade {alpha} is inconsistent.", grade=alpha, residual=err)
        value = la.zeros(M.dim)
        for coeff, S in zip(x, span):
            if coeff:
                value = value + coeff * S
        solved[alpha] = value
        logger.debug("Quasi-K grade %s on %s solved with residual %s", alpha, M.label, mp.nstr(err, 5))
    return M.remember(key, solved)


def quasi_k(cd: CoidealData, M: Module) -> np.ndarray:
    total = la.zeros(M.dim)
    for block in quasi_k_blocks(cd, M).values():
        total = total + block
    return total


def quasi_k_report(cd: CoidealData, M: Module) -> Dict[str, object]:
    """Residuals of B_r X = X Bbar_r and F_s X = X F_s."""
    gens = coideal_generators(cd, M)
    X = quasi_k(cd, M)
    report = {"B": mp.zero, "F_X": mp.zero}
    for r in cd.satake.white:
        report["B"] = max(report["B"], la.residual(la.matmul(gens["B"][r], X), la.matmul(X, gens["B_bar"][r])))
    for x in cd.satake.X:
        report["F_X"] = max(report["F_X"], la.residual(la.matmul(M.F[x], X), la.matmul(X, M.F[x])))
    report["max"] = max(report.values())
    return report


# --- torus parts ---------------------------------------------------------------------------------


def xi_element(cd: CoidealData, M: Module) -> np.ndarray:
    return la.diag([cd.xi_value(M.ctx, w) for w in M.weights])


def c_theta(cd: CoidealData, M: Module) -> np.ndarray:
    """C_Theta x = q^{-(wt^+, wt^+)} x."""
    datum = cd.datum
    out = []
    for w in M.weights:
        plus, _ = _halves(cd.satake, w)
        out.append(M.ctx.q_power(-datum.form(plus, plus)))
    return la.diag(out)


def k_matrix(cd: CoidealData, M: Module) -> np.ndarray:
    """Raw K = X xi T_{w_X}^-1 T_{w_0}^-1."""
    return la.mdot(quasi_k(cd, M), xi_element(cd, M), T_longest_inverse(M, cd.satake.X), T_longest_inverse(M))


# --- components and sign operators -------------------------------------------------------------


def _components(M: Module) -> List[Tuple[Tuple, np.ndarray]]:
    if M.recipe is not None and M.is_irreducible:
        return [(M.highest_weight, None)]
    return decompose(M)


def _on_components(M: Module, value: Callable[[Tuple, Tuple], object]) -> np.ndarray:
    """Operator diag(value(top, wt)) on each irreducible component."""
    out = la.zeros(M.dim)
    for top, iota in _components(M):
        V = M if iota is None else build_module(M.datum, top, M.ctx)
        D = la.diag([value(top, w) for w in V.weights])
        if iota is None:
            return D
        out = out + la.mdot(iota, D, la.dagger(iota))
    return out


def epsilon_E(M: Module, eps: SignFunction) -> np.ndarray:
    """E x = eps_{varpi - wt x} x on a component of highest weight varpi."""
    datum = M.datum
    return _on_components(M, lambda top, w: eps.on_root(datum.to_root(vsub(top, w))))


def omega_epsilon(M: Module, N: Module, eps: SignFunction) -> np.ndarray:
    """Omega_eps on M (x) N: eps_{mu + nu - lambda} on V_lambda inside V_mu (x) V_nu."""
    datum, ctx = M.datum, M.ctx
    out = la.zeros(M.dim * N.dim)
    for mu, iota in _components(M):
        for nu, kappa in _components(N):
            V = M if iota is None else build_module(datum, mu, ctx)
            W = N if kappa is None else build_module(datum, nu, ctx)
            top = vadd(mu, nu)
            block = scalar_on_components(tensor(V, W), lambda lam: eps.on_root(datum.to_root(vsub(top, lam))))
            if iota is None and kappa is None:
                return block
            emb = la.kron(V.identity() if iota is None else iota, W.identity() if kappa is None else kappa)
            out = out + la.mdot(emb, block, la.dagger(emb))
    return out


def flag_k(datum: CartanDatum, eps: SignFunction, M: Module) -> np.ndarray:
    """K_eps x = eps_{varpi - w_0 wt x} x on a component of highest weight varpi."""
    w0 = datum.longest_word()
    return _on_components(M, lambda top, w: eps.on_root(datum.to_root(vsub(top, datum.apply_word(w0, w)))))


def flag_family(datum: CartanDatum, eps: SignFunction) -> ElementFamily:
    return ElementFamily(f"K[{eps}]", lambda N: flag_k(datum, eps, N))


def ribbon_inverse(M: Module) -> np.ndarray:
    datum, ctx = M.datum, M.ctx
    two_rho = tuple(2 * x for x in datum.rho)
    return scalar_on_components(M, lambda w: ctx.q_power(datum.form(w, vadd(w, two_rho))))


# --- the pipeline ----------------------------------------------------------------------------------


@dataclass(eq=False)
class KMatrixBundle:
    """Every stage of the construction as an element family."""

    coideal: CoidealData
    eps: SignFunction
    eps_tilde: TorusCharacter
    quasi: ElementFamily
    xi: ElementFamily
    raw: ElementFamily
    tilde: ElementFamily
    script_tilde: ElementFamily
    modified: ElementFamily
    alternate: ElementFamily

    @property
    def satake(self) -> SatakeDiagram:
        return self.coideal.satake


def modified_k(cd: CoidealData, eps: SignFunction) -> KMatrixBundle:
    """Build the families K, K~, sK~ = R(K~) v^-1 and sK = E eps~^-1 sK~."""
    eps_tilde = extend_sign(cd.satake, eps)
    X = cd.satake.X
    omega0 = cd.omega0
    minus_omega0 = tuple(-x for x in omega0)
    quasi = ElementFamily("X", lambda N: quasi_k(cd, N))
    xi = ElementFamily("xi", lambda N: xi_element(cd, N))
    raw = ElementFamily("K", lambda N: la.mdot(quasi.on(N), xi.on(N), T_longest_inverse(N, X), T_longest_inverse(N)))
    tilde = ElementFamily("K~", lambda N: la.mdot(N.K(omega0), raw.on(N), N.K(minus_omega0)))
    script_tilde = ElementFamily(
        "sK~", lambda N: la.matmul(antipode_transport(tilde, N, unitary=True), ribbon_inverse(N)))
    modified = ElementFamily(
        "sK", lambda N: la.mdot(epsilon_E(N, eps), torus_operator(N, eps_tilde.inverse()), script_tilde.on(N)))
    alternate = ElementFamily("sK'", lambda N: la.matmul(ribbon_inverse(N), la.inverse(modified.on(N), N.ctx)))
    logger.info("K-matrix bundle for %s with sign %s", cd.satake.label(), eps)
    return KMatrixBundle(cd, eps, eps_tilde, quasi, xi, raw, tilde, script_tilde, modified, alternate)


def alternate_k(bundle: KMatrixBundle, M: Module) -> np.ndarray:
    """v^-1 sK^-1."""
    return bundle.alternate.on(M)


def character_chi(bundle: KMatrixBundle, M: Module, xi: np.ndarray, eta: np.ndarray):
    """chi_{xi, eta} = <xi, sK eta>."""
    return la.inner(xi, la.matvec(bundle.modified.on(M), eta))


def scalar_gap(a: np.ndarray):
    """Relative distance of a from the scalars."""
    n = a.shape[0]
    t = mp.fsum(a[i, i] for i in range(n)) / n
    return la.norm(a - la.scalar_multiple(la.eye(n), t)) / max(mp.one, la.norm(a))


# --- single-module checks ----------------------------------------------------------------------------


def kmatrix_report(bundle: KMatrixBundle, M: Module) -> Dict[str, object]:
    """Residuals of the single-module identities; 'nontrivial' is a gap, not a residual."""
    M.require_unitary("the K-matrix checks")
    cd, s, datum, ctx = bundle.coideal, bundle.satake, bundle.coideal.datum, M.ctx
    ctx.activate()
    sigma = s.tau_nu
    report: Dict[str, object] = {}
    X = bundle.quasi.on(M)
    T0, T0_inv = T_longest(M), T_longest_inverse(M)
    report["quasi_k"] = quasi_k_report(cd, M)["max"]
    report["quasi_k_star"] = la.residual(
        la.dagger(X), la.mdot(T0, bundle.quasi.on(twist_module(M, datum.tau0)), T0_inv))
    Z = torus_operator(M, s.z_tilde)
    Z_inv = torus_operator(M, s.z_tilde.inverse())
    X_tau = bundle.quasi.on(twist_module(M, s.tau))
    report["quasi_k_z"] = la.residual(la.mdot(Z, X, Z_inv), X_tau)
    xi_p = la.matmul(bundle.xi.on(M), M.K(tuple(2 * x for x in cd.omega0)))
    C = c_theta(cd, M)
    report["xi_prime"] = la.residual(xi_p, la.matmul(torus_operator(M, s.z_tilde_tau), C))
    report["xi_prime_T0"] = la.residual(
        la.mdot(T0, xi_p, T0_inv),
        la.matmul(torus_operator(M, s.z_tilde.inverse() * s.z_tilde_tau.inverse()), xi_p))
    report["quasi_k_xi"] = la.residual(la.matmul(X, xi_p), la.matmul(xi_p, X_tau))
    report["c_theta"] = la.residual(la.matmul(C, X), la.matmul(X, C))

    K = bundle.raw.on(M)
    gens = coideal_generators(cd, M)
    worst = mp.zero
    for r in s.white:
        worst = max(worst, la.residual(la.matmul(K, gens["B"][r]), la.matmul(gens["B"][sigma[r]], K)))
    for x in s.X:
        worst = max(worst, la.residual(la.matmul(K, M.E[x]), la.matmul(M.E[sigma[x]], K)))
        worst = max(worst, la.residual(la.matmul(K, M.F[x]), la.matmul(M.F[sigma[x]], K)))
    report["intertwines"] = worst
    twisted = twist_module(M, sigma)
    report["tau_tau0"] = la.residual(bundle.raw.on(twisted), K)
    K_t = bundle.tilde.on(M)
    report["tau_tau0_tilde"] = la.residual(bundle.tilde.on(twisted), K_t)
    signs = s_X(datum, s.X) * s_zero(datum) * s.z_tilde * s.z_tilde_tau.inverse()
    report["star_tilde"] = la.residual(la.dagger(K_t), la.matmul(K_t, torus_operator(M, signs)))

    K_mod = bundle.modified.on(M)
    report["star_modified"] = la.residual(la.dagger(K_mod), bundle.modified.on(twisted))
    alt = bundle.alternate.on(M)
    report["star_alternate"] = la.residual(la.dagger(alt), bundle.alternate.on(twisted))

    worst = mp.zero
    for r in s.white:
        image = antipode_transport(generator_family(cd, "B_tilde", r), M, unitary=True)
        expected = la.scalar_multiple(la.dagger(image), -ctx.q_power(datum.d[r]))
        worst = max(worst, la.residual(gens["C"][r], expected))
    report["generators_C"] = worst

    trivial = trivial_module(datum, ctx)
    report["counit"] = abs(bundle.modified.on(trivial)[0, 0] - 1)
    report["max"] = max(report.values())
    report["nontrivial"] = scalar_gap(K_mod) if M.dim > 1 else mp.zero
    return report


# --- pair checks ---------------------------------------------------------------------------------------


def _legs(family: ElementFamily, M: Module, N: Module) -> Tuple[np.ndarray, np.ndarray]:
    return la.kron(family.on(M), N.identity()), la.kron(M.identity(), family.on(N))


def _r21_inverse(M: Module, N: Module) -> np.ndarray:
    return flip(r_matrix(N, M).inverse(), N.dim, M.dim)


def coproduct_report(bundle: KMatrixBundle, M: Module, N: Module) -> Dict[str, object]:
    """Residuals of the coproduct formulas and the reflection equation on M (x) N."""
    M.compatible(N)
    ctx = M.ctx
    ctx.activate()
    sigma = bundle.satake.tau_nu
    MN = tensor(M, N)
    pair = r_matrix(M, N)
    R, R_inv = pair.R, pair.inverse()
    R21, R21_inv = r_flip(M, N), _r21_inverse(M, N)
    R_tau, R_tau21 = r_twisted(M, N, sigma), r_twisted_21(M, N, sigma)
    R_tau_inv = r_matrix(twist_module(M, sigma), N).inverse()
    R_tau21_inv = flip(r_matrix(twist_module(N, sigma), M).inverse(), N.dim, M.dim)
    report: Dict[str, object] = {}

    for name, family in (("raw", bundle.raw), ("tilde", bundle.tilde)):
        K1, K2 = _legs(family, M, N)
        whole = family.on(MN)
        report[f"{name}_coproduct"] = la.residual(whole, la.mdot(K1, R_tau21, K2, R))
        report[f"{name}_coproduct_op"] = la.residual(whole, la.mdot(R21, K2, R_tau, K1))

    S1, S2 = _legs(bundle.script_tilde, M, N)
    report["script_tilde_coproduct"] = la.residual(bundle.script_tilde.on(MN), la.mdot(S2, R_tau21, S1, R21_inv))

    omega = omega_epsilon(M, N, bundle.eps)
    omega21 = flip(omega_epsilon(N, M, bundle.eps), N.dim, M.dim)
    report["omega"] = la.residual(la.matmul(R, omega), la.matmul(omega21, R))
    K1, K2 = _legs(bundle.modified, M, N)
    lhs = la.matmul(omega, bundle.modified.on(MN))
    right = la.mdot(R_inv, K1, R_tau, K2)
    left = la.mdot(K2, R_tau21, K1, R21_inv)
    report["modified"] = la.residual(lhs, right)
    report["modified_op"] = la.residual(lhs, left)
    report["reflection"] = la.residual(left, right)

    A1, A2 = _legs(bundle.alternate, M, N)
    alhs = la.matmul(omega, bundle.alternate.on(MN))
    report["alternate"] = la.residual(alhs, la.mdot(R_inv, A1, R_tau21_inv, A2))
    report["alternate_op"] = la.residual(alhs, la.mdot(A2, R_tau_inv, A1, R21_inv))
    report["max"] = max(report.values())
    return report


# --- flag K-matrices -------------------------------------------------------------------------------------


def flag_report(datum: CartanDatum, eps: SignFunction, M: Module, N: Module) -> Dict[str, object]:
    """Checks for K_eps of a flag character eps: I -> {0, 1}."""
    if not eps.flag:
        raise ModuleMismatchError(f"{eps} is not a flag character.")
    M.compatible(N)
    M.ctx.activate()
    family = flag_family(datum, eps)
    K = family.on(M)
    tau0 = datum.tau0
    report: Dict[str, object] = {"E": mp.zero, "F": mp.zero}
    for r in datum.index_set:
        e = eps.values[tau0[r]]
        report["E"] = max(report["E"], la.residual(la.matmul(K, M.E[r]), la.scalar_multiple(la.matmul(M.E[r], K), e)))
        report["F"] = max(report["F"], la.residual(la.matmul(M.F[r], K), la.scalar_multiple(la.matmul(K, M.F[r]), e)))
    MN = tensor(M, N)
    omega = omega_epsilon(M, N, eps)
    K_MN = family.on(MN)
    K1, K2 = _legs(family, M, N)
    pair = r_matrix(M, N)
    omega21 = flip(omega_epsilon(N, M, eps), N.dim, M.dim)
    report["omega"] = la.residual(la.matmul(pair.R, omega), la.matmul(omega21, pair.R))
    lhs = la.matmul(omega, K_MN)
    report["coproduct"] = la.residual(lhs, la.kron(K, family.on(N)))
    report["modified"] = la.residual(lhs, la.mdot(pair.inverse(), K1, pair.R, K2))
    report["modified_op"] = la.residual(lhs, la.mdot(K2, r_flip(M, N), K1, _r21_inverse(M, N)))
    report["star"] = la.residual(la.dagger(K), K)
    report["counit"] = abs(family.on(trivial_module(datum, M.ctx))[0, 0] - 1)
    report["max"] = max(report.values())
    return report
