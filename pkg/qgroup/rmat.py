"""Universal R-matrix on module pairs, ribbon element and the coboundary element t.

R = R~ Q with Q(x (x) y) = q^{-(wt x, wt y)} x (x) y and
R~ = sum_beta R~_beta, R~_beta in U_q(n)_beta (x) U_q(n^-)_{-beta}.  On a pair
(M, N) we write R~ = sum e_{i'i} (x) Y_{i'i} over matrix units of M; every
Y_{i'i} is solved grade by grade inside the span of F-monomials on N from

    Y E_r - E_r Y = sum_j' E_r[i', j'] K_r Y_{j'i} - sum_j E_r[j, i] Y_{i'j} K_r^-1.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp

from . import linalg as la
from .braid import T_longest, antipode_transport
from .errors import SolveError
from .repn import ElementFamily, Module, monomial_span, scalar_on_components, tensor, twist_module

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class RPair:
    M: Module
    N: Module
    Q: np.ndarray
    Rtilde: np.ndarray
    R: np.ndarray
    blocks: Dict[Tuple[int, ...], Dict[Tuple[int, int], np.ndarray]] = field(repr=False, default_factory=dict)
    residual: object = None
    _inverse: Optional[np.ndarray] = field(default=None, repr=False)

    def inverse(self) -> np.ndarray:
        if self._inverse is None:
            # R^-1 = Q^-1 R~^-1 with R~ unipotent
            self._inverse = la.matmul(la.inverse_diagonal(self.Q), la.inverse(self.Rtilde, self.M.ctx))
        return self._inverse

    def block(self, beta: Sequence[int]) -> np.ndarray:
        """R~_beta as an operator on M (x) N."""
        return _assemble(self.M, self.N, {tuple(beta): self.blocks.get(tuple(beta), {})})


def q_matrix(M: Module, N: Module) -> np.ndarray:
    datum, ctx = M.datum, M.ctx
    return la.diag([ctx.q_power(-datum.form(a, b)) for a in M.weights for b in N.weights])


def _units_by_grade(M: Module) -> Dict[Tuple[int, ...], list]:
    datum = M.datum
    grades: Dict[Tuple[int, ...], list] = {}
    roots = [datum.to_root(w) for w in M.weights]
    for ip, cp in enumerate(roots):
        for i, c in enumerate(roots):
            diff = tuple(a - b for a, b in zip(cp, c))
            if all(x >= 0 and x.denominator == 1 for x in diff) and any(diff):
                grades.setdefault(tuple(int(x) for x in diff), []).append((ip, i))
    return dict(sorted(grades.items(), key=lambda kv: (sum(kv[0]), kv[0])))


def _assemble(M: Module, N: Module, blocks) -> np.ndarray:
    out = la.zeros(M.dim * N.dim)
    n = N.dim
    for units in blocks.values():
        for (ip, i), Y in units.items():
            for a, b in zip(*np.nonzero(Y)):
                out[ip * n + a, i * n + b] = Y[a, b]
    return out


def _stack(ops) -> np.ndarray:
    return np.concatenate([op.reshape(-1) for op in ops])


def r_matrix(M: Module, N: Module) -> RPair:
    """Solve R~ grade by grade and certify uniqueness of each grade."""
    M.compatible(N)
    key = ("R", id(N))
    cached = M.cache.get(key)
    if cached is not None and cached.N is N:
        return cached
    ctx, datum = M.ctx, M.datum
    ctx.activate()
    Kn = [N.Kr(r) for r in datum.index_set]
    Kn_inv = [N.Kr(r, -1) for r in datum.index_set]
    solved: Dict[Tuple[int, int], np.ndarray] = {(i, i): N.identity() for i in range(M.dim)}
    blocks: Dict[Tuple[int, ...], Dict[Tuple[int, int], np.ndarray]] = {}
    worst = mp.zero
    zero = la.zeros(N.dim)
    for beta, units in _units_by_grade(M).items():
        span = monomial_span(N, beta, raising=False)
        rhs = []
        for ip, i in units:
            parts = []
            for r in datum.index_set:
                total = zero
                Er = M.E[r]
                for jp in np.flatnonzero(Er[ip]):
                    Y = solved.get((int(jp), i))
                    if Y is not None:
                        total = total + Er[ip, jp] * la.matmul(Kn[r], Y)
                for j in np.flatnonzero(Er[:, i]):
                    Y = solved.get((ip, int(j)))
                    if Y is not None:
                        total = total - Er[j, i] * la.matmul(Y, Kn_inv[r])
                parts.append(total)
            rhs.append(_stack(parts))
        if not span:
            bad = max((la.norm(b) for b in rhs), default=mp.zero)
            if bad > mp.sqrt(ctx.tol_mpf):
                raise SolveError("R-matrix equations inconsistent: empty span with nonzero data.", grade=beta, residual=bad)
            continue
        columns = [_stack([la.commutator(S, N.E[r]) for r in datum.index_set]) for S in span]
        solutions, err = la.lstsq(columns, rhs, ctx, grade=beta)
        if err > mp.sqrt(ctx.tol_mpf):
            raise SolveError(f"R-matrix equations inconsistent at grade {beta}.", grade=beta, residual=err)
        worst = max(worst, err)
        grade_units = {}
        for (ip, i), x in zip(units, solutions):
            Y = zero
            for coeff, S in zip(x, span):
                if coeff:
                    Y = Y + coeff * S
            solved[(ip, i)] = Y
            grade_units[(ip, i)] = Y
        blocks[beta] = grade_units
    blocks[(0,) * datum.rank] = {(i, i): N.identity() for i in range(M.dim)}
    Rtilde = _assemble(M, N, blocks)
    Q = q_matrix(M, N)
    pair = RPair(M, N, Q, Rtilde, la.matmul(Rtilde, Q), blocks=blocks, residual=worst)
    pair = M.remember(key, pair)
    logger.info("R-matrix on %s x %s solved over %d grades (residual %s)", M.label, N.label, len(blocks), mp.nstr(worst, 3))
    return pair


# --- leg bookkeeping ------------------------------------------------------------------


def swap_matrix(m: int, n: int) -> np.ndarray:
    """P: A (x) B -> B (x) A for dim A = m, dim B = n."""
    out = la.zeros(m * n)
    for i in range(m):
        for j in range(n):
            out[j * m + i, i * n + j] = mp.one
    return out


def flip(op: np.ndarray, m: int, n: int) -> np.ndarray:
    """Operator on A (x) B -> the same operator with legs exchanged, on B (x) A."""
    P = swap_matrix(m, n)
    return la.mdot(P, op, la.transpose(P))


def r_flip(M: Module, N: Module) -> np.ndarray:
    """R_21 on M (x) N."""
    return flip(r_matrix(N, M).R, N.dim, M.dim)


def r_matrix_inverse(M: Module, N: Module) -> np.ndarray:
    return r_matrix(M, N).inverse()


def r_twisted(M: Module, N: Module, tau: Sequence[int]) -> np.ndarray:
    """R_tau = (tau (x) id) R on M (x) N."""
    return r_matrix(twist_module(M, tau), N).R


def r_twisted_21(M: Module, N: Module, tau: Sequence[int]) -> np.ndarray:
    """R_{tau,21} = flip of (tau (x) id) R, on M (x) N."""
    return flip(r_matrix(twist_module(N, tau), M).R, N.dim, M.dim)


def leg_13(op_ac: np.ndarray, a: int, b: int, c: int) -> np.ndarray:
    """Operator on A (x) C placed on legs 1, 3 of A (x) B (x) C."""
    P23 = la.kron(la.eye(a), swap_matrix(b, c))
    return la.mdot(la.transpose(P23), la.kron(op_ac, la.eye(b)), P23)


# --- ribbon and coboundary ------------------------------------------------------------------


def ribbon(M: Module) -> np.ndarray:
    """v acts by q^{-(varpi, varpi + 2 rho)} on each isotypic component."""
    datum, ctx = M.datum, M.ctx
    two_rho = tuple(2 * x for x in datum.rho)
    return scalar_on_components(M, lambda w: ctx.q_power(-datum.form(w, tuple(a + b for a, b in zip(w, two_rho)))))


def coboundary_t(M: Module) -> np.ndarray:
    """t = c K_{-rho} T_{w0}, with c x = q^{(wt x, wt x)/2} x.

    T_{w0} is the unprimed operator (exponent q_r^{b - ac}); the primed one gives
    Ad(t)E_r = -q_r^2 F_r K_r^-2 and breaks the coboundary identity.
    """
    def build():
        datum, ctx = M.datum, M.ctx
        c = la.diag([ctx.q_power(datum.form(w, w) / 2) for w in M.weights])
        K = M.K(tuple(-x for x in datum.rho))
        return la.mdot(c, K, T_longest(M))

    return M.memo("coboundary_t", build)


coboundary_family = ElementFamily("t", coboundary_t)


def coboundary_inverse(M: Module) -> np.ndarray:
    return M.memo("coboundary_t^-1", lambda: la.inverse(coboundary_t(M), M.ctx))


# --- reports ------------------------------------------------------------------------------------


def r_matrix_report(M: Module, N: Module) -> Dict[str, object]:
    """Intertwining, unitarity and grade-one residuals on a pair."""
    pair = r_matrix(M, N)
    MN = tensor(M, N)
    NM_flip_E = [flip(tensor(N, M).E[r], N.dim, M.dim) for r in M.datum.index_set]
    NM_flip_F = [flip(tensor(N, M).F[r], N.dim, M.dim) for r in M.datum.index_set]
    ctx = M.ctx
    report = {"solve": pair.residual}
    report["intertwine"] = max(
        max(la.residual(la.matmul(pair.R, MN.E[r]), la.matmul(NM_flip_E[r], pair.R)),
            la.residual(la.matmul(pair.R, MN.F[r]), la.matmul(NM_flip_F[r], pair.R)))
        for r in M.datum.index_set)
    if M.unitary and N.unitary:
        report["star"] = la.residual(la.dagger(pair.R), r_flip(M, N))
    grade_one = mp.zero
    for r in M.datum.index_set:
        beta = tuple(1 if k == r else 0 for k in M.datum.index_set)
        qr = ctx.q_power(M.datum.d[r])
        expected = (1 / qr - qr) * la.kron(M.E[r], N.F[r])
        grade_one = max(grade_one, la.residual(pair.block(beta), expected))
    report["grade_one"] = grade_one
    return report


def extremal_report(M: Module, N: Module) -> object:
    """R(xi (x) eta) = q^{-(wt xi, wt eta)} xi (x) eta for highest xi, lowest eta."""
    pair = r_matrix(M, N)
    top = 0
    bottom = N.dim - 1
    vec = la.kron_vec(la.unit_vector(M.dim, top), la.unit_vector(N.dim, bottom))
    expected = M.ctx.q_power(-M.datum.form(M.weights[top], N.weights[bottom])) * vec
    return la.residual(la.matmul(pair.R, vec), expected)


def quasitriangular_report(A: Module, B: Module, C: Module) -> Dict[str, object]:
    """(Delta (x) id)R = R13 R23, (id (x) Delta)R = R13 R12 and Yang-Baxter on A (x) B (x) C."""
    a, b, c = A.dim, B.dim, C.dim
    R12 = la.kron(r_matrix(A, B).R, la.eye(c))
    R23 = la.kron(la.eye(a), r_matrix(B, C).R)
    R13 = leg_13(r_matrix(A, C).R, a, b, c)
    AB = tensor(A, B)
    BC = tensor(B, C)
    left = r_matrix(AB, C).R
    right = r_matrix(A, BC).R
    return {
        "delta_left": la.residual(left, la.matmul(R13, R23)),
        "delta_right": la.residual(right, la.matmul(R13, R12)),
        "yang_baxter": la.residual(la.mdot(R12, R13, R23), la.mdot(R23, R13, R12)),
    }


def ribbon_report(M: Module, N: Module) -> object:
    """R_21 R = Delta(v)(v^-1 (x) v^-1)."""
    MN = tensor(M, N)
    v_inv = la.kron(la.inverse_diagonal(ribbon(M)), la.inverse_diagonal(ribbon(N)))
    return la.residual(la.matmul(r_flip(M, N), r_matrix(M, N).R), la.matmul(ribbon(MN), v_inv))


def coboundary_report(M: Module, N: Module) -> Dict[str, object]:
    """R = (t (x) t) Delta(t^-1) = Delta^op(t^-1)(t (x) t), plus Ad(t) on generators."""
    MN = tensor(M, N)
    NM = tensor(N, M)
    tt = la.kron(coboundary_t(M), coboundary_t(N))
    R = r_matrix(M, N).R
    report = {
        "coboundary": la.residual(R, la.matmul(tt, coboundary_inverse(MN))),
        "coboundary_op": la.residual(R, la.matmul(flip(coboundary_inverse(NM), N.dim, M.dim), tt)),
    }
    report.update(adt_report(M))
    return report


def adt_report(M: Module) -> Dict[str, object]:
    """Ad(t)K_omega = K_{-tau0 omega}, Ad(t)E_r = -q_r^2 F_{tau0 r}, Ad(t)F_r = -q_r^-2 E_{tau0 r}."""
    datum, ctx = M.datum, M.ctx
    t, t_inv = coboundary_t(M), coboundary_inverse(M)
    tau0 = datum.tau0
    worst_K = worst_E = worst_F = mp.zero
    for r in datum.index_set:
        q2 = ctx.q_power(2 * datum.d[r])
        fund = tuple(1 if k == r else 0 for k in datum.index_set)
        image = tuple(-x for x in datum.permute_weight(tau0, fund))
        worst_K = max(worst_K, la.residual(la.mdot(t, M.K(fund), t_inv), M.K(image)))
        worst_E = max(worst_E, la.residual(la.mdot(t, M.E[r], t_inv), -q2 * M.F[tau0[r]]))
        worst_F = max(worst_F, la.residual(la.mdot(t, M.F[r], t_inv), -M.E[tau0[r]] / q2))
    return {"Ad_t_K": worst_K, "Ad_t_E": worst_E, "Ad_t_F": worst_F}


def star_antipode_t_report(M: Module) -> object:
    """S(t)^* = K_{4 rho} t, from R(T_{w0})^* = T_{w0} and S(x)^* = R(Ad(K_{-rho}) x)^*."""
    four_rho = tuple(4 * x for x in M.datum.rho)
    expected = la.matmul(M.K(four_rho), coboundary_t(M))
    return la.residual(la.dagger(antipode_transport(coboundary_family, M)), expected)
