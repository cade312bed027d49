"""Dense linear algebra over mpmath scalars stored in numpy object arrays.

All zero entries of matrices built here share the single ``mp.zero``
object.  Generator matrices are very sparse, so products go through the
nonzero pattern unless both factors are dense.
"""
import logging
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp, mpc, mpf

from .errors import PrecisionError, SolveError
from .scalars import ScalarContext, is_small

logger = logging.getLogger(__name__)

_DENSE_FRACTION = 0.3
_conj = np.frompyfunc(mp.conj, 1, 1)
_abs2 = np.frompyfunc(lambda x: mp.re(x) ** 2 + mp.im(x) ** 2 if x else mp.zero, 1, 1)


def zeros(n: int, m: Optional[int] = None) -> np.ndarray:
    return np.full((n, n if m is None else m), mp.zero, dtype=object)


def eye(n: int) -> np.ndarray:
    out = zeros(n)
    for i in range(n):
        out[i, i] = mp.one
    return out


def diag(values: Sequence) -> np.ndarray:
    out = zeros(len(values))
    for i, v in enumerate(values):
        out[i, i] = v
    return out


def diagonal(a: np.ndarray) -> list:
    return [a[i, i] for i in range(a.shape[0])]


def vector(values: Sequence) -> np.ndarray:
    out = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        out[i] = v
    return out


def zero_vector(n: int) -> np.ndarray:
    return np.full(n, mp.zero, dtype=object)


def unit_vector(n: int, i: int) -> np.ndarray:
    out = zero_vector(n)
    out[i] = mp.one
    return out


def density(a: np.ndarray) -> float:
    return np.count_nonzero(a) / max(a.size, 1)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[-1] != b.shape[0]:
        raise ValueError(f"Shape mismatch in product: {a.shape} x {b.shape}.")
    if b.ndim == 1:
        return matvec(a, b)
    n, k = a.shape
    m = b.shape[1]
    if k == 0:
        return zeros(n, m)
    if density(a) > _DENSE_FRACTION and density(b) > _DENSE_FRACTION:
        return np.dot(a, b)
    out = zeros(n, m)
    b_rows = [np.flatnonzero(b[j]) for j in range(k)]
    for i in range(n):
        acc = {}
        for j in np.flatnonzero(a[i]):
            aij = a[i, j]
            for col in b_rows[j]:
                acc[col] = acc.get(col, mp.zero) + aij * b[j, col]
        for col, value in acc.items():
            out[i, col] = value
    return out


def matvec(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = zero_vector(a.shape[0])
    nz = np.flatnonzero(v)
    if len(nz) == 0:
        return out
    for i in range(a.shape[0]):
        row = a[i, nz]
        if np.count_nonzero(row):
            out[i] = mp.fsum(x * y for x, y in zip(row, v[nz]) if x)
    return out


def mdot(*mats: np.ndarray) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = matmul(out, m)
    return out


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; index (i, j) of the result is i * dim(b) + j."""
    p, r = b.shape
    out = zeros(a.shape[0] * p, a.shape[1] * r)
    b_nz = list(zip(*np.nonzero(b)))
    for i, j in zip(*np.nonzero(a)):
        aij = a[i, j]
        for k, l in b_nz:
            out[i * p + k, j * r + l] = aij * b[k, l]
    return out


def kron_vec(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = zero_vector(len(u) * len(v))
    for i in np.flatnonzero(u):
        for j in np.flatnonzero(v):
            out[i * len(v) + j] = u[i] * v[j]
    return out


def conj(a: np.ndarray) -> np.ndarray:
    return _conj(a).astype(object)


def dagger(a: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(conj(a).T)


def transpose(a: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(a.T)


def inner(u: np.ndarray, v: np.ndarray):
    """<u, v>, antilinear in the first slot."""
    nz = np.flatnonzero(u)
    return mp.fsum(mp.conj(u[i]) * v[i] for i in nz)


def norm(a: np.ndarray) -> mpf:
    """Frobenius norm (Euclidean for vectors)."""
    nz = a[a != 0]
    if nz.size == 0:
        return mp.zero
    return mp.sqrt(mp.fsum(_abs2(nz)))


def residual(a: np.ndarray, b: np.ndarray) -> mpf:
    """||a - b|| relative to max(1, ||a||, ||b||)."""
    if a.shape != b.shape:
        raise ValueError(f"Residual of operators with shapes {a.shape} and {b.shape}.")
    scale = max(mp.one, norm(a), norm(b))
    return norm(a - b) / scale


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return matmul(a, b) - matmul(b, a)


def scalar_multiple(a: np.ndarray, s) -> np.ndarray:
    out = zeros(*a.shape) if a.ndim == 2 else zero_vector(a.shape[0])
    if not s:
        return out
    idx = np.nonzero(a)
    out[idx] = a[idx] * s
    return out


def to_mp(a) -> np.ndarray:
    """Object array of mpf/mpc from nested sequences."""
    arr = np.array(a, dtype=object)
    flat = arr.reshape(-1)
    for i, x in enumerate(flat):
        if isinstance(x, (mpf, mpc)):
            continue
        if x == 0:
            flat[i] = mp.zero
        elif isinstance(x, Fraction):
            flat[i] = mpf(x.numerator) / x.denominator
        else:
            flat[i] = mpc(x) if isinstance(x, complex) else mpf(x)
    return arr


def is_real(a: np.ndarray) -> bool:
    return all(not isinstance(x, mpc) or x.imag == 0 for x in a.reshape(-1))


def real_part(a: np.ndarray) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    flat_in, flat_out = a.reshape(-1), out.reshape(-1)
    for i, x in enumerate(flat_in):
        value = mp.re(x)
        flat_out[i] = value if value else mp.zero
    return out


# --- elimination -----------------------------------------------------------


def _decision_scale(magnitudes) -> mpf:
    """Largest magnitude, never below 1: inputs made only of round-off must not set their own scale."""
    return max([mp.one] + list(magnitudes))


def _pivoted_lu(a: np.ndarray, ctx: ScalarContext):
    """Full-pivot Gaussian elimination on a copy of a.

    Returns (reduced rows, row order, column order, rank).  Pivots below
    tol relative to the largest entry end the elimination.
    """
    m = np.array(a, dtype=object, copy=True)
    n_rows, n_cols = m.shape
    rows, cols = list(range(n_rows)), list(range(n_cols))
    scale = _decision_scale(abs(x) for x in m.reshape(-1))
    rank = 0
    for step in range(min(n_rows, n_cols)):
        sub = m[step:, step:]
        mags = [(abs(sub[i, j]), i, j) for i, j in zip(*np.nonzero(sub))]
        if not mags:
            break
        best, pi, pj = max(mags, key=lambda t: t[0])
        if is_small(best, scale, ctx):
            break
        pi += step
        pj += step
        m[[step, pi]] = m[[pi, step]]
        rows[step], rows[pi] = rows[pi], rows[step]
        m[:, [step, pj]] = m[:, [pj, step]]
        cols[step], cols[pj] = cols[pj], cols[step]
        pivot = m[step, step]
        for i in range(step + 1, n_rows):
            if m[i, step]:
                factor = m[i, step] / pivot
                m[i, step:] = m[i, step:] - factor * m[step, step:]
                m[i, step] = mp.zero
        rank += 1
    return m, rows, cols, rank


def rank(a: np.ndarray, ctx: ScalarContext) -> int:
    if a.size == 0:
        return 0
    return _pivoted_lu(a, ctx)[3]


def nullspace(a: np.ndarray, ctx: ScalarContext) -> List[np.ndarray]:
    """Basis of the kernel of a (not orthonormalized)."""
    n_cols = a.shape[1]
    if a.shape[0] == 0:
        return [unit_vector(n_cols, j) for j in range(n_cols)]
    m, _, cols, r = _pivoted_lu(a, ctx)
    basis = []
    for free in range(r, n_cols):
        x = zero_vector(n_cols)
        x[free] = mp.one
        for i in range(r - 1, -1, -1):
            acc = mp.fsum(m[i, j] * x[j] for j in range(i + 1, n_cols) if x[j] and m[i, j])
            x[i] = -acc / m[i, i]
        out = zero_vector(n_cols)
        for pos, col in enumerate(cols):
            out[col] = x[pos] if x[pos] else mp.zero
        basis.append(out)
    return basis


def solve(a: np.ndarray, b: np.ndarray, ctx: ScalarContext) -> np.ndarray:
    """Solve a x = b for square nonsingular a (b a vector or a matrix)."""
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("solve() needs a square matrix.")
    rhs = b.reshape(n, -1)
    aug = np.concatenate([a, rhs], axis=1)
    m = np.array(aug, dtype=object, copy=True)
    cols = list(range(n))
    scale = _decision_scale(abs(x) for x in a.reshape(-1))
    for step in range(n):
        sub = m[step:, step:n]
        mags = [(abs(sub[i, j]), i, j) for i, j in zip(*np.nonzero(sub))]
        if not mags:
            raise SolveError("Singular system.", grade=step)
        best, pi, pj = max(mags, key=lambda t: t[0])
        if is_small(best, scale, ctx):
            raise SolveError("Singular system.", grade=step, residual=best)
        pi += step
        pj += step
        m[[step, pi]] = m[[pi, step]]
        m[:, [step, pj]] = m[:, [pj, step]]
        cols[step], cols[pj] = cols[pj], cols[step]
        pivot = m[step, step]
        for i in range(n):
            if i != step and m[i, step]:
                factor = m[i, step] / pivot
                m[i, step:] = m[i, step:] - factor * m[step, step:]
                m[i, step] = mp.zero
    x = np.empty((n, rhs.shape[1]), dtype=object)
    for i in range(n):
        x[cols[i]] = m[i, n:] / m[i, i]
    x[x == 0] = mp.zero
    return x.reshape(b.shape)


def inverse(a: np.ndarray, ctx: ScalarContext) -> np.ndarray:
    return solve(a, eye(a.shape[0]), ctx)


def inverse_diagonal(a: np.ndarray) -> np.ndarray:
    return diag([1 / x for x in diagonal(a)])


# --- orthogonalization -------------------------------------------------------


def gram_schmidt(vectors: Sequence[np.ndarray], ctx: ScalarContext,
                 ip: Callable = inner) -> Tuple[List[np.ndarray], List[int]]:
    """Orthonormal basis of span(vectors); returns (basis, indices of accepted vectors).

    Vectors whose residual is below tol relative to the largest input norm (at least 1)
    are dropped; a residual between tol and sqrt(tol) raises PrecisionError.
    """
    basis, accepted = [], []
    scale2 = _decision_scale(mp.re(ip(v, v)) for v in vectors)
    for idx, v in enumerate(vectors):
        w = v.copy()
        for _ in range(2):
            for e in basis:
                c = ip(e, w)
                if c:
                    w = w - c * e
        n2 = mp.re(ip(w, w))
        if is_small(n2, scale2, ctx):
            continue
        basis.append(w / mp.sqrt(n2))
        accepted.append(idx)
    return basis, accepted


def orthonormal_complement(basis: Sequence[np.ndarray], n: int, ctx: ScalarContext) -> List[np.ndarray]:
    extended, _ = gram_schmidt(list(basis) + [unit_vector(n, i) for i in range(n)], ctx)
    return extended[len(basis):]


def lstsq(columns: Sequence[np.ndarray], rhs: Sequence[np.ndarray], ctx: ScalarContext,
          ip: Callable = inner, grade=None):
    """Least squares for sum_j x_j columns[j] = rhs[k], one solve per right-hand side.

    Uses the normal equations and certifies uniqueness (nonsingular Gram
    matrix).  Returns (solutions, max relative residual).
    """
    k = len(columns)
    gram = zeros(k)
    for i in range(k):
        for j in range(i, k):
            value = ip(columns[i], columns[j])
            gram[i, j] = value
            gram[j, i] = mp.conj(value)
    try:
        gram_inv = inverse(gram, ctx)
    except SolveError as exc:
        raise SolveError("Homogeneous solution space is nonzero.", grade=grade) from exc
    solutions, worst = [], mp.zero
    for b in rhs:
        proj = vector([ip(c, b) for c in columns])
        x = matvec(gram_inv, proj)
        fit = sum((x[j] * columns[j] for j in range(k) if x[j]), zero_vector(len(b)))
        err = norm(fit - b) / max(mp.one, norm(b))
        worst = max(worst, err)
        solutions.append(x)
    return solutions, worst


def check_unitary(u: np.ndarray) -> mpf:
    return residual(matmul(dagger(u), u), eye(u.shape[1]))


def is_zero(a: np.ndarray, ctx: ScalarContext) -> bool:
    return norm(a) <= ctx.tol_mpf


def assert_finite(a: np.ndarray) -> None:
    for x in a.reshape(-1):
        if mp.isnan(x) or mp.isinf(x):
            raise PrecisionError("Non-finite entry in operator.")
