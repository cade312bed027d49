"""Integer Smith normal form and congruences A x = b (mod Z^m) over the rationals."""
import logging
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from sympy import Matrix, Rational, eye

logger = logging.getLogger(__name__)


def _least_entry(matr: Matrix, s: int):
    rows, cols = matr.shape
    pos, num = None, 0
    for i in range(s, rows):
        for j in range(s, cols):
            if matr[i, j] != 0 and (pos is None or abs(matr[i, j]) < num):
                pos, num = (i, j), abs(matr[i, j])
    return pos


# Moves least element of the block starting at [s, s] into start position
def _move_least_to_start(matr: Matrix, left: Matrix, right: Matrix, s: int) -> None:
    i, j = _least_entry(matr, s)
    if i != s:
        matr.row_swap(s, i)
        left.row_swap(s, i)
    if j != s:
        matr.col_swap(s, j)
        right.col_swap(s, j)
    if matr[s, s] < 0:
        matr.row_op(s, lambda val, col: -val)
        left.row_op(s, lambda val, col: -val)


# Reduces the edging at [s, s] by the pivot; leaves remainders smaller than the pivot
def _modify_edging(matr: Matrix, left: Matrix, right: Matrix, s: int) -> None:
    rows, cols = matr.shape
    for i in range(s + 1, rows):
        if matr[i, s] != 0:
            k = matr[i, s] // matr[s, s]
            matr.row_op(i, lambda val, col: val - k * matr[s, col])
            left.row_op(i, lambda val, col: val - k * left[s, col])
    for j in range(s + 1, cols):
        if matr[s, j] != 0:
            k = matr[s, j] // matr[s, s]
            matr.col_op(j, lambda val, row: val - k * matr[row, s])
            right.col_op(j, lambda val, row: val - k * right[row, s])


def _edging_is_zero(matr: Matrix, s: int) -> bool:
    rows, cols = matr.shape
    return all(matr[i, s] == 0 for i in range(s + 1, rows)) and all(matr[s, j] == 0 for j in range(s + 1, cols))


def _non_divisible_row(matr: Matrix, s: int) -> Optional[int]:
    rows, cols = matr.shape
    for i in range(s + 1, rows):
        for j in range(s + 1, cols):
            if matr[i, j] % matr[s, s] != 0:
                return i
    return None


def smith_form(A) -> Tuple[Matrix, Matrix, Matrix]:
    """(D, U, V) with U A V = D diagonal, d_1 | d_2 | ... and U, V unimodular."""
    matr = Matrix(A)
    rows, cols = matr.shape
    left, right = eye(rows), eye(cols)
    for s in range(min(rows, cols)):
        if _least_entry(matr, s) is None:
            break
        while True:
            _move_least_to_start(matr, left, right, s)
            _modify_edging(matr, left, right, s)
            if not _edging_is_zero(matr, s):
                continue
            bad = _non_divisible_row(matr, s)
            if bad is None:
                break
            matr.row_op(s, lambda val, col: val + matr[bad, col])
            left.row_op(s, lambda val, col: val + left[bad, col])
    return matr, left, right


def invariant_factors(A) -> Tuple[int, ...]:
    D, _, _ = smith_form(A)
    return tuple(int(D[i, i]) for i in range(min(D.shape)) if D[i, i] != 0)


def solve_congruence(A, b: Sequence) -> Optional[Tuple[Fraction, ...]]:
    """A rational x with A x - b integral, or None.

    Free coordinates of the Smith basis are set to zero, so the answer is
    deterministic for given (A, b).
    """
    A = Matrix(A)
    rows, cols = A.shape
    D, U, V = smith_form(A)
    rhs = U * Matrix([Rational(Fraction(x).numerator, Fraction(x).denominator) for x in b])
    y = [Rational(0)] * cols
    for i in range(rows):
        d = D[i, i] if i < cols else 0
        if d != 0:
            y[i] = rhs[i] / d
        elif not rhs[i].is_integer:
            logger.debug("Congruence has no solution: row %d of the Smith system reads 0 = %s", i, rhs[i])
            return None
    x = V * Matrix(y)
    return tuple(Fraction(int(v.p), int(v.q)) for v in x)


def residue_mod_one(values: Sequence) -> Tuple[Fraction, ...]:
    return tuple(Fraction(v) - (Fraction(v).numerator // Fraction(v).denominator) for v in values)
