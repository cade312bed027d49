"""Numeric field configuration: the value of q, working precision and tolerance.

Every floating computation in the engine goes through a ``ScalarContext``.
Rational exponents are kept exact until the very last step, where
``q_power`` turns them into an ``mpf``.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import mp, mpc, mpf

from .errors import PrecisionError

logger = logging.getLogger(__name__)


def to_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction, ``"p/q"`` string or decimal string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(str(value).strip())


@dataclass(frozen=True)
class ScalarContext:
    q: Fraction = Fraction(1, 2)
    precision_bits: int = 300
    tol: float = 1e-60

    def __post_init__(self):
        object.__setattr__(self, "q", to_fraction(self.q))
        object.__setattr__(self, "tol", float(self.tol))
        if self.q <= 0 or self.q == 1:
            raise ValueError(f"q must be positive and different from 1, got {self.q}.")
        if self.precision_bits < 53:
            raise ValueError("precision_bits must be at least 53.")
        if not self.tol > 0:
            raise ValueError("tol must be positive.")
        # round-off floor: three quarters of the working bits must stay below tol
        if self.tol < 2.0 ** (-(3 * self.precision_bits) // 4):
            raise PrecisionError(
                f"tol={self.tol:g} is below the round-off floor of {self.precision_bits}-bit arithmetic."
            )

    def activate(self) -> "ScalarContext":
        """Set the global mpmath precision to this context and return it."""
        if mp.prec != self.precision_bits:
            mp.prec = self.precision_bits
        return self

    def as_dict(self) -> dict:
        return {"q": str(self.q), "precision_bits": self.precision_bits, "tol": self.tol}

    # --- scalars -------------------------------------------------------

    @property
    def qf(self) -> mpf:
        self.activate()
        return mpf(self.q.numerator) / self.q.denominator

    @property
    def tol_mpf(self) -> mpf:
        self.activate()
        return mpf(self.tol)

    def q_power(self, exponent) -> mpf:
        """q**exponent for a rational exponent."""
        return _q_power(self, to_fraction(exponent))

    def qnumber(self, n, d=1) -> mpf:
        """Symmetric quantum number [n]_{q^d} = (q_d^n - q_d^-n)/(q_d - q_d^-1)."""
        n = to_fraction(n)
        d = to_fraction(d)
        if n == 0:
            return mp.zero
        return (self.q_power(n * d) - self.q_power(-n * d)) / (self.q_power(d) - self.q_power(-d))

    def bracket(self, n) -> mpf:
        """Half-step bracket (q^{n/2} - q^{-n/2})/(q^{1/2} - q^{-1/2})."""
        return self.qnumber(n, Fraction(1, 2))

    def qfactorial(self, n: int, d=1) -> mpf:
        out = mp.one
        for k in range(1, n + 1):
            out *= self.qnumber(k, d)
        return out


@lru_cache(maxsize=4096)
def _q_power(ctx: ScalarContext, exponent: Fraction) -> mpf:
    ctx.activate()
    if exponent == 0:
        return mp.one
    base = mpf(ctx.q.numerator) / ctx.q.denominator
    if exponent.denominator == 1:
        return base ** int(exponent)
    return mp.power(base, mpf(exponent.numerator) / exponent.denominator)


def root_of_unity(x) -> object:
    """e^{2 pi i x} for rational x, exact for the fourth roots of unity."""
    x = to_fraction(x) % 1
    if x == 0:
        return mp.one
    if x == Fraction(1, 2):
        return -mp.one
    if x == Fraction(1, 4):
        return mpc(0, 1)
    if x == Fraction(3, 4):
        return mpc(0, -1)
    return mpc(mp.cospi(2 * mpf(x.numerator) / x.denominator), mp.sinpi(2 * mpf(x.numerator) / x.denominator))


def is_small(value, scale, ctx: ScalarContext) -> bool:
    """Three-way rank decision: True below tol, False above sqrt(tol), else PrecisionError."""
    value = abs(value)
    scale = abs(scale) or mp.one
    if value <= ctx.tol_mpf * scale:
        return True
    if value >= mp.sqrt(ctx.tol_mpf) * scale:
        return False
    logger.warning("Rank decision in the gray zone: %s relative to scale %s", mp.nstr(value, 5), mp.nstr(scale, 5))
    raise PrecisionError(f"Ambiguous rank decision: |value|={mp.nstr(value, 5)} is between tol and sqrt(tol).")
