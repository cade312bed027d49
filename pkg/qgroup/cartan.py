"""Root systems, weight lattices and Weyl groups in exact rational arithmetic.

Conventions
-----------
* Simple roots are indexed ``0..n-1`` internally; every text surface
  (CLI, fixtures, diagram grammar) is 1-based.
* Weights are tuples in fundamental-weight coordinates ``m``.  Root
  coordinates are ``c = A^{-1} m``.
* Coweights are tuples in simple-coroot coordinates, so that
  ``(chi, lambda) = sum_k chi_k m_k``.
* ``a_rs = (alpha_r^vee, alpha_s) = 2 (alpha_r, alpha_s) / (alpha_r, alpha_r)``
  and ``(alpha_r, alpha_r) = 2 d_r``.
"""
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Optional, Sequence, Tuple

import sympy

from .errors import CartanError

logger = logging.getLogger(__name__)

Weight = Tuple
Word = Tuple[int, ...]

_RANK_RANGE = {"A": (1, 9), "B": (2, 9), "C": (2, 9), "D": (4, 9), "E": (6, 8), "F": (4, 4), "G": (2, 2)}
_HALF = Fraction(1, 2)


def _simple_factor(letter: str, n: int):
    """Edges and symmetrizers of a simple factor, 0-based."""
    if letter == "A":
        return [(i, i + 1) for i in range(n - 1)], [Fraction(1)] * n
    if letter == "B":
        return [(i, i + 1) for i in range(n - 1)], [Fraction(1)] * (n - 1) + [_HALF]
    if letter == "C":
        return [(i, i + 1) for i in range(n - 1)], [_HALF] * (n - 1) + [Fraction(1)]
    if letter == "D":
        return [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)], [Fraction(1)] * n
    if letter == "E":
        edges = [(0, 2), (2, 3), (3, 4), (1, 3)] + [(k, k + 1) for k in range(4, n - 1)]
        return edges, [Fraction(1)] * n
    if letter == "F":
        # chain 1-2-3-4 with 1, 2 short
        return [(0, 1), (1, 2), (2, 3)], [_HALF, _HALF, Fraction(1), Fraction(1)]
    if letter == "G":
        return [(0, 1)], [Fraction(1), Fraction(3)]
    raise CartanError(f"Unknown type label '{letter}'.")


def parse_labels(text) -> Tuple[str, ...]:
    """``"A1+A1"`` or ``["A1", "A1"]`` -> ``("A1", "A1")``."""
    parts = text if isinstance(text, (list, tuple)) else str(text).split("+")
    labels = []
    for part in parts:
        label = str(part).strip().upper()
        match = re.fullmatch(r"([A-G])(\d+)", label)
        if not match:
            raise CartanError(f"Unknown type label '{part}'.")
        letter, n = match.group(1), int(match.group(2))
        low, high = _RANK_RANGE[letter]
        if not low <= n <= high:
            raise CartanError(f"Rank {n} out of range for type {letter} (allowed {low}..{high}).")
        labels.append(f"{letter}{n}")
    if not labels:
        raise CartanError("Empty algebra label.")
    return tuple(labels)


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vscale(s, a):
    return tuple(s * x for x in a)


def normalize(v):
    """Replace integral Fractions by ints so weights hash and print uniformly."""
    return tuple(int(x) if Fraction(x).denominator == 1 else Fraction(x) for x in v)


@dataclass(frozen=True)
class CartanDatum:
    labels: Tuple[str, ...]
    cartan: Tuple[Tuple[int, ...], ...]
    d: Tuple[Fraction, ...]

    @property
    def rank(self) -> int:
        return len(self.d)

    @property
    def index_set(self) -> range:
        return range(self.rank)

    @property
    def name(self) -> str:
        return "+".join(self.labels)

    @cached_property
    def cartan_inverse(self) -> Tuple[Tuple[Fraction, ...], ...]:
        inv = sympy.Matrix(self.cartan).inv()
        return tuple(tuple(Fraction(int(x.p), int(x.q)) for x in inv.row(i)) for i in range(self.rank))

    # --- coordinates and the form ---------------------------------------

    def alpha(self, r: int) -> Weight:
        """alpha_r in fundamental coordinates (column r of A)."""
        return tuple(self.cartan[s][r] for s in self.index_set)

    def to_root(self, m: Sequence) -> Tuple[Fraction, ...]:
        inv = self.cartan_inverse
        return tuple(sum((inv[i][j] * m[j] for j in self.index_set), Fraction(0)) for i in self.index_set)

    def from_root(self, c: Sequence) -> Weight:
        return normalize(sum((self.cartan[s][r] * Fraction(c[r]) for r in self.index_set), Fraction(0))
                         for s in self.index_set)

    def root_to_weight(self, c: Sequence) -> Weight:
        return self.from_root(c)

    def form(self, lam: Sequence, mu: Sequence) -> Fraction:
        """(lam, mu) for weights in fundamental coordinates."""
        c_mu = self.to_root(mu)
        return sum((self.d[k] * Fraction(lam[k]) * c_mu[k] for k in self.index_set), Fraction(0))

    def pair(self, chi: Sequence, lam: Sequence) -> Fraction:
        """(chi, lam) for a coweight chi in coroot coordinates."""
        return sum((Fraction(chi[k]) * Fraction(lam[k]) for k in self.index_set), Fraction(0))

    def coweight_on_root(self, chi: Sequence, r: int) -> Fraction:
        return self.pair(chi, self.alpha(r))

    def fundamental_coweight(self, r: int) -> Tuple[Fraction, ...]:
        inv = self.cartan_inverse
        return tuple(inv[r][k] for k in self.index_set)

    @property
    def rho(self) -> Weight:
        return (1,) * self.rank

    def is_integral(self, m: Sequence) -> bool:
        return all(Fraction(x).denominator == 1 for x in m)

    def is_dominant(self, m: Sequence) -> bool:
        return self.is_integral(m) and all(x >= 0 for x in m)

    def in_root_lattice(self, m: Sequence) -> bool:
        return all(c.denominator == 1 for c in self.to_root(m))

    def in_positive_cone(self, m: Sequence) -> bool:
        """Membership in Q^+."""
        c = self.to_root(m)
        return all(x.denominator == 1 and x >= 0 for x in c)

    def height(self, m: Sequence) -> Fraction:
        return sum(self.to_root(m), Fraction(0))

    # --- roots ------------------------------------------------------------

    @cached_property
    def positive_roots(self) -> Tuple[Tuple[int, ...], ...]:
        """Positive roots in root coordinates, sorted by height then lexicographically."""
        n = self.rank
        simple = [tuple(1 if i == r else 0 for i in range(n)) for r in range(n)]
        roots = set(simple)
        layer = list(simple)
        while layer:
            nxt = []
            for beta in layer:
                for r in range(n):
                    p = 0
                    lower = tuple(b - (1 if i == r else 0) for i, b in enumerate(beta))
                    while lower in roots:
                        p += 1
                        lower = tuple(b - (1 if i == r else 0) for i, b in enumerate(lower))
                    m = sum(self.cartan[r][j] * beta[j] for j in range(n))
                    if p - m > 0:
                        up = tuple(b + (1 if i == r else 0) for i, b in enumerate(beta))
                        if up not in roots:
                            roots.add(up)
                            nxt.append(up)
            layer = nxt
        return tuple(sorted(roots, key=lambda c: (sum(c), c)))

    def roots_of(self, X: Iterable[int]) -> Tuple[Tuple[int, ...], ...]:
        X = set(X)
        return tuple(c for c in self.positive_roots if all(c[i] == 0 for i in self.index_set if i not in X))

    def root_length2(self, c: Sequence) -> Fraction:
        """(beta, beta) for beta in root coordinates."""
        total = Fraction(0)
        for i in self.index_set:
            for j in self.index_set:
                total += c[i] * c[j] * self.d[i] * self.cartan[i][j]
        return total

    def coroot(self, c: Sequence) -> Tuple[Fraction, ...]:
        """beta^vee in coroot coordinates."""
        d_beta = self.root_length2(c) / 2
        return tuple(c[k] * self.d[k] / d_beta for k in self.index_set)

    def rho_vee(self, X: Optional[Iterable[int]] = None) -> Tuple[Fraction, ...]:
        """Half the sum of the positive coroots (of the subsystem X if given)."""
        roots = self.positive_roots if X is None else self.roots_of(X)
        total = [Fraction(0)] * self.rank
        for c in roots:
            total = [t + x for t, x in zip(total, self.coroot(c))]
        return tuple(t / 2 for t in total)

    def rho_of(self, X: Iterable[int]) -> Tuple[Fraction, ...]:
        """rho_X in fundamental coordinates."""
        total = [Fraction(0)] * self.rank
        for c in self.roots_of(X):
            total = [t + Fraction(x) for t, x in zip(total, self.from_root(c))]
        return tuple(t / 2 for t in total)

    # --- Weyl group --------------------------------------------------------

    def reflect(self, m: Sequence, r: int) -> Weight:
        """s_r(m) = m - m_r alpha_r."""
        a = self.alpha(r)
        return normalize(x - m[r] * y for x, y in zip(m, a))

    def apply_word(self, word: Sequence[int], m: Sequence) -> Weight:
        """w(m) for w = s_{r_1} ... s_{r_k}."""
        for r in reversed(tuple(word)):
            m = self.reflect(m, r)
        return tuple(m)

    def longest_word(self, X: Optional[Iterable[int]] = None) -> Word:
        """Reduced word for the longest element of W_X (smallest index first)."""
        X = sorted(self.index_set if X is None else set(X))
        lam = self.rho
        word = []
        while True:
            step = next((r for r in X if lam[r] > 0), None)
            if step is None:
                return tuple(word)
            word.append(step)
            lam = self.reflect(lam, step)

    def is_reduced(self, word: Sequence[int]) -> bool:
        lam = self.rho
        for r in reversed(tuple(word)):
            if lam[r] <= 0:
                return False
            lam = self.reflect(lam, r)
        return True

    def diagram_involution(self, word: Sequence[int], X: Optional[Iterable[int]] = None) -> Tuple[int, ...]:
        """The permutation r -> s with -w(alpha_r) = alpha_s on X (identity outside X)."""
        support = list(self.index_set if X is None else sorted(set(X)))
        perm = list(self.index_set)
        for r in support:
            image = tuple(-x for x in self.apply_word(word, self.alpha(r)))
            match = [s for s in support if self.alpha(s) == image]
            if not match:
                raise CartanError(f"-w does not permute the simple roots (fails at node {r + 1}).")
            perm[r] = match[0]
        return tuple(perm)

    @cached_property
    def tau0(self) -> Tuple[int, ...]:
        return self.diagram_involution(self.longest_word())

    def weyl_dim(self, m: Sequence) -> int:
        if len(m) != self.rank or not self.is_dominant(m):
            raise CartanError(f"Weight {tuple(m)} is not dominant integral for {self.name}.")
        shifted = vadd(m, self.rho)
        num, den = Fraction(1), Fraction(1)
        for c in self.positive_roots:
            num *= sum((c[k] * self.d[k] * shifted[k] for k in self.index_set), Fraction(0))
            den *= sum((c[k] * self.d[k] for k in self.index_set), Fraction(0))
        value = num / den
        if value.denominator != 1:
            raise CartanError(f"Non-integral Weyl dimension {value}.")
        return int(value)

    # --- diagram automorphisms ----------------------------------------------

    def is_diagram_automorphism(self, sigma: Sequence[int]) -> bool:
        if sorted(sigma) != list(self.index_set):
            return False
        return all(self.cartan[sigma[r]][sigma[s]] == self.cartan[r][s]
                   for r in self.index_set for s in self.index_set)

    def permute_weight(self, sigma: Sequence[int], m: Sequence) -> Weight:
        """sigma(varpi_r) = varpi_{sigma(r)}."""
        out = [0] * self.rank
        for r in self.index_set:
            out[sigma[r]] = m[r]
        return tuple(out)

    def permute_coweight(self, sigma: Sequence[int], chi: Sequence) -> Tuple:
        return self.permute_weight(sigma, chi)

    def adjacent(self, r: int, s: int) -> bool:
        return r != s and self.cartan[r][s] != 0


@lru_cache(maxsize=64)
def _build(labels: Tuple[str, ...]) -> CartanDatum:
    blocks = []
    for label in labels:
        letter, n = label[0], int(label[1:])
        edges, d = _simple_factor(letter, n)
        blocks.append((n, edges, d))
    total = sum(n for n, _, _ in blocks)
    cartan = [[0] * total for _ in range(total)]
    d_all = []
    offset = 0
    for n, edges, d in blocks:
        for i in range(n):
            cartan[offset + i][offset + i] = 2
        for i, j in edges:
            bond = -max(d[i], d[j])
            cartan[offset + i][offset + j] = int(2 * bond / (2 * d[i]))
            cartan[offset + j][offset + i] = int(2 * bond / (2 * d[j]))
        d_all.extend(d)
        offset += n
    datum = CartanDatum(labels, tuple(tuple(row) for row in cartan), tuple(d_all))
    logger.debug("Built Cartan datum %s with rank %d", datum.name, datum.rank)
    return datum


def build_cartan(label) -> CartanDatum:
    """Cartan datum for a label list such as ``"F4"`` or ``"A1+A1"``."""
    return _build(parse_labels(label))


def subsets(n: int):
    for k in range(n + 1):
        yield from combinations(range(n), k)
