"""Enhanced Satake diagrams, Vogan diagrams and sign-function extensions.

Everything here is exact: weights and coweights are Fraction tuples, sign
functions are tuples of +-1 and characters of P are rational coweights
modulo the coroot lattice.
"""
import json
import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .braid import TorusCharacter
from .cartan import CartanDatum, build_cartan, normalize
from .errors import DiagramError, ExtensionError
from .lattice import solve_congruence
from .parsing import format_index_list, format_permutation, parse_index_list, parse_permutation

logger = logging.getLogger(__name__)

FIXTURE_PATH = Path(__file__).resolve().parent.parent / "fixtures" / "satake_vogan.json"


def compose(a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
    """(a o b)(r) = a(b(r))."""
    return tuple(a[b[r]] for r in range(len(b)))


def orbits(perm: Sequence[int]) -> List[Tuple[int, ...]]:
    seen, out = set(), []
    for r in range(len(perm)):
        if r in seen:
            continue
        orbit, s = [], r
        while s not in seen:
            seen.add(s)
            orbit.append(s)
            s = perm[s]
        out.append(tuple(sorted(orbit)))
    return out


@dataclass(frozen=True)
class SignFunction:
    """A function I -> {+1, -1}, or I -> {0, 1} in flag mode."""

    values: Tuple[int, ...]
    flag: bool = False

    @classmethod
    def painted(cls, rank: int, nodes: Iterable[int], flag: bool = False) -> "SignFunction":
        """eta_Z: -1 (or 0 in flag mode) on Z, 1 elsewhere."""
        nodes = set(nodes)
        low = 0 if flag else -1
        return cls(tuple(low if r in nodes else 1 for r in range(rank)), flag)

    @property
    def painted_nodes(self) -> Tuple[int, ...]:
        return tuple(r for r, v in enumerate(self.values) if v != 1)

    def on_root(self, c: Sequence) -> int:
        """epsilon_alpha for alpha with root coordinates c (0^0 = 1 in flag mode)."""
        out = 1
        for v, k in zip(self.values, c):
            k = int(k)
            if k == 0:
                continue
            if k < 0 and v == 0:
                raise DiagramError("Flag characters are only defined on Q^+.")
            out *= v ** abs(k) if v else 0
        return out

    def is_invariant(self, perm: Sequence[int]) -> bool:
        return all(self.values[perm[r]] == self.values[r] for r in range(len(self.values)))

    def __str__(self):
        return "eta{" + format_index_list(self.painted_nodes) + "}"


@dataclass(frozen=True)
class VoganClass:
    tau_prime: Tuple[int, ...]
    canonical_rep: SignFunction
    orbit_size: int
    members: FrozenSet[Tuple[int, ...]] = field(default=frozenset(), compare=False, repr=False)


@dataclass(frozen=True)
class SatakeDiagram:
    """A concrete Satake diagram (X, tau) with enhancement z and extension chi0."""

    datum: CartanDatum
    X: Tuple[int, ...]
    tau: Tuple[int, ...]
    z: Tuple[int, ...]
    chi0: Tuple[Fraction, ...]
    name: str = ""

    @property
    def white(self) -> Tuple[int, ...]:
        return tuple(r for r in self.datum.index_set if r not in self.X)

    @property
    def tau_nu(self) -> Tuple[int, ...]:
        """tau tau_0."""
        return compose(self.tau, self.datum.tau0)

    @property
    def w_X(self) -> Tuple[int, ...]:
        return self.datum.longest_word(self.X)

    @property
    def rho_X(self) -> Tuple[Fraction, ...]:
        return self.datum.rho_of(self.X)

    @property
    def rho_X_vee(self) -> Tuple[Fraction, ...]:
        return self.datum.rho_vee(self.X)

    @property
    def z_tilde(self) -> TorusCharacter:
        return TorusCharacter(self.chi0, "z~")

    @property
    def z_tilde_tau(self) -> TorusCharacter:
        """z~ o tau."""
        return TorusCharacter(self.chi0, "z~").permuted(self.datum, self.tau)

    def theta(self, weight: Sequence) -> Tuple:
        """Theta(omega) = -w_X tau(omega)."""
        image = self.datum.apply_word(self.w_X, self.datum.permute_weight(self.tau, weight))
        return normalize(-Fraction(x) for x in image)

    def theta_root(self, c: Sequence) -> Tuple[Fraction, ...]:
        """Theta on root coordinates."""
        return self.datum.to_root(self.theta(self.datum.from_root(c)))

    def label(self) -> str:
        return format_diagram(self)


# --- validation and enhancement --------------------------------------------------------


def _rho_X_on(datum: CartanDatum, X, r: int) -> Fraction:
    return datum.coweight_on_root(datum.rho_vee(X), r)


def validate_satake(datum: CartanDatum, X: Iterable[int], tau: Sequence[int]) -> Dict[str, bool]:
    """Truth of each defining condition of a concrete Satake diagram."""
    X = tuple(sorted(set(X)))
    tau = tuple(tau)
    report = {
        "tau_involution": len(tau) == datum.rank and compose(tau, tau) == tuple(datum.index_set),
        "tau_automorphism": datum.is_diagram_automorphism(tau),
    }
    report["tau_preserves_X"] = report["tau_involution"] and set(tau[r] for r in X) == set(X)
    if report["tau_preserves_X"] and X:
        minus_wX = datum.diagram_involution(datum.longest_word(X), X)
        report["tau_matches_minus_wX"] = all(tau[r] == minus_wX[r] for r in X)
    else:
        report["tau_matches_minus_wX"] = report["tau_preserves_X"]
    report["integrality"] = report["tau_involution"] and all(
        _rho_X_on(datum, X, r).denominator == 1 for r in datum.index_set if r not in X and tau[r] == r)
    report["nontrivial"] = len(X) < datum.rank
    report["valid"] = all(report.values())
    return report


def _enhancement(datum: CartanDatum, X, tau) -> Tuple[int, ...]:
    z = [1] * datum.rank
    for r in datum.index_set:
        if _rho_X_on(datum, X, r).denominator != 1 and r > tau[r]:
            # free on the orbit {r, tau(r)}: +1 on the smaller index
            z[r] = -1
    return tuple(z)


def _invariant_basis(perm: Sequence[int]) -> List[Tuple[int, ...]]:
    n = len(perm)
    return [tuple(1 if k in orbit else 0 for k in range(n)) for orbit in orbits(perm)]


def _extension_chi0(datum: CartanDatum, z: Sequence[int], sigma: Sequence[int]) -> Tuple[Fraction, ...]:
    """A sigma-invariant chi0 with e^{2 pi i (chi0, alpha_r)} = z_r."""
    if all(v == 1 for v in z):
        return (Fraction(0),) * datum.rank
    basis = _invariant_basis(sigma)
    # (chi, alpha_r) = sum_k chi_k a_kr
    rows = [[sum(datum.cartan[k][r] * b[k] for k in datum.index_set) for b in basis] for r in datum.index_set]
    rhs = [Fraction(0) if v == 1 else Fraction(1, 2) for v in z]
    y = solve_congruence(rows, rhs)
    if y is None:
        raise DiagramError("No tau tau_0-invariant extension of z exists; the diagram data is inconsistent.")
    return tuple(sum((y[j] * basis[j][k] for j in range(len(basis))), Fraction(0)) for k in datum.index_set)


def enhance(datum: CartanDatum, X: Iterable[int], tau: Sequence[int], name: str = "") -> SatakeDiagram:
    X = tuple(sorted(set(X)))
    tau = tuple(tau)
    report = validate_satake(datum, X, tau)
    if not report["valid"]:
        failed = ", ".join(k for k, v in report.items() if not v and k != "valid")
        raise DiagramError(f"Not a concrete Satake diagram on {datum.name}: {failed}.")
    z = _enhancement(datum, X, tau)
    chi0 = _extension_chi0(datum, z, compose(tau, datum.tau0))
    logger.debug("Enhanced diagram X=%s tau=%s: z=%s chi0=%s", X, tau, z, chi0)
    return SatakeDiagram(datum, X, tau, z, chi0, name)


def theta_on_weights(s: SatakeDiagram) -> Tuple[Tuple[Fraction, ...], ...]:
    """Matrix of Theta in fundamental coordinates (column j = Theta(varpi_j))."""
    n = s.datum.rank
    cols = [s.theta(tuple(1 if k == j else 0 for k in range(n))) for j in range(n)]
    return tuple(tuple(Fraction(cols[j][i]) for j in range(n)) for i in range(n))


def fundamental_spherical(s: SatakeDiagram) -> Dict[int, Tuple[int, ...]]:
    """mu_r over a fundamental domain of tau in I minus X."""
    datum = s.datum
    out = {}
    for r in s.white:
        t = s.tau[r]
        if t < r:
            continue
        mu = [0] * datum.rank
        if t != r:
            mu[r] = mu[t] = 1
        elif any(datum.adjacent(r, x) for x in s.X):
            mu[r] = 1
        else:
            mu[r] = 2
        out[r] = tuple(mu)
    return out


# --- Vogan diagrams ------------------------------------------------------------------------


def _reflect_sign(datum: CartanDatum, values: Tuple[int, ...], r: int) -> Tuple[int, ...]:
    """epsilon o s_r: epsilon'_s = epsilon_s epsilon_r^{a_rs}."""
    return tuple(v * (-1 if datum.cartan[r][s] % 2 and values[r] == -1 else 1) for s, v in enumerate(values))


def _neighbours(datum: CartanDatum, tau_p: Sequence[int], values: Tuple[int, ...]):
    for r in datum.index_set:
        if tau_p[r] == r:
            if values[r] == -1:
                yield _reflect_sign(datum, values, r)
        else:
            pair = {r, tau_p[r]}
            yield tuple(-v if s in pair else v for s, v in enumerate(values))


def vogan_orbit(datum: CartanDatum, tau_p: Sequence[int], eps: SignFunction) -> VoganClass:
    """Closure of eps under the type-1 and type-2 moves."""
    tau_p = tuple(tau_p)
    if not eps.is_invariant(tau_p):
        raise DiagramError(f"Sign function {eps} is not invariant under {format_permutation(tau_p)}.")
    start = tuple(eps.values)
    seen = {start}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for nxt in _neighbours(datum, tau_p, current):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return VoganClass(tau_p, SignFunction(min(seen)), len(seen), frozenset(seen))


def diagram_automorphisms(datum: CartanDatum) -> List[Tuple[int, ...]]:
    """All permutations preserving the Cartan matrix, by backtracking."""
    n = datum.rank
    out = []

    def extend(partial: List[int]):
        k = len(partial)
        if k == n:
            out.append(tuple(partial))
            return
        for s in range(n):
            if s in partial:
                continue
            if all(datum.cartan[k][j] == datum.cartan[s][partial[j]] and datum.cartan[j][k] == datum.cartan[partial[j]][s]
                   for j in range(k)):
                extend(partial + [s])

    extend([])
    return out


def involutions(datum: CartanDatum) -> List[Tuple[int, ...]]:
    identity = tuple(datum.index_set)
    return [p for p in diagram_automorphisms(datum) if compose(p, p) == identity]


def vogan_classes(datum: CartanDatum) -> List[VoganClass]:
    """Every inner class of Vogan diagrams (tau', epsilon), compact one included."""
    classes = []
    for tau_p in involutions(datum):
        covered = set()
        orbit_list = orbits(tau_p)
        for choice in product((1, -1), repeat=len(orbit_list)):
            values = [1] * datum.rank
            for sign, orbit in zip(choice, orbit_list):
                for r in orbit:
                    values[r] = sign
            values = tuple(values)
            if values in covered:
                continue
            cls = vogan_orbit(datum, tau_p, SignFunction(values))
            covered |= cls.members
            classes.append(cls)
    logger.debug("%s has %d Vogan classes", datum.name, len(classes))
    return classes


def transport_class(datum: CartanDatum, cls: VoganClass, sigma: Sequence[int]) -> VoganClass:
    """Image of a class under a diagram automorphism sigma."""
    inv = [0] * datum.rank
    for r, s in enumerate(sigma):
        inv[s] = r
    tau_p = compose(compose(sigma, cls.tau_prime), inv)
    values = [1] * datum.rank
    for r, v in enumerate(cls.canonical_rep.values):
        values[sigma[r]] = v
    return vogan_orbit(datum, tau_p, SignFunction(tuple(values)))


def non_invariant_classes(datum: CartanDatum) -> List[VoganClass]:
    """Classes moved by some diagram automorphism (those that split under inner conjugacy)."""
    autos = diagram_automorphisms(datum)
    return [cls for cls in vogan_classes(datum)
            if any(transport_class(datum, cls, sigma) != cls for sigma in autos)]


def dl_invariant(datum: CartanDatum, eps: SignFunction) -> int:
    """c = epsilon(alpha_1 + alpha_3 + ... + alpha_{l-1}) on D_l, l even."""
    if len(datum.labels) != 1 or datum.labels[0][0] != "D" or datum.rank % 2:
        raise DiagramError(f"The orbit invariant is defined on D_l with l even, not on {datum.name}.")
    c = [1 if r % 2 == 0 and r < datum.rank - 1 else 0 for r in datum.index_set]
    return eps.on_root(c)


# --- admissibility and the sign extension ------------------------------------------------


@lru_cache(maxsize=4)
def load_fixtures(path: str = str(FIXTURE_PATH)) -> Tuple[dict, ...]:
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    return tuple(data["rows"])


def fixture_for(s: SatakeDiagram, path: Optional[str] = None) -> dict:
    for row in load_fixtures(path or str(FIXTURE_PATH)):
        datum, X, tau = parse_diagram(row["satake"])
        if datum == s.datum and X == s.X and tau == s.tau:
            return row
    raise DiagramError(f"No admissible sign function is tabled for {format_diagram(s)}.")


def admissible_sign(s: SatakeDiagram, path: Optional[str] = None) -> SignFunction:
    """The tabled Vogan sign function paired with s."""
    row = fixture_for(s, path)
    tau_p = parse_permutation(row["vogan_tau"], s.datum.rank)
    if tau_p != s.tau_nu:
        raise DiagramError(f"Fixture for {row['satake']} lists tau'={row['vogan_tau']}, expected "
                           f"{format_permutation(s.tau_nu)}.")
    eps = SignFunction.painted(s.datum.rank, parse_index_list(row["vogan_eps"], s.datum.rank))
    if not eps.is_invariant(tau_p):
        raise DiagramError(f"Fixture sign function for {row['satake']} is not tau'-invariant.")
    return eps


def is_admissible(s: SatakeDiagram, eps: SignFunction, path: Optional[str] = None) -> bool:
    if not eps.is_invariant(s.tau_nu):
        return False
    reference = admissible_sign(s, path)
    return vogan_orbit(s.datum, s.tau_nu, eps) == vogan_orbit(s.datum, s.tau_nu, reference)


def _target_coweight(s: SatakeDiagram) -> Tuple[Fraction, ...]:
    """rho^vee + rho_X^vee + chi0 - tau(chi0)."""
    tau_chi0 = s.z_tilde_tau.chi
    return tuple(a + b + c - d for a, b, c, d in zip(s.datum.rho_vee(), s.rho_X_vee, s.chi0, tau_chi0))


def delta_character(s: SatakeDiagram) -> Tuple[int, ...]:
    """delta_r = e^{pi i (rho^vee + rho_X^vee + chi0 - tau chi0, alpha_r)}."""
    h = _target_coweight(s)
    out = []
    for r in s.datum.index_set:
        x = s.datum.coweight_on_root(h, r)
        if x.denominator != 1:
            raise DiagramError(f"delta is not a sign at node {r + 1}: exponent {x}.")
        out.append(-1 if x.numerator % 2 else 1)
    return tuple(out)


def b_set(s: SatakeDiagram) -> List[Tuple[int, ...]]:
    """k in (Z/2)^l with tau tau_0 (k) = k and (A k)_r even on tau tau_0-fixed r."""
    datum, sigma = s.datum, s.tau_nu
    fixed = [r for r in datum.index_set if sigma[r] == r]
    out = []
    for k in product((0, 1), repeat=datum.rank):
        if any(k[sigma[r]] != k[r] for r in datum.index_set):
            continue
        if all(sum(datum.cartan[r][j] * k[j] for j in datum.index_set) % 2 == 0 for r in fixed):
            out.append(k)
    return out


def sign_check(s: SatakeDiagram, eps: SignFunction) -> Optional[Tuple[int, ...]]:
    """The first k in the B-set with prod (eps_r delta_r)^{k_r} = -1, or None."""
    delta = delta_character(s)
    for k in b_set(s):
        value = 1
        for r, kr in enumerate(k):
            if kr:
                value *= eps.values[r] * delta[r]
        if value != 1:
            return k
    return None


def extend_sign(s: SatakeDiagram, eps: SignFunction) -> TorusCharacter:
    """eps~ in T extending eps with eps~ . tau tau_0(eps~) = S_0 S_X z~ z~_tau^{-1}."""
    datum, sigma = s.datum, s.tau_nu
    if eps.flag or not eps.is_invariant(sigma):
        raise DiagramError(f"{eps} is not a tau tau_0-invariant sign function.")
    bad = sign_check(s, eps)
    if bad is not None:
        raise ExtensionError(f"Sign check fails for {eps} on {format_diagram(s)} at k={bad}.", k=bad)
    n = datum.rank
    rows, rhs = [], []
    for r in datum.index_set:
        rows.append([datum.cartan[k][r] for k in range(n)])
        rhs.append(Fraction(0) if eps.values[r] == 1 else Fraction(1, 2))
    h = _target_coweight(s)
    for k in range(n):
        rows.append([(1 if j == k else 0) + (1 if j == sigma[k] else 0) for j in range(n)])
        rhs.append(h[k])
    chi = solve_congruence(rows, rhs)
    if chi is None:
        raise ExtensionError(f"No extension of {eps} exists on {format_diagram(s)}.")
    logger.debug("Extended %s to the coweight %s", eps, chi)
    return TorusCharacter(chi, "eps~")


def extension_report(s: SatakeDiagram, eps: SignFunction, eps_tilde: TorusCharacter) -> Dict[str, bool]:
    """Exact checks that eps_tilde extends eps and solves the product identity on P."""
    datum, sigma = s.datum, s.tau_nu
    restricts = all(
        (datum.coweight_on_root(eps_tilde.chi, r) - (0 if eps.values[r] == 1 else Fraction(1, 2))).denominator == 1
        for r in datum.index_set)
    h = _target_coweight(s)
    product_identity = all((eps_tilde.chi[k] + eps_tilde.chi[sigma[k]] - h[k]).denominator == 1
                           for k in datum.index_set)
    return {"restricts": restricts, "product_identity": product_identity}


# --- text form --------------------------------------------------------------------------------


def parse_diagram(text: str) -> Tuple[CartanDatum, Tuple[int, ...], Tuple[int, ...]]:
    """'g=F4; X=2,3,4; tau=id' -> (datum, X, tau), 0-based."""
    fields = {}
    for part in str(text).split(";"):
        if not part.strip():
            continue
        if "=" not in part:
            raise ValueError(f"Diagram field '{part.strip()}' must look like key=value.")
        key, value = part.split("=", 1)
        fields[key.strip().lower()] = value.strip()
    if "g" not in fields:
        raise ValueError(f"Diagram '{text}' has no 'g=' field.")
    datum = build_cartan(fields["g"])
    X = parse_index_list(fields.get("x", ""), datum.rank)
    tau = parse_permutation(fields.get("tau", "id"), datum.rank)
    return datum, X, tau


def diagram_from_text(text: str) -> SatakeDiagram:
    return enhance(*parse_diagram(text))


def format_diagram(s: SatakeDiagram) -> str:
    return f"g={s.datum.name}; X={format_index_list(s.X)}; tau={format_permutation(s.tau)}"
