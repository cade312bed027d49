"""Text forms used by the CLI, the suites and the fixtures.

All text surfaces number nodes from 1; everything returned here is 0-based.
"""
import re
from fractions import Fraction
from typing import Optional, Sequence, Tuple

_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_rational(text) -> Fraction:
    """'1/2', '0.5' or an int/float, converted exactly."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        return Fraction(repr(text))
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"Cannot read '{text}' as a rational number.") from None


def parse_weight(text, rank: Optional[int] = None) -> Tuple[int, ...]:
    """'1,0,0,0' (or a list of ints) in fundamental coordinates."""
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = [p for p in re.split(r"[,\s]+", str(text).strip()) if p]
    try:
        weight = tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"Weight '{text}' must be a comma separated list of integers.") from None
    if rank is not None and len(weight) != rank:
        raise ValueError(f"Weight '{text}' has {len(weight)} entries, expected {rank}.")
    return weight


def parse_index_list(text, rank: Optional[int] = None) -> Tuple[int, ...]:
    """'2,3,4' -> (1, 2, 3); the empty string is the empty set."""
    if isinstance(text, (list, tuple)):
        items = [int(x) for x in text]
    else:
        items = [int(p) for p in re.split(r"[,\s]+", str(text).strip()) if p]
    out = tuple(sorted(set(i - 1 for i in items)))
    if any(i < 0 or (rank is not None and i >= rank) for i in out):
        raise ValueError(f"Node list '{text}' is out of range 1..{rank}.")
    return out


def parse_permutation(text, rank: int) -> Tuple[int, ...]:
    """'id', '(1 3)' or '(1 4)(2 3)' as a 0-based permutation tuple."""
    text = str(text).strip()
    perm = list(range(rank))
    if text in ("", "id", "1"):
        return tuple(perm)
    cycles = _CYCLE.findall(text)
    if not cycles or _CYCLE.sub("", text).strip():
        raise ValueError(f"Cannot read permutation '{text}'; use 'id' or cycle notation like '(1 3)'.")
    seen = set()
    for cycle in cycles:
        nodes = [int(p) - 1 for p in re.split(r"[,\s]+", cycle.strip()) if p]
        if any(n < 0 or n >= rank or n in seen for n in nodes):
            raise ValueError(f"Permutation '{text}' is not a valid permutation of 1..{rank}.")
        seen.update(nodes)
        for a, b in zip(nodes, nodes[1:] + nodes[:1]):
            perm[a] = b
    return tuple(perm)


def format_permutation(perm: Sequence[int]) -> str:
    seen, cycles = set(), []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cycle, r = [], start
        while r not in seen:
            seen.add(r)
            cycle.append(r + 1)
            r = perm[r]
        cycles.append("(" + " ".join(map(str, cycle)) + ")")
    return "".join(cycles) or "id"


def format_index_list(nodes: Sequence[int]) -> str:
    return ",".join(str(r + 1) for r in sorted(nodes))


def format_weight(weight: Sequence) -> str:
    return ",".join(str(x) for x in weight)
