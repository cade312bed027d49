"""JSON documents for modules and reports.

Every document carries ``"schema": 1``.  Scalars are written as decimal
strings at the working precision; complex entries as ``[re, im]`` pairs.
"""
import json
import logging
import os
from fractions import Fraction
from typing import Any, Dict, List

import numpy as np
from mpmath import mp, mpc, mpf

from .cartan import build_cartan
from .errors import DocumentError
from .repn import Module
from .scalars import ScalarContext

logger = logging.getLogger(__name__)

SCHEMA = 1


def _digits() -> int:
    return max(15, int(mp.dps))


def encode_scalar(x) -> Any:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, mpc) or isinstance(x, complex):
        z = mpc(x)
        if z.imag == 0:
            return mp.nstr(z.real, _digits())
        return [mp.nstr(z.real, _digits()), mp.nstr(z.imag, _digits())]
    if isinstance(x, (mpf, float)):
        return mp.nstr(mpf(x), _digits())
    return str(x)


def decode_scalar(value) -> Any:
    if isinstance(value, list):
        return mpc(mpf(value[0]), mpf(value[1]))
    return mpf(value)


def to_jsonable(obj) -> Any:
    """Reports (dicts of residuals, tuples of Fractions, matrices) as plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if hasattr(obj, "as_dict"):
        return to_jsonable(obj.as_dict())
    return encode_scalar(obj)


def sparse_entries(a: np.ndarray) -> List[list]:
    """0-based [row, column, value] triples of the nonzero entries."""
    return [[int(i), int(j), encode_scalar(a[i, j])] for i, j in zip(*np.nonzero(a))]


def _dense(n: int, entries: List[list]) -> np.ndarray:
    out = np.full((n, n), mp.zero, dtype=object)
    for i, j, value in entries:
        out[i, j] = decode_scalar(value)
    return out


def module_document(M: Module) -> Dict[str, Any]:
    M.ctx.activate()
    return {
        "schema": SCHEMA,
        "algebra": M.datum.name,
        "context": M.ctx.as_dict(),
        "label": M.label,
        "unitary": M.unitary,
        "dim": M.dim,
        "weights": [[str(x) for x in w] for w in M.weights],
        "highest_weights": None if M.highest_weights is None
        else [[list(map(int, w)), m] for w, m in M.highest_weights],
        "E": [sparse_entries(a) for a in M.E],
        "F": [sparse_entries(a) for a in M.F],
    }


def kmatrix_document(bundle, M: Module, report: Dict[str, Any]) -> Dict[str, Any]:
    """The quasi, raw and modified K-matrices of one module with their residual report."""
    M.ctx.activate()
    return {
        "schema": SCHEMA,
        "satake": bundle.satake.label(),
        "sign": str(bundle.eps),
        "module": module_document(M),
        "matrices": {name: sparse_entries(family.on(M))
                     for name, family in (("quasi", bundle.quasi), ("raw", bundle.raw), ("modified", bundle.modified))},
        "report": to_jsonable(report),
    }


def module_from_document(doc: Dict[str, Any]) -> Module:
    if doc.get("schema") != SCHEMA:
        raise DocumentError(f"Unsupported module document schema {doc.get('schema')!r}; expected {SCHEMA}.")
    missing = [k for k in ("algebra", "context", "weights", "E", "F") if k not in doc]
    if missing:
        raise DocumentError(f"Module document is incomplete. Missing fields: {', '.join(missing)}.")
    context = doc["context"]
    ctx = ScalarContext(context["q"], int(context["precision_bits"]), float(context["tol"]))
    ctx.activate()
    datum = build_cartan(doc["algebra"])
    weights = [tuple(int(Fraction(x)) if Fraction(x).denominator == 1 else Fraction(x) for x in w)
               for w in doc["weights"]]
    n = len(weights)
    hw = doc.get("highest_weights")
    return Module(
        datum, ctx, weights,
        [_dense(n, entries) for entries in doc["E"]],
        [_dense(n, entries) for entries in doc["F"]],
        unitary=bool(doc.get("unitary", True)),
        highest_weights=None if hw is None else tuple((tuple(w), int(m)) for w, m in hw),
        label=doc.get("label", ""),
    )


def save_json(doc: Dict[str, Any], path: str) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    payload = dict(doc)
    payload.setdefault("schema", SCHEMA)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(to_jsonable(payload), f, indent=2)
    logger.info("Wrote %s", path)
    return path


def load_json(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise DocumentError(f"Invalid JSON in '{path}': {e}") from e


def save_module(M: Module, path: str) -> str:
    return save_json(module_document(M), path)


def load_module(path: str) -> Module:
    return module_from_document(load_json(path))
