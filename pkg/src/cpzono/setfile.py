"""JSON serialization of set representations.

A set file is an object with a ``"kind"`` and one entry per field, each a
matrix ``{"rows": r, "cols": k, "data": [...]}`` in row-major order.  Vectors
are stored as ``r x 1`` matrices; a Taylor model's remainder is ``n x 2``
(lower, upper).  Numbers are written with Python's shortest round-trip repr,
so loading a saved file reproduces every double exactly.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .linalg import Interval, ShapeError, ValidationError
from .sets import (
    ConPolyZonotope,
    ConZonotope,
    Ellipsoid,
    IntervalBox,
    PolyZonotope,
    TaylorModel,
    Zonotope,
)

# kind -> (type, field names); vectors and exponent matrices are typed below
KINDS = {
    "cpz": (ConPolyZonotope, ("c", "G", "E", "A", "b", "R")),
    "polyzono": (PolyZonotope, ("c", "G", "GI", "E")),
    "conzono": (ConZonotope, ("c", "G", "A", "b")),
    "zonotope": (Zonotope, ("c", "G")),
    "interval": (IntervalBox, ("lo", "hi")),
    "ellipsoid": (Ellipsoid, ("c", "Q")),
    "taylormodel": (TaylorModel, ("coeffs", "expons", "remainder")),
}
_VECTORS = {"c", "b", "lo", "hi"}
_EXPONENTS = {"E", "R", "expons"}


def matrix_to_json(a, name: str = "matrix", integer: bool = False) -> dict:
    a = np.asarray(a)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise ShapeError(f"{name}: expected a matrix, got shape {a.shape}")
    if integer:
        data = [int(v) for v in a.reshape(-1)]
    else:
        data = [float(v) for v in a.reshape(-1)]
        if not all(math.isfinite(v) for v in data):
            raise ValidationError(f"{name}: entries must be finite")
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]), "data": data}


def matrix_from_json(obj, name: str = "matrix", integer: bool = False) -> np.ndarray:
    if not isinstance(obj, dict) or not {"rows", "cols", "data"} <= obj.keys():
        raise ValidationError(f"{name}: expected an object with rows, cols and data")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 0 or cols < 0:
        raise ValidationError(f"{name}: rows and cols must be nonnegative integers")
    if not isinstance(data, list) or len(data) != rows * cols:
        got = len(data) if isinstance(data, list) else "non-list"
        raise ShapeError(f"{name}: data has {got} entries, expected rows*cols = {rows * cols}")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in data):
        raise ValidationError(f"{name}: data must be numbers")
    if integer:
        if not all(float(v).is_integer() for v in data):
            raise ValidationError(f"{name}: entries must be integers")
        return np.array(data, dtype=np.int64).reshape(rows, cols)
    return np.array(data, dtype=float).reshape(rows, cols)


def kind_of(obj) -> str:
    for kind, (cls, _) in KINDS.items():
        if type(obj) is cls:
            return kind
    raise TypeError(f"no set file kind for {type(obj).__name__}")


def to_json(obj) -> dict:
    kind = kind_of(obj)
    out = {"kind": kind}
    for name in KINDS[kind][1]:
        val = getattr(obj, name)
        if name == "remainder":
            val = np.array([[iv.lo, iv.hi] for iv in val]).reshape(len(val), 2)
        out[name] = matrix_to_json(val, name, integer=name in _EXPONENTS)
    return out


def from_json(doc):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValidationError("kind: set file needs a 'kind' entry")
    kind = doc["kind"]
    if kind not in KINDS:
        raise ValidationError(f"kind: unknown kind {kind!r}; expected one of {sorted(KINDS)}")
    cls, names = KINDS[kind]
    fields = {}
    for name in names:
        if name not in doc:
            raise ValidationError(f"{name}: missing from {kind} set file")
        a = matrix_from_json(doc[name], name, integer=name in _EXPONENTS)
        if name in _VECTORS:
            if a.shape[1] != 1:
                raise ShapeError(f"{name}: vectors are stored as n x 1, got {a.shape[0]}x{a.shape[1]}")
            a = a.reshape(-1)
        elif name == "remainder":
            if a.shape[1] != 2:
                raise ShapeError(f"remainder: expected n x 2 (lower, upper), got {a.shape[0]}x{a.shape[1]}")
            a = tuple(Interval(lo, hi) for lo, hi in a)
        fields[name] = a
    return cls(**fields)


def dumps(obj) -> str:
    return json.dumps(to_json(obj), indent=1)


def loads(text: str):
    return from_json(json.loads(text))


def save(obj, path) -> None:
    Path(path).write_text(dumps(obj) + "\n")


def load(path):
    return loads(Path(path).read_text())


def load_matrices(path) -> list[np.ndarray]:
    """A single matrix object or a list of them (quadratic-map input)."""
    doc = json.loads(Path(path).read_text())
    if isinstance(doc, list):
        return [matrix_from_json(d, f"Q[{i}]") for i, d in enumerate(doc)]
    return [matrix_from_json(doc, "M")]
