"""JSON wire formats.

Matrix: ``{"rows": n, "cols": k, "entries": [[[w, x, y, z], ...], ...]}``.
Points and tangent vectors add ``"n"`` and ``"k"``; group elements are
``{"m": ..., "a": ..., "b": ...}``.  Floats are written with 17 significant
digits so that every double round-trips exactly.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .quaternion import QuaternionError, QuaternionMatrix, ShapeError
from .stiefel import StiefelPoint, validate_point


class FormatError(QuaternionError):
    pass


def matrix_to_dict(a: QuaternionMatrix) -> dict:
    return {"rows": a.rows, "cols": a.cols, "entries": a.data.tolist()}


def matrix_from_dict(obj: dict) -> QuaternionMatrix:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        arr = np.array(obj["entries"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed matrix JSON: {exc}") from exc
    if rows == 0 or cols == 0:
        return QuaternionMatrix.zeros(rows, cols)
    if arr.shape != (rows, cols, 4):
        raise FormatError(f"entries have shape {arr.shape}, header says ({rows}, {cols}, 4)")
    return QuaternionMatrix(arr)


def point_to_dict(x: StiefelPoint) -> dict:
    return {"n": x.n, "k": x.k, **matrix_to_dict(x.mat)}


def point_matrix_from_dict(obj: dict) -> QuaternionMatrix:
    mat = matrix_from_dict(obj)
    n, k = obj.get("n", mat.rows), obj.get("k", mat.cols)
    if (n, k) != mat.shape:
        raise ShapeError(f"header n={n}, k={k} disagrees with a {mat.rows}x{mat.cols} matrix")
    return mat


def point_from_dict(obj: dict, tol: float) -> StiefelPoint:
    return validate_point(point_matrix_from_dict(obj), tol)


def group_element_to_dict(g) -> dict:
    return {"m": matrix_to_dict(g.m), "a": matrix_to_dict(g.a), "b": matrix_to_dict(g.b)}


def _encode(obj) -> str:
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            raise FormatError(f"cannot serialize non-finite float {obj!r}")
        return format(float(obj), ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    raise FormatError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return _encode(obj)
