"""JSON encoding for complex matrices and tensors.

A matrix is a nested list of rows, each entry a ``[re, im]`` pair.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .errors import InvalidInputError
from .linalg import Tensor4, as_matrix


def matrix_to_json(A) -> list:
    arr = np.asarray(A, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in arr]


def matrix_from_json(obj) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=np.float64)
    except (ValueError, TypeError) as exc:
        raise InvalidInputError("malformed matrix JSON") from exc
    if arr.ndim == 2:
        # plain real matrix
        return as_matrix(arr)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise InvalidInputError(f"matrix JSON must be rows of [re, im] pairs, got shape {arr.shape}")
    return as_matrix(arr[..., 0] + 1j * arr[..., 1])


def tensor_to_json(M: Tensor4) -> dict:
    out: dict[str, Any] = {"n": M.n, "matrix": matrix_to_json(M.matrix)}
    if M.factors is not None:
        out["factors"] = [matrix_to_json(F) for F in M.factors]
    return out


def tensor_from_json(obj: Mapping) -> Tensor4:
    """Tensor from ``{"matrix": ..., "factors": [...], "n": ...}``; ``n`` is inferred when omitted."""
    if not isinstance(obj, Mapping):
        raise InvalidInputError("tensor JSON must be an object")
    factors = obj.get("factors")
    facs = None if factors is None else [matrix_from_json(F) for F in factors]
    mat = matrix_from_json(obj["matrix"]) if "matrix" in obj else None
    if mat is None and facs is None:
        raise InvalidInputError("tensor JSON needs a matrix or a factor list")
    if "n" in obj:
        n = int(obj["n"])
    elif facs:
        n = facs[0].shape[0]
    elif mat is not None:
        n = int(round(np.sqrt(mat.shape[0])))
    else:
        raise InvalidInputError("an empty factor list needs n")
    if mat is None:
        return Tensor4.from_factors(facs, n)
    return Tensor4(n, mat, None if facs is None else tuple(facs))


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path) -> Any:
    return json.loads(Path(path).read_text())
