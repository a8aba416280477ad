"""Noncommutative multilinear polynomials with matrix coefficients.

``Q(X_0, ..., X_{m-1}) = sum_S Qhat(S) X_{s_1} X_{s_2} ... X_{s_k}`` with
``s_1 < s_2 < ... < s_k``. Evaluation shares prefixes over the subset lattice:
``P(S) = P(S minus max S) @ X_{max S}``, which reproduces the left-to-right
product of the naive sum operation for operation.

An embedded polynomial ``Q^iota`` keeps its ``n x n`` core coefficients and an
outer dimension ``p``; its coefficients are ``iota(Qhat(S))``. Only the top
``n`` rows of ``Q^iota(X)`` can be nonzero, so evaluation works on ``n x p``
row blocks throughout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidInputError
from .fourier import (
    CubeFunction,
    check_enumerable,
    indices_of,
    popcount,
    sign_table,
    walsh_hadamard,
)
from .linalg import embed_iota


def _freeze(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class NCPoly:
    m: int
    n: int
    coeffs: Mapping[int, np.ndarray] = field(default_factory=dict)
    p: int | None = None

    def __post_init__(self):
        if self.m < 0 or self.n < 1:
            raise InvalidInputError("need m >= 0 and n >= 1")
        p = self.n if self.p is None else int(self.p)
        if p < self.n:
            raise InvalidInputError(f"outer dimension p={p} is smaller than n={self.n}")
        object.__setattr__(self, "p", p)
        frozen = {}
        for mask in sorted(self.coeffs):
            c = np.asarray(self.coeffs[mask])
            if not 0 <= mask < (1 << self.m):
                raise InvalidInputError(f"mask {mask} out of range for m={self.m}")
            if c.shape != (self.n, self.n):
                raise InvalidInputError(f"coefficient for mask {mask} has shape {c.shape}")
            if not np.all(np.isfinite(c)):
                raise InvalidInputError("non-finite coefficient")
            frozen[int(mask)] = _freeze(c)
        object.__setattr__(self, "coeffs", MappingProxyType(frozen))

    @property
    def embedded(self) -> bool:
        return self.p != self.n

    @property
    def n_var(self) -> int:
        return self.p

    @property
    def n_coeff(self) -> int:
        return self.p

    @property
    def degree(self) -> int:
        return max((popcount(s) for s, c in self.coeffs.items() if np.any(c)), default=0)

    def coefficient(self, mask: int) -> np.ndarray:
        """``Qhat(S)``, zero-padded to ``p x p`` for embedded polynomials."""
        core = self.coeffs.get(mask)
        if core is None:
            return np.zeros((self.p, self.p), dtype=np.complex128)
        return embed_iota(core, self.p) if self.embedded else core.copy()

    def influences(self) -> np.ndarray:
        return self.to_cube_function().influences()

    def max_influence(self) -> float:
        return float(self.influences().max()) if self.m else 0.0

    def mass(self) -> float:
        return float(sum(np.vdot(c, c).real for c in self.coeffs.values()))

    def to_cube_function(self) -> CubeFunction:
        return CubeFunction(self.m, self.n, dict(self.coeffs))

    def boolean_values(self) -> np.ndarray:
        """``Q(sigma)`` (core ``n x n`` block) for every sign vector, in table order."""
        check_enumerable(self.m)
        dense = np.zeros((1 << self.m, self.n, self.n), dtype=np.complex128)
        for s, c in self.coeffs.items():
            dense[s] = c
        return walsh_hadamard(dense)

    def __call__(self, *inputs):
        return evaluate(self, inputs)

    def to_json(self) -> dict:
        from .io import matrix_to_json

        return {
            "m": self.m,
            "n": self.n,
            "n_var": self.p,
            "embedded": self.embedded,
            "coeffs": [{"mask": s, "matrix": matrix_to_json(c)} for s, c in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "NCPoly":
        from .io import matrix_from_json

        coeffs = {int(e["mask"]): matrix_from_json(e["matrix"]) for e in obj["coeffs"]}
        return cls(int(obj["m"]), int(obj["n"]), coeffs, p=int(obj.get("n_var", obj["n"])))


def from_cube_function(f: CubeFunction) -> NCPoly:
    return NCPoly(f.m, f.n, dict(f.coeffs))


def embed(Q: NCPoly, p: int) -> NCPoly:
    """``Q^iota`` acting on ``p x p`` inputs."""
    if int(p) < Q.n:
        raise InvalidInputError(f"embedding dimension p={p} is smaller than n={Q.n}")
    return NCPoly(Q.m, Q.n, dict(Q.coeffs), p=int(p))


def variance(Q: NCPoly) -> float:
    """``E_b Tr|Q(b) - E_b Q(b)|^2 = sum_{S nonempty} Tr(Qhat(S) Qhat(S)*)``."""
    return float(sum(np.vdot(c, c).real for s, c in Q.coeffs.items() if s))


def _promote_inputs(Q: NCPoly, inputs) -> list[np.ndarray]:
    items = list(inputs)
    if len(items) != Q.m:
        raise InvalidInputError(f"expected {Q.m} inputs, got {len(items)}")
    eye = np.eye(Q.p, dtype=np.complex128)
    out = []
    for x in items:
        arr = np.asarray(x, dtype=np.complex128)
        if arr.ndim == 0:
            arr = arr * eye
        if arr.ndim < 2 or arr.shape[-2:] != (Q.p, Q.p):
            raise InvalidInputError(f"inputs must be {Q.p}x{Q.p} matrices, got shape {arr.shape}")
        out.append(arr)
    return out


def _batch_shape(arrays) -> tuple:
    return np.broadcast_shapes(*(a.shape[:-2] for a in arrays)) if arrays else ()


def _prefix_products(masks, step, start):
    """Memoized ``P(S) = step(P(S minus top bit), top bit)`` for the needed masks."""
    needed = set()
    for s in masks:
        while s and s not in needed:
            needed.add(s)
            s ^= 1 << (s.bit_length() - 1)
    # a prefix is numerically smaller than every mask extending it
    cache = {0: start}
    for s in sorted(needed):
        top = s.bit_length() - 1
        cache[s] = step(cache[s ^ (1 << top)], top)
    return {s: cache[s] for s in masks}


def evaluate_top(Q: NCPoly, inputs) -> np.ndarray:
    """Top ``n`` rows of ``Q(X)``: an ``(..., n, p)`` array.

    For a plain polynomial (``p == n``) this is the full value.
    """
    xs = _promote_inputs(Q, inputs)
    batch = _batch_shape(xs)
    n, p = Q.n, Q.p
    start = np.zeros(batch + (n, p), dtype=np.complex128)
    start[..., :, :n] = np.eye(n)
    prods = _prefix_products(Q.coeffs.keys(), lambda P, i: P @ xs[i], start)
    out = np.zeros(batch + (n, p), dtype=np.complex128)
    for s, c in Q.coeffs.items():
        out += c @ prods[s]
    return out


def evaluate(Q: NCPoly, inputs) -> np.ndarray:
    """``Q(X_0, ..., X_{m-1})`` as ``(..., p, p)``; scalars are promoted to ``b I``."""
    top = evaluate_top(Q, inputs)
    if not Q.embedded:
        return top
    out = np.zeros(top.shape[:-2] + (Q.p, Q.p), dtype=np.complex128)
    out[..., : Q.n, :] = top
    return out


def evaluate_naive(Q: NCPoly, inputs) -> np.ndarray:
    """Term-by-term evaluation without prefix sharing (plain polynomials)."""
    xs = _promote_inputs(Q, inputs)
    batch = _batch_shape(xs)
    out = np.zeros(batch + (Q.p, Q.p), dtype=np.complex128)
    for s, c in Q.coeffs.items():
        prod = np.broadcast_to(np.eye(Q.p, dtype=np.complex128), batch + (Q.p, Q.p))
        for i in indices_of(s):
            prod = prod @ xs[i]
        out += Q.coefficient(s) @ prod
    return out


def evaluate_rowblocks(Q: NCPoly, blocks) -> np.ndarray:
    """Top rows ``T`` of ``Q^iota(X)`` when every input has the form ``[A_i; 0]``.

    ``blocks`` holds the ``n x p`` top row blocks ``A_i`` (batched as
    ``(..., n, p)``). Since ``[A; 0][B; 0] = [A[:, :n] B; 0]``, every product
    stays an ``n x p`` block and costs ``O(n^2 p)``.
    """
    items = list(blocks)
    if len(items) != Q.m:
        raise InvalidInputError(f"expected {Q.m} row blocks, got {len(items)}")
    n, p = Q.n, Q.p
    xs = [np.asarray(a, dtype=np.complex128) for a in items]
    for a in xs:
        if a.shape[-2:] != (n, p):
            raise InvalidInputError(f"row blocks must be {n}x{p}, got {a.shape}")
    batch = _batch_shape(xs)
    start = np.zeros(batch + (n, p), dtype=np.complex128)
    start[..., :, :n] = np.eye(n)
    prods = _prefix_products(Q.coeffs.keys(), lambda P, i: P[..., :, :n] @ xs[i], start)
    out = np.zeros(batch + (n, p), dtype=np.complex128)
    for s, c in Q.coeffs.items():
        out += c @ prods[s]
    return out


def sign_inputs(sigma) -> list[float]:
    return [float(s) for s in np.asarray(sigma)]


def all_sign_inputs(m: int) -> np.ndarray:
    return sign_table(m).astype(np.float64)


def random_ncpoly(rng: np.random.Generator, m: int, n: int, degree: int, *, density: float = 1.0,
                  homogeneous: bool = False) -> NCPoly:
    """Random complex Gaussian coefficients on subsets of size ``<= degree``."""
    coeffs = {}
    for s in range(1 << m):
        k = popcount(s)
        if k > degree or (homogeneous and k != degree):
            continue
        if density < 1.0 and rng.random() > density:
            continue
        coeffs[s] = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    if not any(popcount(s) == degree for s in coeffs):
        s = (1 << degree) - 1
        coeffs[s] = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    return NCPoly(m, n, coeffs)


def scale(Q: NCPoly, c: complex) -> NCPoly:
    return NCPoly(Q.m, Q.n, {s: c * v for s, v in Q.coeffs.items()}, p=Q.p)


def from_terms(m: int, n: int, terms: Sequence[tuple[Sequence[int], np.ndarray]]) -> NCPoly:
    """Build from ``(variables, coefficient)`` pairs; repeated subsets add."""
    coeffs: dict[int, np.ndarray] = {}
    for idx, c in terms:
        mask = 0
        for i in idx:
            mask |= 1 << int(i)
        coeffs[mask] = coeffs.get(mask, 0) + np.asarray(c, dtype=np.complex128)
    return NCPoly(m, n, coeffs)
