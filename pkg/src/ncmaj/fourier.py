"""Matrix-valued functions on the hypercube ``{-1, 1}^m``.

Conventions
-----------
* Variables are 0-based. A subset ``S`` is a bitmask with bit ``i`` set iff
  variable ``i`` belongs to ``S``.
* Dense value tables have ``2**m`` entries; entry ``x`` holds ``f(sigma)`` where
  ``sigma_i = -1`` iff bit ``i`` of ``x`` is set. Then ``W_S(sigma) =
  (-1)**popcount(x & S)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import EnumerationLimitError, InvalidInputError

MAX_VARIABLES = 24
MAX_ENUMERATION = 20


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << int(i)
    return mask


def indices_of(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def check_enumerable(m: int) -> None:
    if m > MAX_ENUMERATION:
        raise EnumerationLimitError(
            f"exact enumeration needs m <= {MAX_ENUMERATION} (got m={m}); use the Monte Carlo path"
        )


def sign_table(m: int) -> np.ndarray:
    """All ``2**m`` sign vectors as a ``(2**m, m)`` array in table order."""
    x = np.arange(1 << m)[:, None]
    bits = (x >> np.arange(m)[None, :]) & 1
    return (1 - 2 * bits).astype(np.int8)


def sigma_index(sigma) -> int:
    sig = np.asarray(sigma)
    if sig.ndim != 1 or not np.all((sig == 1) | (sig == -1)):
        raise InvalidInputError("sign vector entries must be +1 or -1")
    return int(sum(1 << i for i, s in enumerate(sig) if s == -1))


def walsh_hadamard(table: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along axis 0 (fixed butterfly order).

    Applying it twice multiplies by ``2**m``.
    """
    a = np.array(table, dtype=np.complex128, copy=True)
    size = a.shape[0]
    rest = a.shape[1:]
    h = 1
    while h < size:
        a = a.reshape((size // (2 * h), 2, h) + rest)
        lo = a[:, 0].copy()
        hi = a[:, 1]
        a[:, 0] = lo + hi
        a[:, 1] = lo - hi
        a = a.reshape((size,) + rest)
        h *= 2
    return a


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CubeFunction:
    """``f = sum_S fhat(S) W_S`` with sparse coefficient storage (absent = zero)."""

    m: int
    n: int
    coeffs: Mapping[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.m <= MAX_VARIABLES:
            raise InvalidInputError(f"m must be in [0, {MAX_VARIABLES}], got {self.m}")
        if self.n < 1:
            raise InvalidInputError("matrix dimension n must be positive")
        frozen = {}
        for mask in sorted(self.coeffs):
            mat = np.asarray(self.coeffs[mask])
            if not 0 <= mask < (1 << self.m):
                raise InvalidInputError(f"mask {mask} out of range for m={self.m}")
            if mat.shape != (self.n, self.n):
                raise InvalidInputError(f"coefficient for mask {mask} has shape {mat.shape}")
            if not np.all(np.isfinite(mat)):
                raise InvalidInputError("non-finite coefficient")
            frozen[int(mask)] = _freeze(mat)
        object.__setattr__(self, "coeffs", MappingProxyType(frozen))

    def coefficient(self, mask: int) -> np.ndarray:
        return self.coeffs.get(mask, np.zeros((self.n, self.n), dtype=np.complex128))

    @property
    def degree(self) -> int:
        nz = [popcount(s) for s, c in self.coeffs.items() if np.any(c != 0)]
        return max(nz, default=0)

    def dense_coeffs(self) -> np.ndarray:
        check_enumerable(self.m)
        out = np.zeros((1 << self.m, self.n, self.n), dtype=np.complex128)
        for mask, c in self.coeffs.items():
            out[mask] = c
        return out

    def values(self) -> np.ndarray:
        """Dense table of ``f(sigma)`` in table order."""
        return walsh_hadamard(self.dense_coeffs())

    def __call__(self, sigma) -> np.ndarray:
        return inverse_transform(self, sigma)

    def map_coeffs(self, fn: Callable[[int, np.ndarray], np.ndarray]) -> "CubeFunction":
        return CubeFunction(self.m, self.n, {s: fn(s, c) for s, c in self.coeffs.items()})

    def mass(self) -> float:
        """Plancherel mass ``sum_S Tr(fhat(S) fhat(S)*)``."""
        return float(sum(np.vdot(c, c).real for c in self.coeffs.values()))

    def influences(self) -> np.ndarray:
        out = np.zeros(self.m)
        for mask, c in self.coeffs.items():
            w = np.vdot(c, c).real
            for i in indices_of(mask):
                out[i] += w
        return out

    def to_json(self) -> dict:
        from .io import matrix_to_json

        return {
            "m": self.m,
            "n": self.n,
            "coeffs": [{"mask": s, "matrix": matrix_to_json(c)} for s, c in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "CubeFunction":
        from .io import matrix_from_json

        coeffs = {int(e["mask"]): matrix_from_json(e["matrix"]) for e in obj["coeffs"]}
        return cls(int(obj["m"]), int(obj["n"]), coeffs)


def fourier_transform(values, *, drop_zeros: bool = True) -> CubeFunction:
    """``fhat(S) = 2**-m sum_sigma f(sigma) W_S(sigma)`` from a dense value table."""
    try:
        table = np.asarray(values, dtype=np.complex128)
    except (ValueError, TypeError) as exc:
        raise InvalidInputError("ragged value table") from exc
    if table.ndim != 3 or table.shape[1] != table.shape[2]:
        raise InvalidInputError(f"value table must have shape (2**m, n, n), got {table.shape}")
    size = table.shape[0]
    m = size.bit_length() - 1
    if size != 1 << m:
        raise InvalidInputError(f"table length {size} is not a power of two")
    check_enumerable(m)
    hat = walsh_hadamard(table) / size
    coeffs = {s: hat[s] for s in range(size) if not (drop_zeros and not np.any(hat[s]))}
    return CubeFunction(m, table.shape[1], coeffs)


def from_function(fn: Callable[[np.ndarray], np.ndarray], m: int, n: int) -> CubeFunction:
    """Tabulate ``fn(sigma)`` over the cube and transform."""
    check_enumerable(m)
    signs = sign_table(m)
    table = np.stack([np.asarray(fn(s), dtype=np.complex128).reshape(n, n) for s in signs])
    return fourier_transform(table)


def inverse_transform(f: CubeFunction, sigma) -> np.ndarray:
    """``f(sigma) = sum_S fhat(S) W_S(sigma)``."""
    sig = np.asarray(sigma)
    if sig.shape != (f.m,):
        raise InvalidInputError(f"sign vector must have length {f.m}")
    x = sigma_index(sig)
    out = np.zeros((f.n, f.n), dtype=np.complex128)
    for mask, c in f.coeffs.items():
        out += -c if popcount(mask & x) & 1 else c
    return out


def dictator(m: int, i: int, n: int) -> CubeFunction:
    """``sigma -> sigma_i I_n``."""
    return CubeFunction(m, n, {1 << i: np.eye(n)})


def constant(m: int, A) -> CubeFunction:
    A = np.asarray(A, dtype=np.complex128)
    return CubeFunction(m, A.shape[0], {0: A})


def plancherel_inner(f: CubeFunction, h: CubeFunction) -> complex:
    """``<f, h> = sum_S Tr(fhat(S) hhat(S)*)``."""
    _check_pair(f, h)
    return complex(sum(np.vdot(h.coeffs[s], c) for s, c in f.coeffs.items() if s in h.coeffs))


def pointwise_inner(f: CubeFunction, h: CubeFunction) -> complex:
    """``2**-m sum_sigma Tr(f(sigma) h(sigma)*)`` by enumeration."""
    _check_pair(f, h)
    fv, hv = f.values(), h.values()
    return complex(np.einsum("xij,xij->", fv, np.conj(hv)) / fv.shape[0])


def influence(f: CubeFunction, i: int) -> float:
    """``Inf_i f = sum_{S containing i} Tr(fhat(S) fhat(S)*)`` (0-based ``i``)."""
    if not 0 <= i < f.m:
        raise InvalidInputError(f"variable index {i} out of range for m={f.m}")
    return float(f.influences()[i])


def max_influence(f: CubeFunction) -> float:
    return float(f.influences().max()) if f.m else 0.0


def apply_trho(f: CubeFunction, rho: float) -> CubeFunction:
    """Ornstein-Uhlenbeck semigroup: scale ``fhat(S)`` by ``rho**|S|``."""
    if not 0.0 <= rho <= 1.0:
        raise InvalidInputError(f"rho must lie in [0, 1], got {rho}")
    return f.map_coeffs(lambda s, c: c * rho ** popcount(s))


def project_levels(f: CubeFunction, selector: Callable[[int], bool]) -> CubeFunction:
    """Keep the coefficients whose level ``|S|`` satisfies ``selector``."""
    return CubeFunction(f.m, f.n, {s: c for s, c in f.coeffs.items() if selector(popcount(s))})


def level_le(d: int) -> Callable[[int], bool]:
    return lambda k: k <= d


def level_gt(d: int) -> Callable[[int], bool]:
    return lambda k: k > d


def level_eq(d: int) -> Callable[[int], bool]:
    return lambda k: k == d


def convolve(f: CubeFunction, h: CubeFunction) -> CubeFunction:
    """``(f * h)^(S) = fhat(S) hhat(S)``."""
    _check_pair(f, h)
    return CubeFunction(f.m, f.n, {s: c @ h.coeffs[s] for s, c in f.coeffs.items() if s in h.coeffs})


def noise_kernel(m: int, rho: float, n: int = 1) -> CubeFunction:
    """``R_rho(sigma) = prod_j (1 + rho sigma_j)`` times ``I_n``."""
    return CubeFunction(m, n, {s: rho ** popcount(s) * np.eye(n) for s in range(1 << m)})


def _check_pair(f: CubeFunction, h: CubeFunction) -> None:
    if f.m != h.m or f.n != h.n:
        raise InvalidInputError(f"shape mismatch: (m={f.m}, n={f.n}) vs (m={h.m}, n={h.n})")
