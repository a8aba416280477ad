"""Dense complex matrix algebra.

Tensor index convention: an ``n**2 x n**2`` matrix acts on ``C^n (x) C^n`` with
row index ``i*n + k`` and column index ``j*n + l`` for ``(A (x) B)[i*n+k, j*n+l]
= A[i, j] * B[k, l]``, which is what :func:`numpy.kron` produces.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidInputError, UnsupportedInputError

HERMITIAN_TOL = 1e-10


def as_matrix(A, *, square: bool = False, name: str = "matrix") -> np.ndarray:
    """Return ``A`` as a finite 2-D complex128 array, raising on bad input."""
    arr = np.asarray(A, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidInputError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return arr


def dagger(A: np.ndarray) -> np.ndarray:
    """Conjugate transpose over the last two axes (batch friendly)."""
    return np.conj(np.swapaxes(A, -1, -2))


def op_norm(A) -> float:
    """Largest singular value."""
    arr = as_matrix(A)
    return float(np.linalg.svd(arr, compute_uv=False)[0])


def abs_matrix(A) -> np.ndarray:
    """``|A| = (A A*)^{1/2}`` computed from the SVD ``A = U S V*`` as ``U S U*``."""
    arr = as_matrix(A, square=True)
    U, s, _ = np.linalg.svd(arr)
    out = (U * s) @ dagger(U)
    return 0.5 * (out + dagger(out))


def is_hermitian(A, tol: float = HERMITIAN_TOL) -> bool:
    arr = as_matrix(A, square=True)
    scale = np.linalg.norm(arr, 2)
    return bool(np.linalg.norm(arr - dagger(arr), 2) <= tol * scale)


def hermitian_eigh(A, tol: float = HERMITIAN_TOL):
    """Eigendecomposition of a (numerically) Hermitian matrix.

    The input is symmetrized before diagonalizing; inputs further than ``tol``
    (relative to the operator norm) from Hermitian are rejected.
    """
    arr = as_matrix(A, square=True)
    if not is_hermitian(arr, tol):
        raise InvalidInputError("spectral calculus needs a Hermitian matrix")
    return np.linalg.eigh(0.5 * (arr + dagger(arr)))


def spectral_apply(f: Callable[[np.ndarray], np.ndarray], A) -> np.ndarray:
    """Apply a real scalar function to a Hermitian matrix through its eigenvalues."""
    w, V = hermitian_eigh(A)
    fw = np.asarray(f(w), dtype=np.float64)
    return (V * fw) @ dagger(V)


def chop_general(A) -> np.ndarray:
    """Clip singular values at 1: ``U S V* -> U min(S, 1) V*``.

    For Hermitian input this agrees with applying ``Chop`` to the eigenvalues.
    Matrices already inside the unit ball are returned unchanged.
    """
    arr = as_matrix(A, square=True)
    U, s, Vh = np.linalg.svd(arr)
    if s[0] <= 1.0:
        return arr.copy()
    return (U * np.minimum(s, 1.0)) @ Vh


def embed_iota(A, p: int) -> np.ndarray:
    """Zero-pad an ``n x n`` matrix into the top-left block of a ``p x p`` matrix."""
    arr = as_matrix(A, square=True)
    n = arr.shape[0]
    if int(p) < n:
        raise InvalidInputError(f"embedding dimension p={p} is smaller than n={n}")
    out = np.zeros((int(p), int(p)), dtype=np.complex128)
    out[:n, :n] = arr
    return out


def tensor_from_factors(factors: Sequence[np.ndarray], n: Optional[int] = None) -> np.ndarray:
    """``sum_i F_i (x) conj(F_i)`` as an ``n**2 x n**2`` matrix."""
    if len(factors) == 0:
        if n is None:
            raise InvalidInputError("need n to build a tensor from an empty factor list")
        return np.zeros((n * n, n * n), dtype=np.complex128)
    mats = [as_matrix(F, square=True, name="factor") for F in factors]
    n0 = mats[0].shape[0]
    if any(F.shape != (n0, n0) for F in mats):
        raise InvalidInputError("all factors must share one size")
    if n is not None and n != n0:
        raise InvalidInputError(f"factor size {n0} does not match n={n}")
    out = np.zeros((n0 * n0, n0 * n0), dtype=np.complex128)
    for F in mats:
        out += np.kron(F, np.conj(F))
    return out


@dataclass(frozen=True)
class Tensor4:
    """An ``n**2 x n**2`` matrix read as a 4-tensor, optionally with PSD factors."""

    n: int
    matrix: np.ndarray
    factors: Optional[tuple] = field(default=None)

    def __post_init__(self):
        mat = as_matrix(self.matrix, square=True, name="tensor")
        if mat.shape[0] != self.n * self.n:
            raise InvalidInputError(f"tensor must be {self.n**2}x{self.n**2}, got {mat.shape}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        if self.factors is not None:
            facs = tuple(as_matrix(F, square=True, name="factor") for F in self.factors)
            for F in facs:
                if F.shape != (self.n, self.n):
                    raise InvalidInputError("factor shape does not match n")
                F.setflags(write=False)
            built = tensor_from_factors(facs, self.n)
            if not np.allclose(built, mat, rtol=0.0, atol=1e-10):
                raise InvalidInputError("matrix differs from the sum of factor tensors")
            object.__setattr__(self, "factors", facs)

    @classmethod
    def from_factors(cls, factors: Sequence[np.ndarray], n: Optional[int] = None) -> "Tensor4":
        mat = tensor_from_factors(factors, n)
        size = int(round(np.sqrt(mat.shape[0])))
        return cls(size, mat, tuple(factors))

    @property
    def is_psd_factored(self) -> bool:
        return self.factors is not None


def _tensor_dim(X) -> tuple[np.ndarray, int]:
    if isinstance(X, Tensor4):
        return X.matrix, X.n
    mat = as_matrix(X, square=True, name="tensor")
    n = int(round(np.sqrt(mat.shape[0])))
    if n * n != mat.shape[0]:
        raise InvalidInputError(f"tensor size {mat.shape[0]} is not a perfect square")
    return mat, n


def embed_iota_tensor(M, p: int, pairs: Optional[Sequence[tuple]] = None) -> Tensor4:
    """Embed a 4-tensor into dimension ``p`` factor by factor.

    Uses the PSD factors of ``M`` when present (``F (x) conj F`` maps to
    ``iota(F) (x) conj iota(F)``), otherwise an explicit list of ``(C_k, D_k)``
    pairs with ``M = sum_k C_k (x) D_k``.
    """
    if isinstance(M, Tensor4) and M.factors is not None and pairs is None:
        return Tensor4.from_factors([embed_iota(F, p) for F in M.factors])
    if pairs is None:
        raise UnsupportedInputError("tensor embedding needs a factorization of M")
    mat, n = _tensor_dim(M)
    built = sum(np.kron(as_matrix(C), as_matrix(D)) for C, D in pairs)
    if not np.allclose(built, mat, rtol=0.0, atol=1e-10):
        raise InvalidInputError("pairs do not reproduce M")
    out = sum(np.kron(embed_iota(C, p), embed_iota(D, p)) for C, D in pairs)
    return Tensor4(int(p), out)


def partial_trace_2(X) -> np.ndarray:
    """Trace out the second tensor factor: ``Tr_2(A (x) B) = A Tr(B)``."""
    mat, n = _tensor_dim(X)
    return np.einsum("ikjk->ij", mat.reshape(n, n, n, n))


def partial_trace_1(X) -> np.ndarray:
    """Trace out the first tensor factor: ``Tr_1(A (x) B) = Tr(A) B``."""
    mat, n = _tensor_dim(X)
    return np.einsum("ikil->kl", mat.reshape(n, n, n, n))


def _vector_matrix(U, name: str) -> np.ndarray:
    arr = np.asarray(U, dtype=np.complex128)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"{name} must have shape (n, n, N), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return arr


def odot(U, V) -> np.ndarray:
    """``(U . V)[i*n+k, j*n+l] = <U_ij, V_kl>`` for vector-valued matrices.

    ``U`` and ``V`` have shape ``(n, n, N)``; a 2-D input is read as ``N = 1``,
    in which case the result is ``U (x) conj(V)``.
    """
    U = _vector_matrix(U, "U")
    V = _vector_matrix(V, "V")
    if U.shape != V.shape:
        raise InvalidInputError(f"shape mismatch {U.shape} vs {V.shape}")
    n = U.shape[0]
    return np.einsum("ija,kla->ikjl", U, np.conj(V)).reshape(n * n, n * n)


def vector_gram(U) -> tuple[np.ndarray, np.ndarray]:
    """The pair ``(U U*, U* U)`` for a vector-valued matrix.

    ``(U U*)_ij = sum_k <U_ik, U_jk>`` and ``(U* U)_ij = sum_k <U_ki, U_kj>``.
    """
    U = _vector_matrix(U, "U")
    uu = np.einsum("ika,jka->ij", U, np.conj(U))
    u_u = np.einsum("kia,kja->ij", U, np.conj(U))
    return uu, u_u


def is_vector_unitary(U, tol: float = 1e-8) -> bool:
    uu, u_u = vector_gram(U)
    eye = np.eye(uu.shape[0])
    return bool(np.max(np.abs(uu - eye)) <= tol and np.max(np.abs(u_u - eye)) <= tol)


def polar_unitary(A: np.ndarray) -> np.ndarray:
    """Unitary (or co-isometry) ``X`` maximizing ``Re Tr(X A)``.

    For ``A = U S W*`` (thin SVD) the maximizer is ``W U*`` and the maximum
    equals the sum of singular values of ``A``.
    """
    U, _, Wh = np.linalg.svd(A, full_matrices=False)
    return dagger(Wh) @ dagger(U)


def is_psd(A, tol: float = 1e-8) -> bool:
    arr = as_matrix(A, square=True)
    if not is_hermitian(arr, 1e-8):
        return False
    w = np.linalg.eigvalsh(0.5 * (arr + dagger(arr)))
    scale = max(float(np.max(np.abs(w))), 1e-300)
    return bool(w[0] >= -tol * scale)
