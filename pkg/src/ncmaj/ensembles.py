"""Seeded samplers for the random-matrix input distributions.

Every ensemble is normalized so that ``E G G* = I``. Complex standard
Gaussians have ``E g = 0`` and ``E |g|^2 = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .errors import InvalidInputError
from .linalg import as_matrix, dagger, embed_iota, is_psd
from .montecarlo import MCEstimate, RngStream, mc_estimate, run_chunks

FRAME_TOL = 1e-8
KINDS = ("rademacher", "haar_unitary", "gaussian_frame", "wigner_gue", "embed_rotate")


def complex_gaussian(gen: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussians ``(x + i y) / sqrt(2)``."""
    z = gen.standard_normal(tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


def haar_columns(gen: np.random.Generator, p: int, k: int, batch=()) -> np.ndarray:
    """First ``k`` columns of a ``p x p`` Haar unitary, shape ``batch + (p, k)``.

    QR of a complex Ginibre matrix, with column ``j`` rotated by the phase of
    ``R[j, j]`` so the law is exactly Haar.
    """
    Z = complex_gaussian(gen, tuple(batch) + (p, k))
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R, axis1=-2, axis2=-1)
    phase = d / np.abs(d)
    return Q * phase[..., None, :]


def haar_unitary(gen: np.random.Generator, p: int, batch=()) -> np.ndarray:
    return haar_columns(gen, p, p, batch)


def haar_top_rows(gen: np.random.Generator, p: int, n: int, batch=()) -> np.ndarray:
    """Top ``n`` rows of a ``p x p`` Haar unitary (rows of ``H`` are columns of the Haar ``H*``)."""
    return dagger(haar_columns(gen, p, n, batch))


def standard_frame(n: int) -> np.ndarray:
    """The ``n**2`` matrices ``E_ab / sqrt(n)``, shape ``(n*n, n, n)``."""
    V = np.zeros((n * n, n, n), dtype=np.complex128)
    for a in range(n):
        for b in range(n):
            V[a * n + b, a, b] = 1.0 / np.sqrt(n)
    return V


def frame_residuals(frame) -> tuple[float, float]:
    V = np.asarray(frame, dtype=np.complex128)
    n = V.shape[-1]
    eye = np.eye(n)
    r1 = np.max(np.abs(np.einsum("kij,klj->il", V, np.conj(V)) - eye))
    r2 = np.max(np.abs(np.einsum("kji,kjl->il", np.conj(V), V) - eye))
    return float(r1), float(r2)


@dataclass(frozen=True)
class EnsembleSpec:
    """Tagged description of a matrix-valued random variable.

    ``gaussian_frame`` with ``basis="standard"`` stands for the frame
    ``{E_ab / sqrt(n)}`` without materializing it, so the draw is a complex
    Ginibre matrix with entry variance ``1/n``.
    """

    kind: str
    n: int = 1
    p: Optional[int] = None
    frame: Optional[np.ndarray] = None
    basis: Optional[str] = None
    inner: Optional["EnsembleSpec"] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown ensemble kind {self.kind!r}; choose from {KINDS}")
        if self.n < 1:
            raise InvalidInputError("dimension must be positive")
        if self.kind == "gaussian_frame":
            if self.frame is None:
                if self.basis != "standard":
                    raise InvalidInputError("gaussian_frame needs an explicit frame or basis='standard'")
            else:
                V = np.asarray(self.frame, dtype=np.complex128)
                if V.ndim != 3 or V.shape[1:] != (self.n, self.n) or V.shape[0] == 0:
                    raise InvalidInputError(f"frame must have shape (N, {self.n}, {self.n}), got {V.shape}")
                r1, r2 = frame_residuals(V)
                if max(r1, r2) > FRAME_TOL:
                    raise InvalidInputError(
                        f"frame must satisfy sum V V* = sum V* V = I (residuals {r1:.2e}, {r2:.2e})"
                    )
                V.setflags(write=False)
                object.__setattr__(self, "frame", V)
        if self.kind == "embed_rotate":
            if self.inner is None or self.p is None:
                raise InvalidInputError("embed_rotate needs an inner ensemble and p")
            if self.inner.kind in ("embed_rotate", "haar_unitary"):
                raise InvalidInputError("embed_rotate inner ensemble must be an n x n ensemble")
            if self.p < self.inner.dim:
                raise InvalidInputError(f"embed_rotate needs p >= {self.inner.dim}, got {self.p}")
            object.__setattr__(self, "n", self.inner.dim)
        if self.kind == "haar_unitary":
            if self.p is None:
                object.__setattr__(self, "p", self.n)
            object.__setattr__(self, "n", int(self.p))

    # constructors
    @classmethod
    def rademacher(cls, n: int = 1) -> "EnsembleSpec":
        return cls("rademacher", n=n)

    @classmethod
    def haar(cls, p: int) -> "EnsembleSpec":
        return cls("haar_unitary", n=p, p=p)

    @classmethod
    def gaussian_frame(cls, frame=None, *, n: Optional[int] = None, basis: Optional[str] = None) -> "EnsembleSpec":
        if frame is not None:
            V = np.asarray(frame, dtype=np.complex128)
            if V.ndim != 3:
                raise InvalidInputError(f"a frame is a stack of n x n matrices, got shape {V.shape}")
            return cls("gaussian_frame", n=V.shape[-1], frame=V)
        if n is None:
            raise InvalidInputError("standard frame needs n")
        return cls("gaussian_frame", n=n, basis=basis or "standard")

    @classmethod
    def gue(cls, n: int) -> "EnsembleSpec":
        return cls("wigner_gue", n=n)

    @classmethod
    def embed_rotate(cls, inner: "EnsembleSpec", p: int) -> "EnsembleSpec":
        return cls("embed_rotate", p=p, inner=inner)

    @property
    def dim(self) -> int:
        """Size of the sampled matrices."""
        return int(self.p) if self.kind == "embed_rotate" else self.n

    @property
    def is_scalar(self) -> bool:
        return self.kind == "rademacher"

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "embed_rotate":
            out.update(inner=self.inner.to_json(), p=int(self.p))
        elif self.kind == "haar_unitary":
            out["p"] = int(self.p)
        else:
            out["n"] = self.n
        if self.kind == "gaussian_frame":
            if self.frame is None:
                out["basis"] = self.basis
            else:
                from .io import matrix_to_json

                out["frame"] = [matrix_to_json(V) for V in self.frame]
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "EnsembleSpec":
        kind = obj.get("kind")
        aliases = {"haar": "haar_unitary", "gue": "wigner_gue", "frame": "gaussian_frame"}
        kind = aliases.get(kind, kind)
        if kind == "embed_rotate":
            return cls.embed_rotate(cls.from_json(obj["inner"]), int(obj["p"]))
        if kind == "haar_unitary":
            return cls.haar(int(obj.get("p", obj.get("n", 1))))
        if kind == "gaussian_frame":
            if "frame" in obj:
                from .io import matrix_from_json

                return cls.gaussian_frame(np.stack([matrix_from_json(V) for V in obj["frame"]]))
            return cls.gaussian_frame(n=int(obj["n"]), basis=obj.get("basis", "standard"))
        if kind == "wigner_gue":
            return cls.gue(int(obj["n"]))
        if kind == "rademacher":
            return cls.rademacher(int(obj.get("n", 1)))
        raise InvalidInputError(f"unknown ensemble kind {kind!r}")


def _frame_draw(spec: EnsembleSpec, gen, count: int) -> np.ndarray:
    n = spec.n
    if spec.frame is None:
        return complex_gaussian(gen, (count, n, n)) / np.sqrt(n)
    g = complex_gaussian(gen, (count, spec.frame.shape[0]))
    return np.einsum("bk,kij->bij", g, spec.frame)


def _gue_draw(n: int, gen, count: int) -> np.ndarray:
    A = complex_gaussian(gen, (count, n, n)) / np.sqrt(n)
    return (A + dagger(A)) / np.sqrt(2.0)


def inner_batch(spec: EnsembleSpec, gen: np.random.Generator, count: int) -> np.ndarray:
    """``count`` draws as ``(count, n, n)`` matrices (Rademacher as ``b I``)."""
    if spec.kind == "rademacher":
        b = 1.0 - 2.0 * gen.integers(0, 2, size=count)
        return b[:, None, None] * np.eye(spec.n, dtype=np.complex128)
    if spec.kind == "haar_unitary":
        return haar_unitary(gen, spec.p, (count,))
    if spec.kind == "gaussian_frame":
        return _frame_draw(spec, gen, count)
    if spec.kind == "wigner_gue":
        return _gue_draw(spec.n, gen, count)
    raise InvalidInputError(f"{spec.kind} is not an n x n base ensemble")


def rowblock_batch(spec: EnsembleSpec, gen_inner: np.random.Generator, gen_haar: np.random.Generator,
                   count: int) -> np.ndarray:
    """Top ``n`` rows of ``iota(G) H`` for ``embed_rotate``: ``G`` times the top rows of ``H``."""
    if spec.kind != "embed_rotate":
        raise InvalidInputError("row blocks exist only for embed_rotate")
    G = inner_batch(spec.inner, gen_inner, count)
    R = haar_top_rows(gen_haar, spec.p, spec.n, (count,))
    return G @ R


def sample_batch(spec: EnsembleSpec, gen: np.random.Generator, count: int) -> np.ndarray:
    """``count`` draws as ``(count, dim, dim)`` matrices."""
    if spec.kind == "embed_rotate":
        G = inner_batch(spec.inner, gen, count)
        H = haar_unitary(gen, spec.p, (count,))
        out = np.zeros((count, spec.p, spec.p), dtype=np.complex128)
        out[:, : spec.n, :] = G @ H[:, : spec.n, :]
        return out
    return inner_batch(spec, gen, count)


def sample(spec: EnsembleSpec, rng: RngStream):
    """One draw; a Rademacher draw is returned as the scalar ``+1`` or ``-1``."""
    gen = rng.generator()
    if spec.kind == "rademacher":
        return 1 - 2 * int(gen.integers(0, 2))
    return sample_batch(spec, gen, 1)[0]


def check_moment_bound(spec: EnsembleSpec, K: int, samples: int, rng: RngStream, *,
                       workers: Optional[int] = None) -> MCEstimate:
    """``||E (G G*)^K||`` with the entrywise standard errors folded into a norm bound.

    The operator norm of the error matrix is at most its Frobenius norm, so the
    reported stderr is ``sqrt(sum_ij se_ij^2)``.
    """
    if int(K) < 1:
        raise InvalidInputError("K must be a positive integer")
    d = spec.dim

    def kernel(stream: RngStream, count: int):
        G = sample_batch(spec, stream.generator(), count)
        P = np.linalg.matrix_power(G @ dagger(G), int(K)).reshape(count, -1)
        return np.concatenate([P.real, P.imag], axis=1)

    acc = run_chunks(kernel, samples, rng, workers=workers)
    mean = acc.mean[: d * d] + 1j * acc.mean[d * d:]
    est = float(np.linalg.norm(mean.reshape(d, d), 2))
    se = float(np.sqrt(np.sum(acc.stderr**2)))
    return MCEstimate(est, se, acc.count, rng.master_seed, f"||E(GG*)^{K}||", {"K": int(K), "ensemble": spec.to_json()})


def haar_block_damping_check(A, B, p: int, samples: int, rng: RngStream, *,
                             workers: Optional[int] = None) -> MCEstimate:
    """Monte Carlo estimate of ``E ||iota(A) H iota(B)||^2`` for Haar ``H`` of size ``p``.

    Only the top-left ``n x n`` block ``H_11`` of ``H`` matters, and it equals the
    first ``n`` rows of the first ``n`` Haar columns.
    """
    A = as_matrix(A, square=True, name="A")
    B = as_matrix(B, square=True, name="B")
    n = A.shape[0]
    if B.shape != (n, n):
        raise InvalidInputError("A and B must have the same size")
    if not (is_psd(A) and is_psd(B)):
        raise InvalidInputError("A and B must be positive semidefinite")
    if int(p) < n:
        raise InvalidInputError(f"need p >= n = {n}")

    def kernel(stream: RngStream, count: int):
        H11 = haar_columns(stream.generator(), int(p), n, (count,))[:, :n, :]
        s = np.linalg.svd(A @ H11 @ B, compute_uv=False)[:, 0]
        return s**2

    return mc_estimate(kernel, samples, rng, label="E||i(A) H i(B)||^2", params={"p": int(p), "n": n},
                       workers=workers)


def embed_rotate_dense(G: np.ndarray, H: np.ndarray) -> np.ndarray:
    """``iota(G) H`` built densely (reference path)."""
    return embed_iota(G, H.shape[0]) @ H
