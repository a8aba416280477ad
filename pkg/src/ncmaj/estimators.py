"""Exact Boolean enumerators and Monte Carlo estimators for trace functionals.

Normalization: with ``normalize=True`` (default) traces are divided by the core
dimension ``n`` of the polynomial, also for embedded polynomials acting on
``p x p`` inputs. ``normalize=False`` reports plain ``Tr``.

Embedded polynomials evaluated under ``embed_rotate`` use row blocks: every
input ``iota(G) H`` has only its top ``n`` rows nonzero, so ``Q^iota`` is
``[T; 0]`` with ``T`` of shape ``n x p``, and spectral quantities follow from
the ``n`` singular values of ``T`` (the remaining ``p - n`` are zero).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .ensembles import EnsembleSpec, haar_top_rows, inner_batch
from .errors import InvalidInputError
from .fourier import CubeFunction, apply_trho, check_enumerable, popcount
from .linalg import dagger
from .montecarlo import DEFAULT_CHUNK, MCEstimate, RngStream, mc_estimate, mc_estimates, run_chunks
from .ncpoly import NCPoly, embed, evaluate_rowblocks, evaluate_top, from_cube_function
from .testfns import ScalarTestFn

NORM_TOL = 1e-10

# substream roles for each input variable
ROLE_INNER = 0
ROLE_HAAR = 1


def trace_power(T: np.ndarray, K: int) -> np.ndarray:
    """``Tr (T T*)^K`` for a batch of ``(..., n, q)`` matrices."""
    P = T @ dagger(T)
    if K == 1:
        return np.real(np.trace(P, axis1=-2, axis2=-1))
    if K == 2:
        return np.sum(np.abs(P) ** 2, axis=(-2, -1))
    w = np.clip(np.linalg.eigvalsh(P), 0.0, None)
    return np.sum(w**K, axis=-1)


def _norm(Q: NCPoly, normalize: bool) -> float:
    return 1.0 / Q.n if normalize else 1.0


def chunk_for(Q: NCPoly, budget: int = 4_000_000) -> int:
    """Chunk size keeping one batch of ``n x p`` blocks near ``budget`` entries."""
    return max(1, min(DEFAULT_CHUNK, budget // (Q.n * Q.p)))


def _check_K(K) -> int:
    if int(K) != K or int(K) < 1:
        raise InvalidInputError("K must be a positive integer")
    return int(K)


# exact Boolean side

def boolean_values(Q: NCPoly) -> np.ndarray:
    """``Q(sigma)`` core blocks for all sign vectors (exact enumeration, ``m <= 20``)."""
    return Q.boolean_values()


def trace_moment_boolean_exact(Q: NCPoly, K: int, *, normalize: bool = True) -> float:
    """``2^-m sum_sigma Tr|Q(sigma)|^{2K}``, divided by ``n`` when normalized."""
    K = _check_K(K)
    vals = boolean_values(Q)
    return float(np.mean(trace_power(vals, K)) * _norm(Q, normalize))


def psi_trace_boolean_exact(Q: NCPoly, test: Optional[ScalarTestFn] = None, *, mode: str = "A",
                            normalize: bool = True) -> float:
    s = np.linalg.svd(boolean_values(Q), compute_uv=False)
    return float(np.mean(_psi_from_singular(s, Q, test, mode)) * _norm(Q, normalize))


def embedded_second_moment_exact(Q: NCPoly, p: int, *, normalize: bool = True) -> float:
    """Exact ``E Tr|Q^iota{G_i H_i}|^2`` for inputs with ``E G = 0`` and ``E G G* = I_n``.

    Averaging a Haar conjugate of ``iota(I_n)`` gives ``(n/p) I_p``, so each
    term of degree ``k >= 1`` keeps the weight ``(n/p)^(k-1)``. Degree-0 and
    degree-1 terms match the cube second moment exactly.
    """
    if int(p) < Q.n:
        raise InvalidInputError(f"need p >= n = {Q.n}")
    r = Q.n / int(p)
    total = sum(r ** max(popcount(s) - 1, 0) * np.vdot(c, c).real for s, c in Q.coeffs.items())
    return float(total) * _norm(Q, normalize)


def opnorm_boolean(Q: NCPoly) -> np.ndarray:
    return np.linalg.svd(boolean_values(Q), compute_uv=False)[:, 0]


def noise_stability_exact(f: CubeFunction, rho: float) -> float:
    """``(1/n) E_b Tr|T_rho Q_f(b)|^2 = (1/n) sum_S rho^{2|S|} Tr|fhat(S)|^2``."""
    if not 0.0 <= rho <= 1.0:
        raise InvalidInputError(f"rho must lie in [0, 1], got {rho}")
    total = sum(rho ** (2 * popcount(s)) * np.vdot(c, c).real for s, c in f.coeffs.items())
    return float(total / f.n)


def max_opnorm_exact(f: CubeFunction) -> float:
    check_enumerable(f.m)
    return float(np.linalg.svd(f.values(), compute_uv=False)[:, 0].max())


# Monte Carlo side

def _input_specs(Q: NCPoly, spec) -> list[EnsembleSpec]:
    specs = [spec] * Q.m if isinstance(spec, EnsembleSpec) else list(spec)
    if len(specs) != Q.m:
        raise InvalidInputError(f"need {Q.m} ensembles, got {len(specs)}")
    for s in specs:
        if s.dim != Q.p:
            raise InvalidInputError(
                f"ensemble {s.kind} produces {s.dim}x{s.dim} inputs but the polynomial expects {Q.p}x{Q.p}"
                + ("; embed the polynomial first" if s.kind == "embed_rotate" else "")
            )
        if s.kind == "embed_rotate" and s.n != Q.n:
            raise InvalidInputError(f"embed_rotate inner dimension {s.n} differs from n={Q.n}")
    return specs


def _uses_rowblocks(Q: NCPoly, specs: Sequence[EnsembleSpec]) -> bool:
    return Q.embedded and all(s.kind == "embed_rotate" for s in specs)


def sample_top(Q: NCPoly, specs: Sequence[EnsembleSpec], stream: RngStream, count: int) -> np.ndarray:
    """Top ``n`` rows of ``Q`` at ``count`` independent input draws, shape ``(count, n, p)``.

    Variable ``i`` draws its inner matrix from substream ``(i, 0)`` and its Haar
    factor from ``(i, 1)``, so runs that differ only in ``p`` share the inner
    draws.
    """
    if _uses_rowblocks(Q, specs):
        blocks = []
        for i, s in enumerate(specs):
            G = inner_batch(s.inner, stream.generator(i, ROLE_INNER), count)
            R = haar_top_rows(stream.generator(i, ROLE_HAAR), s.p, s.n, (count,))
            blocks.append(G @ R)
        return evaluate_rowblocks(Q, blocks)
    xs = []
    for i, s in enumerate(specs):
        if s.kind == "embed_rotate":
            G = inner_batch(s.inner, stream.generator(i, ROLE_INNER), count)
            R = haar_top_rows(stream.generator(i, ROLE_HAAR), s.p, s.n, (count,))
            X = np.zeros((count, s.p, s.p), dtype=np.complex128)
            X[:, : s.n, :] = G @ R
        else:
            X = inner_batch(s, stream.generator(i, ROLE_INNER), count)
        xs.append(X)
    top = evaluate_top(Q, xs)
    return top


def trace_moment_mc(Q: NCPoly, spec, K: int, samples: int, rng: RngStream, *, normalize: bool = True,
                    workers: Optional[int] = None) -> MCEstimate:
    """Monte Carlo mean of ``Tr|Q(X)|^{2K}`` (divided by ``n`` when normalized).

    ``spec`` is one ensemble for all variables or a list with one per variable.
    """
    K = _check_K(K)
    specs = _input_specs(Q, spec)
    c = _norm(Q, normalize)

    def kernel(stream, count):
        return trace_power(sample_top(Q, specs, stream, count), K) * c

    return mc_estimate(kernel, samples, rng, label=f"trace moment 2K={2 * K}",
                       params={"K": K, "normalize": normalize}, chunk=chunk_for(Q), workers=workers)


def _psi_from_singular(s: np.ndarray, Q: NCPoly, test: Optional[ScalarTestFn], mode: str) -> np.ndarray:
    """Per-draw ``Tr test(|Q|^2)`` (mode A) or ``Tr max(0, |Q| - 1)^2`` (mode B).

    ``s`` holds the ``n`` leading singular values; ``|Q|`` has ``p - n`` extra
    zero eigenvalues.
    """
    if mode == "A":
        if test is None:
            raise InvalidInputError("mode A needs a test function")
        zeros = Q.p - Q.n
        return np.sum(test(s**2), axis=-1) + zeros * float(test(0.0))
    if mode == "B":
        return np.sum(np.maximum(s - 1.0, 0.0) ** 2, axis=-1)
    raise InvalidInputError(f"mode must be 'A' or 'B', got {mode!r}")


def psi_trace_mc(Q: NCPoly, spec, test: Optional[ScalarTestFn], samples: int, rng: RngStream, *,
                 mode: str = "A", normalize: bool = True, workers: Optional[int] = None) -> MCEstimate:
    """``Tr test(|Q|^2)`` (mode A) or ``Tr (max(0, |Q| - 1))^2`` (mode B), averaged."""
    if mode not in ("A", "B"):
        raise InvalidInputError(f"mode must be 'A' or 'B', got {mode!r}")
    specs = _input_specs(Q, spec)
    c = _norm(Q, normalize)

    def kernel(stream, count):
        s = np.linalg.svd(sample_top(Q, specs, stream, count), compute_uv=False)
        return _psi_from_singular(s, Q, test, mode) * c

    label = f"psi trace ({test.kind if test is not None else 'hinge^2'}, mode {mode})"
    return mc_estimate(kernel, samples, rng, label=label, params={"mode": mode}, chunk=chunk_for(Q), workers=workers)


def check_unit_ball(f: CubeFunction, tol: float = NORM_TOL) -> float:
    """Return ``max_sigma ||f(sigma)||``, raising if it exceeds 1."""
    top = max_opnorm_exact(f)
    if top > 1.0 + tol:
        raise InvalidInputError(f"need ||f(sigma)|| <= 1 for all sigma, found {top:.6g}")
    return top


def smoothed_poly(f: CubeFunction, rho: float, p: int) -> NCPoly:
    """``(T_rho Q_f)^iota`` on ``p x p`` inputs."""
    return embed(from_cube_function(apply_trho(f, rho)), p)


def default_inner(n: int) -> EnsembleSpec:
    return EnsembleSpec.gaussian_frame(n=n, basis="standard")


def chop_distance_mc(f: CubeFunction, rho: float, p: int, samples: int, rng: RngStream, *,
                     inner: Optional[EnsembleSpec] = None, workers: Optional[int] = None) -> MCEstimate:
    """``(1/n) E Tr|T_rho Q^iota - Chop T_rho Q^iota|^2`` under ``embed_rotate(inner, p)``.

    Clipping singular values at 1 leaves ``max(0, s - 1)`` as the singular
    values of the difference.
    """
    check_unit_ball(f)
    Q = smoothed_poly(f, rho, p)
    spec = EnsembleSpec.embed_rotate(inner or default_inner(f.n), p)
    est = psi_trace_mc(Q, spec, None, samples, rng, mode="B", workers=workers)
    return MCEstimate(est.mean, est.stderr, est.samples, est.master_seed, "chop distance",
                      {"rho": rho, "p": int(p)})


def chop_distance_paired(f: CubeFunction, rho: float, ps: Sequence[int], samples: int, rng: RngStream, *,
                         inner: Optional[EnsembleSpec] = None,
                         workers: Optional[int] = None) -> tuple[list[MCEstimate], list[MCEstimate]]:
    """Chop distance at several ``p`` from shared inner draws.

    Returns the per-``p`` estimates and the paired differences between
    consecutive ``p`` values.
    """
    check_unit_ball(f)
    polys = [smoothed_poly(f, rho, p) for p in ps]
    specs = [[EnsembleSpec.embed_rotate(inner or default_inner(f.n), p)] * f.m for p in ps]

    def kernel(stream, count):
        cols = []
        for Q, sp in zip(polys, specs):
            s = np.linalg.svd(sample_top(Q, sp, stream, count), compute_uv=False)
            cols.append(np.sum(np.maximum(s - 1.0, 0.0) ** 2, axis=-1) / f.n)
        vals = np.stack(cols, axis=1)
        return np.concatenate([vals, vals[:, 1:] - vals[:, :-1]], axis=1)

    labels = [f"chop distance p={p}" for p in ps] + [f"diff p={b} - p={a}" for a, b in zip(ps, ps[1:])]
    ests = mc_estimates(kernel, samples, rng, labels, params={"rho": rho}, workers=workers)
    return ests[: len(ps)], ests[len(ps):]


def chop_stability_mc(f: CubeFunction, rho: float, p: int, samples: int, rng: RngStream, *,
                      inner: Optional[EnsembleSpec] = None,
                      workers: Optional[int] = None) -> tuple[MCEstimate, MCEstimate]:
    """``(1/n) E Tr|Chop T_rho Q^iota|^2`` and ``|(1/n) E Tr Chop T_rho Q^iota|``.

    For ``T = U S V*`` the clipped matrix is ``[U min(S, 1) V*; 0]`` whose trace
    is the trace of its leading ``n x n`` block.
    """
    check_unit_ball(f)
    n = f.n
    Q = smoothed_poly(f, rho, p)
    specs = [EnsembleSpec.embed_rotate(inner or default_inner(n), p)] * f.m

    def kernel(stream, count):
        T = sample_top(Q, specs, stream, count)
        U, s, Vh = np.linalg.svd(T, full_matrices=False)
        sc = np.minimum(s, 1.0)
        Tc = (U * sc[:, None, :]) @ Vh
        tr = np.trace(Tc[:, :, :n], axis1=-2, axis2=-1) / n
        return np.stack([np.sum(sc**2, axis=-1) / n, tr.real, tr.imag], axis=1)

    acc = run_chunks(kernel, samples, rng, workers=workers)
    stab = MCEstimate(float(acc.mean[0]), float(acc.stderr[0]), acc.count, rng.master_seed,
                      "chop stability", {"rho": rho, "p": int(p)})
    mod = float(np.hypot(acc.mean[1], acc.mean[2]))
    mod_se = float(np.hypot(acc.stderr[1], acc.stderr[2]))
    mean_tr = MCEstimate(mod, mod_se, acc.count, rng.master_seed, "|mean normalized trace of chop|",
                         {"rho": rho, "p": int(p)})
    return stab, mean_tr


@dataclass
class CdfTable:
    thresholds: np.ndarray
    boolean: np.ndarray
    mc: np.ndarray
    mc_stderr: np.ndarray
    samples: int
    dkw_eps: float
    extra: dict = field(default_factory=dict)

    @property
    def sup_gap(self) -> float:
        return float(np.max(np.abs(self.mc - self.boolean))) if self.thresholds.size else 0.0

    def to_csv(self) -> str:
        lines = ["t,boolean,mc,mc_stderr"]
        for t, b, g, e in zip(self.thresholds, self.boolean, self.mc, self.mc_stderr):
            lines.append(",".join(repr(float(v)) for v in (t, b, g, e)))
        return "\n".join(lines) + "\n"


def dkw_epsilon(samples: int, alpha: float = 0.05) -> float:
    """Two-sided Dvoretzky-Kiefer-Wolfowitz band half-width."""
    return float(np.sqrt(np.log(2.0 / alpha) / (2.0 * samples)))


def opnorm_cdf(Q: NCPoly, spec, thresholds, samples: int, rng: RngStream, *, alpha: float = 0.05,
               workers: Optional[int] = None) -> CdfTable:
    """Exceedance probabilities ``P(||Q|| > t)``: exact on the cube, Monte Carlo under ``spec``."""
    t = np.asarray(thresholds, dtype=np.float64)
    if t.ndim != 1 or np.any(np.diff(t) < 0):
        raise InvalidInputError("threshold grid must be a sorted 1-D sequence")
    norms = opnorm_boolean(Q)
    boolean = (norms[:, None] > t[None, :]).mean(axis=0)
    specs = _input_specs(Q, spec)

    def kernel(stream, count):
        s = np.linalg.svd(sample_top(Q, specs, stream, count), compute_uv=False)[:, 0]
        return (s[:, None] > t[None, :]).astype(np.float64)

    acc = run_chunks(kernel, samples, rng, chunk=chunk_for(Q), workers=workers)
    return CdfTable(t, boolean, np.atleast_1d(acc.mean), np.atleast_1d(acc.stderr), acc.count,
                    dkw_epsilon(acc.count, alpha))
