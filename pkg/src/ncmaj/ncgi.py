"""Ascent methods for noncommutative Grothendieck objectives.

Conventions
-----------
* The bilinear objective of an ``n**2 x n**2`` tensor ``M`` at unitaries
  ``X, Y`` is ``Re Tr(M (X (x) conj Y))``. For ``M = sum_i M_i (x) conj M_i`` it
  equals ``Re sum_i Tr(M_i X) conj(Tr(M_i Y))``.
* Every block update maximizes a real-linear functional ``Re Tr(X A)`` over
  unitaries (or co-isometries), solved exactly by the polar factor from the SVD
  of ``A``. Objectives are therefore nondecreasing along each run.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .ensembles import complex_gaussian, haar_columns, haar_unitary
from .errors import InvalidInputError, UnsupportedInputError
from .fourier import CubeFunction, popcount, sign_table
from .linalg import (
    Tensor4,
    as_matrix,
    dagger,
    is_psd,
    is_vector_unitary,
    odot,
    partial_trace_1,
    partial_trace_2,
    polar_unitary,
    tensor_from_factors,
)
from .montecarlo import MCEstimate, RngStream, run_chunks

DEFAULT_TOL = 1e-10
DEFAULT_RESTARTS = 20
STALL_SWEEPS = 3
MONOTONE_TOL = 1e-12


class ConvergenceWarning(UserWarning):
    pass


def build_psd_tensor(factors: Sequence, n: Optional[int] = None) -> Tensor4:
    """``M = sum_i M_i (x) conj(M_i)`` keeping the factors."""
    facs = [as_matrix(F, square=True, name="factor") for F in factors]
    if not facs:
        if n is None:
            raise InvalidInputError("an empty factor list needs n")
        return Tensor4(n, tensor_from_factors([], n), ())
    return Tensor4.from_factors(facs, n)


def random_psd_tensor(gen: np.random.Generator, n: int, k: int) -> Tensor4:
    return build_psd_tensor([complex_gaussian(gen, (n, n)) for _ in range(k)])


def _tensor(M) -> Tensor4:
    if isinstance(M, Tensor4):
        return M
    mat = as_matrix(M, square=True, name="tensor")
    n = int(round(np.sqrt(mat.shape[0])))
    if n * n != mat.shape[0]:
        raise InvalidInputError(f"tensor size {mat.shape[0]} is not a perfect square")
    return Tensor4(n, mat)


def bilinear_value(M, X, Y) -> complex:
    """``Tr(M (X (x) conj Y))``."""
    T = _tensor(M)
    return complex(np.trace(T.matrix @ np.kron(X, np.conj(Y))))


def x_coefficient(M: Tensor4, Y) -> np.ndarray:
    """``A`` with ``Tr(M (X (x) conj Y)) = Tr(X A)`` for every ``X``."""
    n = M.n
    return partial_trace_2(M.matrix @ np.kron(np.eye(n), np.conj(Y)))


def y_coefficient(M: Tensor4, X) -> np.ndarray:
    """``A`` with ``Re Tr(M (X (x) conj Y)) = Re Tr(Y A)`` for every ``Y``."""
    n = M.n
    B = partial_trace_1(M.matrix @ np.kron(X, np.eye(n)))
    return np.conj(B)


@dataclass
class AscentResult:
    value: float
    X: np.ndarray
    Y: Optional[np.ndarray] = None
    history: list = field(default_factory=list)
    restart_values: list = field(default_factory=list)
    converged: bool = True
    max_decrease: float = 0.0

    @property
    def monotone(self) -> bool:
        return self.max_decrease <= MONOTONE_TOL


def _max_drop(history: Sequence[float]) -> float:
    h = np.asarray(history, dtype=np.float64)
    if h.size < 2:
        return 0.0
    return float(max(0.0, np.max(h[:-1] - h[1:])))


def _stopped(gains: list, value: float, tol: float) -> bool:
    return len(gains) >= STALL_SWEEPS and all(g < tol * (1.0 + abs(value)) for g in gains[-STALL_SWEEPS:])


def _best_of(results: list[AscentResult]) -> AscentResult:
    best = max(results, key=lambda r: r.value)
    best.restart_values = [r.value for r in results]
    best.converged = all(r.converged for r in results)
    best.max_decrease = max(r.max_decrease for r in results)
    if not best.converged:
        warnings.warn("ascent hit max_iters before converging; returning best iterate", ConvergenceWarning)
    return best


def _unitary_run(M: Tensor4, X: np.ndarray, Y: np.ndarray, max_iters: int, tol: float) -> AscentResult:
    value = bilinear_value(M, X, Y).real
    history = [value]
    gains: list[float] = []
    converged = False
    for _ in range(max_iters):
        start = value
        X = polar_unitary(x_coefficient(M, Y))
        history.append(bilinear_value(M, X, Y).real)
        Y = polar_unitary(y_coefficient(M, X))
        value = bilinear_value(M, X, Y).real
        history.append(value)
        gains.append(value - start)
        if _stopped(gains, value, tol):
            converged = True
            break
    return AscentResult(value, X, Y, history, converged=converged, max_decrease=_max_drop(history))


def opt_unitary_ascent(M, restarts: int = DEFAULT_RESTARTS, max_iters: int = 2000, tol: float = DEFAULT_TOL,
                       rng: Optional[RngStream] = None, init: Optional[Sequence[tuple]] = None) -> AscentResult:
    """Alternating polar ascent on ``Re Tr(M (X (x) conj Y))`` over unitary pairs.

    Restart ``r`` starts from Haar-random ``(X, Y)`` drawn from ``rng.child(r)``;
    ``init`` adds explicit starting pairs. The best value is a certified lower
    bound on the supremum.
    """
    T = _tensor(M)
    rng = rng or RngStream(0)
    starts = list(init or [])
    for r in range(restarts):
        gen = rng.child(r).generator()
        starts.append((haar_unitary(gen, T.n), haar_unitary(gen, T.n)))
    if not starts:
        raise InvalidInputError("need at least one restart")
    return _best_of([_unitary_run(T, X, Y, max_iters, tol) for X, Y in starts])


def symmetric_value(factors: np.ndarray, X) -> float:
    """``sum_i |Tr(M_i X)|^2``."""
    t = np.einsum("kij,ji->k", factors, X)
    return float(np.sum(np.abs(t) ** 2))


def _symmetric_run(F: np.ndarray, X: np.ndarray, max_iters: int, tol: float) -> AscentResult:
    value = symmetric_value(F, X)
    history = [value]
    gains: list[float] = []
    converged = False
    for _ in range(max_iters):
        t = np.einsum("kij,ji->k", F, X)
        # linearization of the convex objective at X
        A = np.einsum("k,kij->ij", np.conj(t), F)
        X = polar_unitary(A)
        new = symmetric_value(F, X)
        history.append(new)
        gains.append(new - value)
        value = new
        if _stopped(gains, value, tol):
            converged = True
            break
    return AscentResult(value, X, X, history, converged=converged, max_decrease=_max_drop(history))


def opt_symmetric_ascent(M: Tensor4, restarts: int = DEFAULT_RESTARTS, max_iters: int = 2000,
                         tol: float = DEFAULT_TOL, rng: Optional[RngStream] = None) -> AscentResult:
    """Maximize ``sum_i |Tr(M_i X)|^2`` over unitaries (``Y`` tied to ``X``)."""
    if not isinstance(M, Tensor4) or M.factors is None:
        raise UnsupportedInputError("symmetric ascent needs the PSD factors of M")
    F = np.stack(M.factors) if M.factors else np.zeros((0, M.n, M.n), dtype=np.complex128)
    rng = rng or RngStream(0)
    runs = []
    for r in range(max(restarts, 1)):
        X0 = haar_unitary(rng.child(r).generator(), M.n)
        runs.append(_symmetric_run(F, X0, max_iters, tol))
    return _best_of(runs)


def check_psd_tensor(M) -> bool:
    """Whether ``M`` is PSD as an ``n**2 x n**2`` matrix after the realignment ``M_ijkl -> (ik),(jl)``.

    ``sum_i F_i (x) conj F_i`` realigns to ``sum_i vec(F_i) vec(F_i)*``, so this is
    exactly the PSD-4-tensor condition.
    """
    T = _tensor(M)
    n = T.n
    R = T.matrix.reshape(n, n, n, n).transpose(0, 2, 1, 3).reshape(n * n, n * n)
    return is_psd(R)


def psd_factors_from_matrix(M, tol: float = 1e-10) -> Tensor4:
    """Recover factors ``M_i`` with ``M = sum_i M_i (x) conj M_i``, rejecting non-PSD tensors."""
    T = _tensor(M)
    n = T.n
    if not check_psd_tensor(T):
        raise InvalidInputError("tensor is not a PSD 4-tensor")
    R = T.matrix.reshape(n, n, n, n).transpose(0, 2, 1, 3).reshape(n * n, n * n)
    w, U = np.linalg.eigh(0.5 * (R + dagger(R)))
    keep = w > tol * max(1.0, float(w.max(initial=0.0)))
    factors = [np.sqrt(lam) * U[:, k].reshape(n, n) for lam, k in zip(w[keep], np.nonzero(keep)[0])]
    return Tensor4(n, T.matrix, tuple(factors))


# brute force reference for n = 2

def su2(alpha, beta, theta) -> np.ndarray:
    """``[[a, -conj b], [b, conj a]]`` with ``a = cos(theta) e^{i alpha}``, ``b = sin(theta) e^{i beta}``."""
    a = np.cos(theta) * np.exp(1j * alpha)
    b = np.sin(theta) * np.exp(1j * beta)
    out = np.empty(np.shape(a) + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = a
    out[..., 0, 1] = -np.conj(b)
    out[..., 1, 0] = b
    out[..., 1, 1] = np.conj(a)
    return out


def brute_force_opt_n2(M, grid: int = 24, polish: int = 8) -> float:
    """Reference value of the unitary bilinear objective for ``n = 2``.

    For fixed ``X`` the best ``Y`` gives the nuclear norm of the ``Y``
    coefficient, and a global phase of ``X`` does not change that norm, so the
    search runs over ``SU(2)`` only: a full grid followed by local polishing of
    the best grid points.
    """
    T = _tensor(M)
    if T.n != 2:
        raise InvalidInputError("the brute-force reference is for n = 2")
    M4 = T.matrix.reshape(2, 2, 2, 2)

    def values(Xs):
        # B = Tr_1[M (X (x) I)]: B_kl = sum_{i,j} M[(i,k),(j,l)] X_ji
        B = np.einsum("ikjl,...ji->...kl", M4, Xs)
        return np.linalg.svd(B, compute_uv=False).sum(axis=-1)

    ang = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    th = np.linspace(0.0, np.pi / 2, grid)
    A, Bt, Th = np.meshgrid(ang, ang, th, indexing="ij")
    vals = values(su2(A, Bt, Th))
    flat = np.argsort(vals, axis=None)[::-1][:polish]
    best = float(vals.max())
    for idx in flat:
        x0 = np.array([A.flat[idx], Bt.flat[idx], Th.flat[idx]])
        res = minimize(lambda z: -values(su2(*z)), x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000})
        best = max(best, float(-res.fun))
    return best


# dictatorship test objective

def embedded_vector_unitary(X, N: int = 1) -> np.ndarray:
    """``V_ij = X_ij e_1`` in ``C^N``; then ``V . V = X (x) conj X``."""
    X = as_matrix(X, square=True, name="X")
    V = np.zeros(X.shape + (N,), dtype=np.complex128)
    V[..., 0] = X
    return V


def random_vector_unitary(gen: np.random.Generator, n: int, N: int) -> np.ndarray:
    """``V_ij = sum_k c_k X^(k)_ij e_k`` with Haar ``X^(k)`` and a random unit vector ``c``."""
    c = complex_gaussian(gen, (N,))
    c /= np.linalg.norm(c)
    Xs = haar_unitary(gen, n, (N,))
    return np.einsum("k,kij->ijk", c, Xs)


def _check_vector_unitary(V) -> np.ndarray:
    arr = np.asarray(V, dtype=np.complex128)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if not is_vector_unitary(arr, 1e-8):
        raise InvalidInputError("V must satisfy V V* = V* V = I")
    return arr


def dict_kernel(M, V) -> np.ndarray:
    """``(V . V) M``."""
    T = _tensor(M)
    return odot(V, V) @ T.matrix


def obj_fourier(f: CubeFunction, h: CubeFunction, M, V) -> complex:
    """``sum_{|S| = 1} Tr((V . V) M (fhat(S) (x) conj hhat(S)))``."""
    Z = dict_kernel(M, _check_vector_unitary(V))
    total = 0j
    for s, c in f.coeffs.items():
        if popcount(s) == 1 and s in h.coeffs:
            total += np.trace(Z @ np.kron(c, np.conj(h.coeffs[s])))
    return complex(total)


def b_operator(h: CubeFunction, M, V) -> CubeFunction:
    """``B(h) = sum_{|S| = 1} Tr_2((V . V) M (I (x) conj hhat(S))) W_S``."""
    Z = dict_kernel(M, _check_vector_unitary(V))
    n = h.n
    eye = np.eye(n)
    coeffs = {s: partial_trace_2(Z @ np.kron(eye, np.conj(c))) for s, c in h.coeffs.items() if popcount(s) == 1}
    return CubeFunction(h.m, n, coeffs)


def obj_enumerated(f: CubeFunction, h: CubeFunction, M, V) -> complex:
    """``2^-m sum_sigma Tr(f(sigma) B(h)(sigma))`` by enumeration."""
    B = b_operator(h, M, V)
    fv, bv = f.values(), B.values()
    return complex(np.einsum("xij,xji->", fv, bv) / fv.shape[0])


def obj_dict_test(f: CubeFunction, h: CubeFunction, M, V, *, check: bool = True, tol: float = 1e-9) -> float:
    """Real dictatorship-test objective, optionally cross-checked by enumeration."""
    val = obj_fourier(f, h, M, V)
    if check:
        other = obj_enumerated(f, h, M, V)
        if abs(val - other) > tol * max(1.0, abs(val)):
            raise ArithmeticError(f"objective routes disagree: {val} vs {other}")
    return float(val.real)


def dictator_value(M, V) -> float:
    """``Re Tr((V . V) M)``."""
    return float(np.trace(dict_kernel(M, _check_vector_unitary(V))).real)


@dataclass
class CtauReport:
    tau: float
    best: float
    best_coeffs: dict
    reference: float
    candidates: int
    dictator_value: Optional[float] = None

    @property
    def ratio(self) -> float:
        return self.best / self.reference if self.reference else float("nan")


def _level1_quadratic(Z: np.ndarray, n: int) -> np.ndarray:
    """Hermitian ``W`` with ``Re Tr(Z (C (x) conj C)) = vec(C)* W vec(C)``."""
    Z4 = Z.reshape(n, n, n, n)  # Z[(j,l),(i,k)] -> Z4[j, l, i, k]
    W = np.einsum("jlik->klij", Z4).reshape(n * n, n * n)
    return 0.5 * (W + dagger(W))


def ctau_search(M, V, tau: float, m: int = 6, restarts: int = 10, iters: int = 50,
                rng: Optional[RngStream] = None, reference: Optional[float] = None) -> CtauReport:
    """Heuristic lower bound on the best objective over level-1 ``f`` with low influence.

    Candidates have ``max_i Inf_i f <= tau`` and ``max_sigma ||f(sigma)|| <= 1``
    (checked by enumeration). Each restart alternates a power step on every
    coefficient, an influence cap, and a rescale into the unit ball.
    """
    if not tau > 0:
        raise InvalidInputError("tau must be positive")
    T = _tensor(M)
    Varr = _check_vector_unitary(V)
    n = T.n
    Z = dict_kernel(T, Varr)
    W = _level1_quadratic(Z, n)
    signs = sign_table(m).astype(np.float64)
    rng = rng or RngStream(0)

    def feasible(C):
        norms = np.linalg.norm(C.reshape(m, -1), axis=1) ** 2
        C = C * np.minimum(1.0, np.sqrt(tau / np.maximum(norms, 1e-300)))[:, None, None]
        vals = np.einsum("xi,iab->xab", signs, C)
        top = np.linalg.svd(vals, compute_uv=False)[:, 0].max()
        return C / max(top, 1.0)

    def value(C):
        v = C.reshape(m, -1)
        return float(np.einsum("ia,ab,ib->", np.conj(v), W, v).real)

    best, best_C, count = -np.inf, None, 0
    dict_val = None
    if tau >= n:
        for i in range(m):
            C = np.zeros((m, n, n), dtype=np.complex128)
            C[i] = np.eye(n)
            count += 1
            v = value(C)
            dict_val = v if dict_val is None else max(dict_val, v)
            if v > best:
                best, best_C = v, C
    for r in range(restarts):
        gen = rng.child(r).generator()
        C = feasible(complex_gaussian(gen, (m, n, n)))
        for _ in range(iters):
            step = (C.reshape(m, -1) @ W.T).reshape(m, n, n)
            C = feasible(C + step / max(np.abs(W).max(), 1e-300))
        count += 1
        v = value(C)
        if v > best:
            best, best_C = v, C
    if reference is None:
        reference = opt_unitary_ascent(T, restarts=5, rng=rng.child(10_000)).value
    coeffs = {1 << i: best_C[i] for i in range(m)}
    return CtauReport(float(tau), float(best), coeffs, float(reference), count, dict_val)


def vector_ncgi_ascent(M, N: int, restarts: int = 5, iters: int = 200, rng: Optional[RngStream] = None,
                       sinkhorn_tol: float = 1e-8) -> AscentResult:
    """Non-certified lower bound for ``sup Re Tr((U . V) M)`` over vector-valued unitaries.

    Alternates a gradient step on one argument with a Sinkhorn-style alternating
    normalization of both Gram matrices to the identity. Only iterates meeting
    the constraints to ``sinkhorn_tol`` are recorded.
    """
    T = _tensor(M)
    n = T.n
    M4 = T.matrix.reshape(n, n, n, n)
    rng = rng or RngStream(0)

    def value(U, V):
        return float(np.trace(odot(U, V) @ T.matrix).real)

    def grad_u(V):
        # d/dU_ija of Tr((U . V) M) = sum_{k,l} conj(V_kla) M[(j,l),(i,k)]
        return np.einsum("kla,jlik->ija", np.conj(V), M4)

    def grad_v(U):
        return np.conj(np.einsum("ija,jlik->kla", U, M4))

    runs = []
    for r in range(restarts):
        gen = rng.child(r).generator()
        U = sinkhorn_normalize(complex_gaussian(gen, (n, n, N)))
        V = sinkhorn_normalize(complex_gaussian(gen, (n, n, N)))
        best, bestU = -np.inf, U
        history = []
        for _ in range(iters):
            U = sinkhorn_normalize(U + np.conj(grad_u(V)) / max(1.0, np.abs(T.matrix).max()))
            V = sinkhorn_normalize(V + np.conj(grad_v(U)) / max(1.0, np.abs(T.matrix).max()))
            if is_vector_unitary(U, sinkhorn_tol) and is_vector_unitary(V, sinkhorn_tol):
                val = value(U, V)
                history.append(val)
                if val > best:
                    best, bestU = val, U
        runs.append(AscentResult(best, bestU, None, history, converged=bool(history)))
    best = max(runs, key=lambda r: r.value)
    best.restart_values = [r.value for r in runs]
    return best


def sinkhorn_normalize(U: np.ndarray, tol: float = 1e-12, max_iters: int = 500) -> np.ndarray:
    """Alternately whiten ``U U*`` and ``U* U`` until both are the identity."""
    n, _, N = U.shape
    for _ in range(max_iters):
        A = U.reshape(n, n * N)  # rows i, columns (k, a)
        U = (_inv_sqrt(A @ dagger(A)) @ A).reshape(n, n, N)
        C = U.transpose(1, 0, 2).reshape(n, n * N)  # rows i, columns (k, a) of U_kia
        U = (_inv_sqrt(C @ dagger(C)) @ C).reshape(n, n, N).transpose(1, 0, 2)
        if is_vector_unitary(U, tol):
            break
    return U


def _inv_sqrt(P: np.ndarray) -> np.ndarray:
    w, Q = np.linalg.eigh(0.5 * (P + dagger(P)))
    return (Q / np.sqrt(np.maximum(w, 1e-300))) @ dagger(Q)


# PSD block variant

@dataclass(frozen=True)
class PsdBlockInstance:
    n: int
    d: int
    M: np.ndarray

    def __post_init__(self):
        mat = as_matrix(self.M, square=True, name="M")
        if mat.shape[0] != self.n * self.d:
            raise InvalidInputError(f"M must be {self.n * self.d}x{self.n * self.d}, got {mat.shape}")
        if not is_psd(mat, 1e-8):
            raise InvalidInputError("M must be Hermitian positive semidefinite")
        mat = 0.5 * (mat + dagger(mat))
        mat.setflags(write=False)
        object.__setattr__(self, "M", mat)

    def block(self, i: int, j: int) -> np.ndarray:
        d = self.d
        return self.M[i * d:(i + 1) * d, j * d:(j + 1) * d]

    def blocks_t(self) -> np.ndarray:
        """``(M_ij)^T`` as an ``(n, n, d, d)`` array."""
        n, d = self.n, self.d
        return self.M.reshape(n, d, n, d).transpose(0, 2, 3, 1)

    def objective(self, Vs: Sequence[np.ndarray]) -> float:
        """``sum_ij Tr(M_ij^T V_i V_j*)``."""
        Bt = self.blocks_t()
        V = np.stack(Vs)
        G = np.einsum("iak,jbk->ijab", V, np.conj(V))
        return float(np.einsum("ijab,ijba->", Bt, G).real)

    def to_json(self) -> dict:
        from .io import matrix_to_json

        return {"n": self.n, "d": self.d, "M": matrix_to_json(self.M)}

    @classmethod
    def from_json(cls, obj) -> "PsdBlockInstance":
        from .io import matrix_from_json

        return cls(int(obj["n"]), int(obj["d"]), matrix_from_json(obj["M"]))


def random_psd_block(gen: np.random.Generator, n: int, d: int, rank: Optional[int] = None) -> PsdBlockInstance:
    r = rank or n * d
    G = complex_gaussian(gen, (n * d, r))
    return PsdBlockInstance(n, d, G @ dagger(G))


def _block_run(inst: PsdBlockInstance, Vs: list, max_iters: int, tol: float):
    n = inst.n
    Bt = inst.blocks_t()
    value = inst.objective(Vs)
    history = [value]
    gains: list[float] = []
    converged = False
    for _ in range(max_iters):
        start = value
        for i in range(n):
            if n > 1:
                Vs[i] = polar_unitary(sum(dagger(Vs[j]) @ Bt[i, j] for j in range(n) if j != i))
            value = inst.objective(Vs)
            history.append(value)
        gains.append(value - start)
        if _stopped(gains, value, tol):
            converged = True
            break
    return AscentResult(value, np.stack(Vs), None, history, converged=converged, max_decrease=_max_drop(history))


def random_coisometry(gen: np.random.Generator, d: int, k: int) -> np.ndarray:
    """A ``d x k`` matrix with orthonormal rows drawn from the Haar measure."""
    return dagger(haar_columns(gen, k, d))


def psd_variant_solve(inst: PsdBlockInstance, constrained: bool = True, restarts: int = DEFAULT_RESTARTS,
                      tol: float = DEFAULT_TOL, rng: Optional[RngStream] = None, max_iters: int = 2000,
                      warm_start: Optional[Sequence[np.ndarray]] = None) -> AscentResult:
    """Block-coordinate ascent on ``sum_ij Tr(M_ij^T V_i V_j*)``.

    Constrained: ``V_i`` unitary ``d x d``. Relaxed: ``V_i`` are ``d x dn``
    co-isometries. The update for ``V_i`` maximizes ``Re Tr(V_i B_i)`` with
    ``B_i = sum_{j != i} V_j* M_ij^T``; the diagonal terms are constant.
    The relaxed solve also starts from ``warm_start`` when given (for example the
    constrained optimum zero-padded to ``d x dn``).
    """
    rng = rng or RngStream(0)
    n, d = inst.n, inst.d
    k = d if constrained else d * n
    starts = [] if warm_start is None else [[np.array(V, dtype=np.complex128) for V in warm_start]]
    for r in range(restarts):
        gen = rng.child(r).generator()
        starts.append([random_coisometry(gen, d, k) for _ in range(n)])
    for s in starts:
        for V in s:
            if V.shape != (d, k):
                raise InvalidInputError(f"starting blocks must be {d}x{k}")
    return _best_of([_block_run(inst, list(s), max_iters, tol) for s in starts])


def pad_blocks(Xs: Sequence[np.ndarray], width: int) -> list[np.ndarray]:
    out = []
    for X in Xs:
        V = np.zeros((X.shape[0], width), dtype=np.complex128)
        V[:, : X.shape[1]] = X
        out.append(V)
    return out


def solve_both(inst: PsdBlockInstance, restarts: int = DEFAULT_RESTARTS, rng: Optional[RngStream] = None,
               tol: float = DEFAULT_TOL) -> tuple[AscentResult, AscentResult]:
    """Constrained and relaxed solves on matched streams; the relaxed run is warm-started."""
    rng = rng or RngStream(0)
    con = psd_variant_solve(inst, True, restarts, tol, rng)
    rel = psd_variant_solve(inst, False, restarts, tol, rng,
                            warm_start=pad_blocks(list(con.X), inst.d * inst.n))
    return con, rel


def polar_factor(A: np.ndarray) -> np.ndarray:
    """Unitary ``U W*`` from ``A = U S W*``."""
    U, _, Wh = np.linalg.svd(A)
    return U @ Wh


def round_relaxation(Vs: Sequence[np.ndarray], rng: RngStream, *, max_retries: int = 10,
                     cond_tol: float = 1e-12) -> list[np.ndarray]:
    """``X_i = polar(V_i R)`` with one shared complex Gaussian ``R`` of shape ``dn x d``."""
    Vs = [np.asarray(V, dtype=np.complex128) for V in Vs]
    d, k = Vs[0].shape
    for attempt in range(max_retries):
        R = complex_gaussian(rng.generator(attempt), (k, d))
        prods = [V @ R for V in Vs]
        if all(np.linalg.svd(P, compute_uv=False)[-1] > cond_tol * max(1.0, np.abs(P).max()) for P in prods):
            return [polar_factor(P) for P in prods]
    raise ArithmeticError("rounding kept producing rank-deficient blocks")


def rounding_stats(inst: PsdBlockInstance, Vs: Sequence[np.ndarray], draws: int, rng: RngStream) -> MCEstimate:
    """Objective of rounded tuples over ``draws`` independent Gaussian draws."""

    def kernel(stream, count):
        return np.array([inst.objective(round_relaxation(Vs, stream.child(j))) for j in range(count)])

    acc = run_chunks(kernel, draws, rng, chunk=50, workers=1)
    return MCEstimate(float(acc.mean), float(acc.stderr), acc.count, rng.master_seed, "rounded objective",
                      {"n": inst.n, "d": inst.d})


def estimate_Kd(d: int, samples: int, rng: RngStream, *, scale: float = 1.0,
                workers: Optional[int] = None) -> MCEstimate:
    """``K(d) = (E (1/d) sum_i s_i(G))^2`` for ``G`` with i.i.d. complex entries of variance ``1/d``.

    Returns the squared sample mean with a delta-method stderr ``2 |mean| se``.
    """
    if int(d) < 1:
        raise InvalidInputError("d must be a positive integer")
    d = int(d)
    chunk = max(1, min(100_000, 2_000_000 // (d * d)))

    def kernel(stream, count):
        G = complex_gaussian(stream.generator(), (count, d, d)) * (scale / np.sqrt(d))
        if d == 1:
            return np.abs(G[:, 0, 0])
        return np.linalg.svd(G, compute_uv=False).mean(axis=-1)

    acc = run_chunks(kernel, samples, rng, chunk=chunk, workers=workers)
    mean = float(acc.mean)
    return MCEstimate(mean**2, 2.0 * abs(mean) * float(acc.stderr), acc.count, rng.master_seed, f"K({d})",
                      {"d": d, "scale": scale, "root_mean": mean, "root_stderr": float(acc.stderr)})
