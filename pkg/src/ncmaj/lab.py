"""Named experiments with pass/fail verdicts and JSON reports.

Verdict rules: exact claims are hard checks; inequalities with stated
constants are checked with a ``3 sigma`` Monte Carlo allowance; claims with
unquantified constants are recorded as report-only entries.
"""
from __future__ import annotations

import functools
import inspect
import math
import time
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Callable, Optional

import numpy as np

from . import families
from .ensembles import EnsembleSpec, check_moment_bound, haar_block_damping_check
from .errors import InvalidInputError
from .estimators import (
    chop_distance_paired,
    chop_stability_mc,
    noise_stability_exact,
    opnorm_cdf,
    sample_top,
    trace_moment_boolean_exact,
    trace_moment_mc,
    trace_power,
)
from .fourier import dictator
from .io import dumps
from .linalg import Tensor4
from .montecarlo import MCEstimate, RngStream, mc_estimates
from .ncgi import (
    PsdBlockInstance,
    brute_force_opt_n2,
    ctau_search,
    dictator_value,
    embedded_vector_unitary,
    estimate_Kd,
    obj_enumerated,
    obj_fourier,
    opt_symmetric_ascent,
    opt_unitary_ascent,
    psd_factors_from_matrix,
    random_psd_block,
    random_psd_tensor,
    rounding_stats,
    solve_both,
)
from .ncpoly import NCPoly, embed, random_ncpoly


def _clean(x):
    """Convert numpy scalars and arrays into plain JSON values."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    seed: int
    results: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict, repr=False)  # name -> CSV text, kept out of JSON

    def add(self, label: str, value, provenance: str = "exact", **extra) -> None:
        self.results.append(_clean({"label": label, "value": value, "provenance": provenance, **extra}))

    def add_estimate(self, label: str, est: MCEstimate, provenance: str = "monte-carlo", **extra) -> None:
        self.results.append(_clean({
            "label": label, "mean": est.mean, "stderr": est.stderr, "samples": est.samples,
            "provenance": provenance, **extra,
        }))

    def check(self, name: str, passed: bool, detail: str = "", hard: bool = True) -> bool:
        self.checks.append({"name": name, "passed": bool(passed), "hard": hard, "detail": detail})
        return bool(passed)

    @property
    def verdict(self) -> str:
        hard = [c for c in self.checks if c["hard"]]
        if any(not c["passed"] for c in hard):
            return "fail"
        return "pass" if hard else "report-only"

    def result(self, label: str) -> dict:
        for r in self.results:
            if r["label"] == label:
                return r
        raise KeyError(label)

    def failed_checks(self) -> list:
        return [c for c in self.checks if c["hard"] and not c["passed"]]

    def results_block(self) -> dict:
        """Everything except wall-clock timings."""
        return {
            "experiment": self.experiment,
            "config": _clean(self.config),
            "seed": int(self.seed),
            "results": self.results,
            "checks": self.checks,
            "verdict": self.verdict,
        }

    def to_json(self) -> dict:
        out = self.results_block()
        out["timings"] = _clean(self.timings)
        return out

    def dumps(self, with_timings: bool = True) -> str:
        return dumps(self.to_json() if with_timings else self.results_block())

    def text(self) -> str:
        lines = [f"experiment: {self.experiment}", f"seed: {self.seed}", f"verdict: {self.verdict}"]
        for r in self.results:
            if "mean" in r:
                lines.append(f"  {r['label']}: {r['mean']:.6g} +/- {r['stderr']:.2g} [{r['provenance']}]")
            else:
                v = r["value"]
                v = f"{v:.12g}" if isinstance(v, float) else v
                lines.append(f"  {r['label']}: {v} [{r['provenance']}]")
        for c in self.checks:
            tag = "PASS" if c["passed"] else "FAIL"
            kind = "" if c["hard"] else " (report)"
            lines.append(f"  [{tag}]{kind} {c['name']}: {c['detail']}")
        return "\n".join(lines)


def _timed(fn: Callable[..., ExperimentReport]):
    @functools.wraps(fn)
    def wrapper(**kw):
        t0 = time.perf_counter()
        rep = fn(**kw)
        rep.timings = {"wall_seconds": time.perf_counter() - t0, "workers": kw.get("workers")}
        return rep

    return wrapper


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidInputError(msg)


def frame(n: int) -> EnsembleSpec:
    return EnsembleSpec.gaussian_frame(n=n, basis="standard")


def factorial_constant(K: int) -> float:
    """``||E (G G*)^K|| <= K!`` for Gaussian frame ensembles."""
    return float(math.factorial(K))


# counterexamples

@_timed
def run_counterexample_wigner(*, m: int = 5, n: int = 200, samples: int = 200, tol: float = 0.1, seed: int = 0,
                              workers: Optional[int] = None) -> ExperimentReport:
    """Averaged sum of m variables: exact cube moment ``3 - 2/m`` vs Wigner inputs near 2."""
    _require(m >= 1, "m must be positive")
    _require(n >= 50, "the Wigner side needs n >= 50")
    _require(samples >= 2, "need at least two samples")
    rep = ExperimentReport("counterexample-wigner", dict(m=m, n=n, samples=samples, tol=tol), seed)
    exact = trace_moment_boolean_exact(families.averaged_sum(m, 1), 2)
    rep.add("boolean fourth moment", exact, "exact")
    rep.add("3 - 2/m", 3 - 2 / m, "closed form")
    rep.check("boolean equals 3 - 2/m", abs(exact - (3 - 2 / m)) <= 1e-12, f"|diff| = {abs(exact - (3 - 2 / m)):.2e}")
    est = trace_moment_mc(families.averaged_sum(m, n), EnsembleSpec.gue(n), 2, samples, RngStream(seed, 1),
                          workers=workers)
    rep.add_estimate("wigner fourth moment", est)
    rep.check("wigner within tol of 2", abs(est.mean - 2.0) <= tol, f"{est.mean:.4f} vs 2 +/- {tol}")
    return rep


def cyclic_matrices(n: int) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
    """Integer ``A`` (corner unit), cyclic shift ``B`` and coefficients ``C_i = B^i A B^-i``."""
    A = np.zeros((n, n), dtype=np.int64)
    A[0, 0] = 1
    B = np.roll(np.eye(n, dtype=np.int64), 1, axis=0)  # B e_j = e_{j+1}
    Bi = np.linalg.matrix_power
    C = [Bi(B, i) @ A @ Bi(B.T, i) for i in range(n)]
    return A, B, C


def integer_boolean_trace4(C: list[np.ndarray]) -> tuple[int, int]:
    """Exact ``sum_sigma Tr|sum_i sigma_i C_i|^4`` and the pattern count ``2^m``, in integers."""
    m = len(C)
    total = 0
    for signs in iproduct((1, -1), repeat=m):
        Q = sum(s * c for s, c in zip(signs, C))
        P = Q @ Q.T
        total += int(np.sum(P * P.T))
    return total, 2**m


@_timed
def run_counterexample_cyclic(*, n: int = 8, samples: int = 10_000, seed: int = 0,
                              workers: Optional[int] = None) -> ExperimentReport:
    """Coefficients with pairwise-vanishing products: cube moment ``n`` vs Haar moment ``2n - 1``."""
    _require(2 <= n <= 16, "n must lie in [2, 16]")
    rep = ExperimentReport("counterexample-cyclic", dict(n=n, samples=samples), seed)
    A, B, C = cyclic_matrices(n)
    products_vanish = all(not np.any(C[j] @ C[k]) for j in range(n) for k in range(n) if j != k)
    unit_traces = all(int(np.trace(c)) == 1 for c in C)
    rep.check("C_j C_k = 0 for j != k", products_vanish, "integer arithmetic")
    rep.check("Tr C_j = 1", unit_traces, "integer arithmetic")
    literal = [np.linalg.matrix_power(B, i) @ A for i in range(n)]
    bad = sum(1 for j in range(n) for k in range(n) if j != k and np.any(literal[j] @ literal[k]))
    rep.add("nonvanishing products among B^i A (j != k)", bad, "exact")
    total, count = integer_boolean_trace4(C)
    rep.add("boolean Tr fourth moment (numerator / 2^n)", [total, count], "exact integer")
    rep.check("boolean side equals n exactly", total == n * count, f"{total}/{count}")
    lit_total, _ = integer_boolean_trace4(literal)
    rep.add("boolean Tr fourth moment with B^i A coefficients", lit_total / count, "exact integer")
    Q = NCPoly(n, n, {1 << i: C[i].astype(np.complex128) for i in range(n)})
    est = trace_moment_mc(Q, EnsembleSpec.haar(n), 2, samples, RngStream(seed, 1), normalize=False, workers=workers)
    rep.add_estimate("haar Tr fourth moment", est)
    z = (est.mean - (2 * n - 1)) / est.stderr if est.stderr else 0.0
    rep.check("haar within 3 stderr of 2n - 1", abs(z) <= 3, f"{est.mean:.4f} vs {2 * n - 1}, z = {z:.2f}")
    return rep


# hypercontractivity

def hyper_instances(count: int, m_max: int, d_max: int, n: int, gen: np.random.Generator) -> list[NCPoly]:
    out = []
    for j in range(count):
        d = 1 + j % d_max
        m = int(gen.integers(max(d, 2), m_max + 1))
        out.append(random_ncpoly(gen, m, n, d))
    return out


@_timed
def run_hyper(*, instances: int = 50, m: int = 8, d: int = 3, n: int = 2, Ks=(2, 3), samples: int = 4000,
              mixed: int = -1, normalize: bool = False, seed: int = 0,
              workers: Optional[int] = None) -> ExperimentReport:
    """``(2K, 2)`` hypercontractivity on the cube (exact) and under frame inputs (Monte Carlo).

    ``mixed = k >= 0`` feeds frame matrices to the first ``k`` variables and
    signs to the rest.
    """
    _require(1 <= d <= 3 and m <= 8 and instances >= 1, "need d in 1..3, m <= 8, instances >= 1")
    Ks = tuple(int(k) for k in (Ks if isinstance(Ks, (list, tuple)) else [Ks]))
    rep = ExperimentReport("hyper", dict(instances=instances, m=m, d=d, n=n, Ks=list(Ks), samples=samples,
                                         mixed=mixed, normalize=normalize), seed)
    root = RngStream(seed)
    polys = hyper_instances(instances, m, d, n, root.child(0).generator())
    bool_viol = mc_viol = 0
    worst_ratio = 0.0
    for j, Q in enumerate(polys):
        deg = Q.degree
        second = trace_moment_boolean_exact(Q, 1, normalize=normalize)
        if mixed >= 0:
            specs = [frame(n) if i < mixed else EnsembleSpec.rademacher(n) for i in range(Q.m)]
        else:
            specs = frame(n)
        for K in Ks:
            lhs = trace_moment_boolean_exact(Q, K, normalize=normalize)
            bound = (2 * K - 1) ** (deg * K) * second**K
            worst_ratio = max(worst_ratio, lhs / bound)
            bool_viol += lhs > bound
            est = trace_moment_mc(Q, specs, K, samples, root.child(1, j, K), normalize=normalize, workers=workers)
            mc_bound = (2 * K - 1) ** (deg * K) * factorial_constant(K) ** deg * second**K
            mc_viol += est.mean > mc_bound + 3 * est.stderr
    rep.add("instances", len(polys), "exact")
    rep.add("largest cube moment / bound", worst_ratio, "exact")
    rep.add("cube violations", bool_viol, "exact")
    rep.add("frame violations", mc_viol, "monte-carlo")
    rep.check("cube hypercontractivity: zero violations", bool_viol == 0, f"{bool_viol} violations")
    rep.check("frame hypercontractivity: zero violations", mc_viol == 0, f"{mc_viol} violations (3 sigma)")
    return rep


# majorization

def majorization_slack(K: int, d: int, n: int, tau: float, cK: float) -> float:
    """Influence-controlled slack: the fourth-moment form for ``K = 2``, the general form otherwise."""
    if K == 2:
        return 8 * (8 * cK) ** (4 * d) * n**4 * tau**0.25
    return K**3 * (2 * K - 1) ** (d * K) * cK**d * n ** (2 * K) * tau**0.25


@_timed
def run_majorization_sweep(*, family: str = "spread", n: int = 2, m: int = 16, ps=(64, 128, 256), Ks=(2,),
                           samples: int = 10_000, seed: int = 0, workers: Optional[int] = None) -> ExperimentReport:
    """Moment majorization under embed-and-rotate frame inputs, with a paired sweep over ``p``.

    All ``p`` share the inner frame draws, so consecutive residual differences
    come from a paired design.
    """
    ps = [int(p) for p in (ps if isinstance(ps, (list, tuple)) else [ps])]
    Ks = [int(k) for k in (Ks if isinstance(Ks, (list, tuple)) else [Ks])]
    _require(all(p >= n for p in ps) and ps == sorted(ps), "p grid must be increasing with p >= n")
    _require(m <= 20, "the exact cube side needs m <= 20")
    rep = ExperimentReport("majorize", dict(family=family, n=n, m=m, ps=ps, Ks=Ks, samples=samples), seed)
    root = RngStream(seed)
    member = families.family(family, m, n, root.child(0).generator())
    Q = member.poly
    tau, deg = member.tau, member.degree
    rep.add("tau", tau, "exact")
    rep.add("degree", deg, "exact")
    top = families.max_opnorm(member.f)
    rep.add("max ||f(sigma)||", top, "exact")
    rep.check("unit-ball precondition", top <= 1 + 1e-10, f"max norm {top:.4f}", hard=False)
    polys = [embed(Q, p) for p in ps]
    specs = [EnsembleSpec.embed_rotate(frame(n), p) for p in ps]
    for K in Ks:
        rhs = trace_moment_boolean_exact(Q, K)
        slack = majorization_slack(K, deg, n, tau, factorial_constant(K))
        rep.add(f"K={K} cube moment", rhs, "exact")
        rep.add(f"K={K} slack", slack, "closed form")

        def kernel(stream, count, K=K):
            cols = np.stack([trace_power(sample_top(P, [s] * m, stream, count), K) / n
                             for P, s in zip(polys, specs)], axis=1)
            return np.concatenate([cols, cols[:, 1:] - cols[:, :-1]], axis=1)

        labels = [f"K={K} lhs p={p}" for p in ps] + [f"K={K} diff p={b} vs p={a}" for a, b in zip(ps, ps[1:])]
        ests = mc_estimates(kernel, samples, root.child(1, K), labels, workers=workers)
        for p, est in zip(ps, ests[: len(ps)]):
            rep.add_estimate(f"K={K} lhs p={p}", est, residual=est.mean - rhs)
            rep.check(f"K={K} p={p}: lhs <= rhs + slack + 3 sigma", est.mean <= rhs + slack + 3 * est.stderr,
                      f"{est.mean:.5f} <= {rhs:.5f} + {slack:.3g}")
        for (a, b), est in zip(zip(ps, ps[1:]), ests[len(ps):]):
            rep.add_estimate(f"K={K} residual change p={a}->{b}", est, provenance="monte-carlo (paired)")
            z = est.mean / est.stderr if est.stderr else 0.0
            rep.check(f"K={K} residual non-increasing p={a}->{b}", est.mean <= 0.0,
                      f"change {est.mean:+.5f} (z = {z:.1f})")
    return rep


# smoothing and chop

def chop_bound(n: int, tau: float, rho: float, c2: float, c3: float) -> float:
    return 10 * math.sqrt(n) * tau ** ((1 - rho) / (30 * c2 * c3))


@_timed
def run_chop(*, rho: float = 0.9, ps=(64, 256), n: int = 2, m: int = 8, samples: int = 10_000, seed: int = 0,
             workers: Optional[int] = None) -> ExperimentReport:
    """Distance between ``T_rho Q^iota`` and its clipped version, for a dictator and a spread family."""
    ps = [int(p) for p in (ps if isinstance(ps, (list, tuple)) else [ps])]
    _require(0 < rho < 1, "rho must lie in (0, 1)")
    _require(all(p >= n for p in ps) and ps == sorted(ps) and len(ps) >= 2, "need an increasing p grid, p >= n")
    rep = ExperimentReport("chop", dict(rho=rho, ps=ps, n=n, m=m, samples=samples), seed)
    root = RngStream(seed)
    c2, c3 = factorial_constant(2), factorial_constant(3)

    f_dict = dictator(m, 0, n)
    ests, diffs = chop_distance_paired(f_dict, rho, ps, samples, root.child(1), workers=workers)
    for p, est in zip(ps, ests):
        rep.add_estimate(f"dictator chop distance p={p}", est)
    rep.check("dictator: estimate positive", all(e.mean > 0 for e in ests), ", ".join(f"{e.mean:.6f}" for e in ests))
    for (a, b), dd in zip(zip(ps, ps[1:]), diffs):
        rep.add_estimate(f"dictator change p={a}->{b}", dd, provenance="monte-carlo (paired)")
        noise = 1e-10 * max(abs(ests[0].mean), 1e-300)
        rep.check(f"dictator: decreasing p={a}->{b}", dd.mean < -max(noise, 3 * dd.stderr),
                  f"paired change {dd.mean:+.3e} +/- {dd.stderr:.1e}")

    member = families.spread_level1(m, n, root.child(0).generator(), normalized=True)
    tau = member.tau
    bound = chop_bound(n, tau, rho, c2, c3)
    rep.add("spread (unit ball) tau", tau, "exact")
    rep.add("spread bound", bound, "closed form")
    sests, _ = chop_distance_paired(member.f, rho, ps, samples, root.child(2), workers=workers)
    for p, est in zip(ps, sests):
        rep.add_estimate(f"spread chop distance p={p}", est)
        rep.check(f"spread p={p}: below bound + 3 sigma", est.mean <= bound + 3 * est.stderr,
                  f"{est.mean:.3e} <= {bound:.4f}")
    return rep


@_timed
def run_noise_stability(*, family: str = "majority", m: int = 7, n: int = 1, rho: float = 0.5, p: int = 64,
                        samples: int = 10_000, seed: int = 0, workers: Optional[int] = None) -> ExperimentReport:
    """Exact cube noise stability vs the clipped Gaussian-matrix counterpart (report only)."""
    _require(0 <= rho < 1, "rho must lie in [0, 1)")
    root = RngStream(seed)
    member = families.family(family, m, n, root.child(0).generator())
    f = member.f
    _require(not np.any(np.abs(f.coefficient(0)) > 1e-12), "need E_b f = 0 (zero constant coefficient)")
    _require(families.max_opnorm(f) <= 1 + 1e-10, "need ||f(sigma)|| <= 1 for all sigma")
    _require(p >= f.n, "need p >= n")
    rep = ExperimentReport("noise-stability", dict(family=family, m=m, n=f.n, rho=rho, p=p, samples=samples), seed)
    lhs = noise_stability_exact(f, rho)
    rep.add("cube noise stability", lhs, "exact")
    stab, tr = chop_stability_mc(f, rho, p, samples, root.child(1), workers=workers)
    rep.add_estimate("clipped gaussian stability", stab)
    rep.add_estimate("|normalized trace of clipped|", tr)
    delta = 20 * math.sqrt(f.n) * member.tau ** ((1 - rho) / (30 * factorial_constant(2) * factorial_constant(3)))
    rep.add("delta (influence term)", delta, "closed form")
    if f.n == 1:
        rep.add("(2/pi) arcsin(rho)", 2 / math.pi * math.asin(rho), "reference")
        rep.add("(2/pi) arcsin(rho^2)", 2 / math.pi * math.asin(rho**2), "reference")
    rep.check("cube stability <= clipped stability + 3 sigma", lhs <= stab.mean + 3 * stab.stderr,
              f"{lhs:.4f} vs {stab.mean:.4f}", hard=False)
    rep.check("|trace of clipped| <= delta", tr.mean <= delta + 3 * tr.stderr, f"{tr.mean:.4f} vs {delta:.3f}",
              hard=False)
    return rep


@_timed
def run_anticoncentration(*, family: str = "random", m: int = 6, n: int = 2, d: int = 2, p: int = 32,
                          samples: int = 4000, tmax: float = 2.0, points: int = 41, compare: bool = True,
                          seed: int = 0, workers: Optional[int] = None) -> ExperimentReport:
    """Operator-norm exceedance curves on the cube and under embed-and-rotate inputs (report only)."""
    _require(p >= n and points >= 2, "need p >= n and at least two grid points")
    root = RngStream(seed)
    grid = np.linspace(0.0, tmax, points)
    rep = ExperimentReport("anticoncentration", dict(family=family, m=m, n=n, d=d, p=p, samples=samples,
                                                     tmax=tmax, points=points, compare=compare), seed)

    def one(tag, member, stream):
        Q = member.poly
        second = trace_moment_boolean_exact(Q, 1)
        _require(second <= 1 + 1e-12, f"normalized cube second moment {second:.4f} exceeds 1")
        table = opnorm_cdf(embed(Q, p), EnsembleSpec.embed_rotate(frame(n), p), grid, samples, stream,
                           workers=workers)
        rep.add(f"{tag} tau", member.tau, "exact")
        rep.add(f"{tag} degree", member.degree, "exact")
        rep.add(f"{tag} variance", float(sum(np.vdot(c, c).real for s, c in Q.coeffs.items() if s)), "exact")
        rep.add(f"{tag} cube exceedance", table.boolean, "exact")
        rep.add(f"{tag} matrix exceedance", table.mc, "monte-carlo", stderr=table.mc_stderr)
        rep.add(f"{tag} sup gap", table.sup_gap, "monte-carlo", dkw_eps=table.dkw_eps)
        rep.tables[f"{tag}-cdf"] = table.to_csv()
        return table

    base = families.family(family, m, n, root.child(0).generator(), d=d)
    t1 = one("base", base, root.child(1))
    rep.check("sup gap recorded", True, f"{t1.sup_gap:.4f} (DKW eps {t1.dkw_eps:.4f})", hard=False)
    if compare:
        spread = families.family(family, 2 * m, n, root.child(2).generator(), d=d) if 2 * m <= 16 else None
        if spread is not None:
            t2 = one("spread", spread, root.child(3))
            rep.check("gap shrinks when tau decreases", t2.sup_gap <= t1.sup_gap,
                      f"{t1.sup_gap:.4f} -> {t2.sup_gap:.4f} (tau {base.tau:.3g} -> {spread.tau:.3g})", hard=False)
    return rep


# Grothendieck optimization

@_timed
def run_ncgi_opt(*, n: int = 2, factors: int = 2, instances: int = 5, restarts: int = 20, brute_force: bool = True,
                 instance: Optional[dict] = None, seed: int = 0, workers: Optional[int] = None) -> ExperimentReport:
    """Free vs symmetric ascent on PSD tensors, with a grid oracle at ``n = 2``."""
    _require(1 <= n <= 6 and instances >= 1 and restarts >= 1, "need 1 <= n <= 6 and positive counts")
    rep = ExperimentReport("ncgi-opt", dict(n=n, factors=factors, instances=instances, restarts=restarts,
                                            brute_force=brute_force, instance=instance), seed)
    root = RngStream(seed)
    gen = root.child(0).generator()
    tensors = [_tensor_from_config(instance)] if instance else [random_psd_tensor(gen, n, factors)
                                                                  for _ in range(instances)]
    worst_gap = worst_drop = worst_bf = 0.0
    for j, M in enumerate(tensors):
        free = opt_unitary_ascent(M, restarts, rng=root.child(1, j))
        sym = opt_symmetric_ascent(M, restarts, rng=root.child(2, j))
        gap = abs(free.value - sym.value) / max(1.0, abs(sym.value))
        worst_gap = max(worst_gap, gap)
        worst_drop = max(worst_drop, free.max_decrease, sym.max_decrease)
        rep.add(f"instance {j} free value", free.value, "ascent lower bound")
        rep.add(f"instance {j} symmetric value", sym.value, "ascent lower bound")
        if brute_force and M.n == 2:
            bf = brute_force_opt_n2(M)
            worst_bf = max(worst_bf, abs(bf - free.value))
            rep.add(f"instance {j} grid oracle", bf, "grid search")
    rep.check("free and symmetric agree within 1e-6", worst_gap <= 1e-6, f"worst relative gap {worst_gap:.2e}")
    rep.check("ascent is monotone (1e-12)", worst_drop <= 1e-12, f"largest decrease {worst_drop:.2e}")
    if brute_force and tensors[0].n == 2:
        rep.check("grid oracle within 1e-3", worst_bf <= 1e-3, f"worst |oracle - ascent| {worst_bf:.2e}")
    return rep


def _tensor_from_config(obj: dict) -> Tensor4:
    from .io import tensor_from_json

    if "factors" in obj or "matrix" in obj:
        T = tensor_from_json(obj)
        return T if T.factors is not None else psd_factors_from_matrix(T)
    raise InvalidInputError("instance needs 'matrix' or 'factors'")


@_timed
def run_psd_variant(*, instances: int = 20, n_max: int = 4, d_max: int = 3, restarts: int = 20, draws: int = 100,
                    instance: Optional[dict] = None, seed: int = 0,
                    workers: Optional[int] = None) -> ExperimentReport:
    """Constrained, relaxed and rounded values on PSD block instances."""
    _require(n_max >= 2 and d_max >= 1 and instances >= 1 and draws >= 2, "need n_max >= 2, d_max >= 1, draws >= 2")
    rep = ExperimentReport("psd-variant", dict(instances=instances, n_max=n_max, d_max=d_max, restarts=restarts,
                                               draws=draws, instance=instance), seed)
    root = RngStream(seed)
    gen = root.child(0).generator()
    if instance:
        insts = [PsdBlockInstance.from_json(instance)]
    else:
        insts = [random_psd_block(gen, 2 + k % (n_max - 1), 1 + k % d_max) for k in range(instances)]
    dom = order = mono = 0
    ratios = []
    for k, inst in enumerate(insts):
        con, rel = solve_both(inst, restarts, root.child(1, k))
        rd = rounding_stats(inst, list(rel.X), draws, root.child(2, k))
        tol = 1e-9 * max(1.0, abs(con.value))
        dom += rel.value < con.value - tol
        order += con.value < rd.mean - tol
        mono += max(con.max_decrease, rel.max_decrease) > 1e-12 * max(1.0, abs(rel.value))
        ratios.append(rel.value / con.value if con.value else float("nan"))
        rep.add(f"instance {k} (n={inst.n}, d={inst.d})",
                {"constrained": con.value, "relaxed": rel.value, "rounded_mean": rd.mean,
                 "rounded_stderr": rd.stderr}, "ascent / monte-carlo")
    rep.add("relaxed / constrained ratios", ratios, "derived")
    rep.check("relaxed >= constrained", dom == 0, f"{dom} violations")
    rep.check("constrained >= mean rounded", order == 0, f"{order} violations")
    rep.check("block ascent monotone", mono == 0, f"{mono} runs with a decrease")
    return rep


@_timed
def run_dict_test(*, instances: int = 20, n: int = 2, factors: int = 2, N: int = 1, m: int = 4,
                  taus=(3.0, 0.3), seed: int = 0, workers: Optional[int] = None) -> ExperimentReport:
    """Dictator objective equals ``Tr((V . V) M)`` by both evaluation routes; low-influence search report."""
    _require(instances >= 1 and m >= 1 and m <= 12, "need instances >= 1 and 1 <= m <= 12")
    taus = [float(t) for t in (taus if isinstance(taus, (list, tuple)) else [taus])]
    _require(all(t > 0 for t in taus), "tau must be positive")
    rep = ExperimentReport("dict-test", dict(instances=instances, n=n, factors=factors, N=N, m=m, taus=taus), seed)
    root = RngStream(seed)
    gen = root.child(0).generator()
    worst_target = worst_route = 0.0
    first = None
    for j in range(instances):
        M = random_psd_tensor(gen, n, factors)
        X = opt_symmetric_ascent(M, 5, rng=root.child(1, j)).X
        V = embedded_vector_unitary(X, N)
        f = dictator(m, int(gen.integers(m)), n)
        a = obj_fourier(f, f, M, V)
        b = obj_enumerated(f, f, M, V)
        target = dictator_value(M, V)
        scale = max(1.0, abs(target))
        worst_target = max(worst_target, abs(a.real - target) / scale)
        worst_route = max(worst_route, abs(a - b) / scale)
        if first is None:
            first = (M, V, target)
    rep.check("OBJ(dictator) = Tr((V . V) M)", worst_target <= 1e-9, f"worst relative error {worst_target:.2e}")
    rep.check("Fourier and enumeration routes agree", worst_route <= 1e-9, f"worst relative gap {worst_route:.2e}")
    M, V, target = first
    rep.add("instance 0 dictator value", target, "exact")
    for k, tau in enumerate(taus):
        cr = ctau_search(M, V, tau, m=min(m + 2, 8), rng=root.child(2, k))
        rep.add(f"tau={tau} best objective", cr.best, "heuristic lower bound", reference=cr.reference,
                dictator=cr.dictator_value)
        if tau >= n:
            rep.check(f"tau={tau}: dictators reach the completeness value", cr.best >= target - 1e-9,
                      f"{cr.best:.6f} vs {target:.6f}", hard=False)
    return rep


@_timed
def run_kd_estimate(*, d: int = 1, samples: int = 1_000_000, seed: int = 0,
                    workers: Optional[int] = None) -> ExperimentReport:
    """Monte Carlo estimate of ``K(d)``."""
    _require(d >= 1 and samples >= 2, "need d >= 1 and samples >= 2")
    rep = ExperimentReport("kd-estimate", dict(d=d, samples=samples), seed)
    est = estimate_Kd(d, samples, RngStream(seed, 1), workers=workers)
    rep.add_estimate(f"K({d})", est)
    limit = (8 / (3 * math.pi)) ** 2
    rep.add("pi/4", math.pi / 4, "closed form")
    rep.add("large-d limit (8/(3 pi))^2", limit, "closed form")
    if d == 1:
        z = (est.mean - math.pi / 4) / est.stderr
        rep.check("K(1) within 3 sigma of pi/4", abs(z) <= 3, f"{est.mean:.5f}, z = {z:.2f}")
    elif d >= 32:
        rep.check("K(d) within 0.02 of the limit", abs(est.mean - limit) <= 0.02, f"{est.mean:.5f} vs {limit:.5f}")
    return rep


@_timed
def run_ensemble_check(*, kind: str = "haar", n: int = 2, K: int = 2, samples: int = 20_000, damping_p=None,
                       seed: int = 0, workers: Optional[int] = None) -> ExperimentReport:
    """Moment constants ``||E (G G*)^K||`` and, optionally, the Haar block damping bound."""
    _require(K >= 1 and n >= 1, "need K >= 1 and n >= 1")
    spec = EnsembleSpec.from_json({"kind": kind, "n": n, "p": n, "basis": "standard"})
    rep = ExperimentReport("ensemble-check", dict(kind=kind, n=n, K=K, samples=samples, damping_p=damping_p), seed)
    root = RngStream(seed)
    est = check_moment_bound(spec, K, samples, root.child(1), workers=workers)
    rep.add_estimate(f"||E(GG*)^{K}||", est)
    if spec.kind == "haar_unitary":
        rep.check("haar constant equals 1", abs(est.mean - 1.0) <= 1e-12, f"|est - 1| = {abs(est.mean - 1):.1e}")
    elif spec.kind == "gaussian_frame":
        bound = factorial_constant(K)
        rep.check(f"frame constant <= {K}! + 3 sigma", est.mean <= bound + 3 * est.stderr,
                  f"{est.mean:.4f} +/- {est.stderr:.3f}")
    if damping_p:
        plist = damping_p if isinstance(damping_p, (list, tuple)) else [damping_p]
        eye = np.eye(n)
        for i, p in enumerate(plist):
            dd = haar_block_damping_check(eye, eye, int(p), samples, root.child(2, i), workers=workers)
            rep.add_estimate(f"E||i(I) H i(I)||^2 p={p}", dd)
            rep.check(f"damping p={p} <= n^2/p + 3 sigma", dd.mean <= n * n / p + 3 * dd.stderr,
                      f"{dd.mean:.4f} vs {n * n / p:.4f}")
    return rep


@dataclass(frozen=True)
class Experiment:
    name: str
    runner: Callable[..., ExperimentReport]
    defaults: dict
    summary: str


def _defaults(fn) -> dict:
    sig = inspect.signature(fn)
    return {k: v.default for k, v in sig.parameters.items() if k not in ("seed", "workers")}


REGISTRY: dict[str, Experiment] = {}


def _register(name: str, fn, summary: str) -> None:
    REGISTRY[name] = Experiment(name, fn, _defaults(fn), summary)


def run(name: str, *, seed: int = 0, workers: Optional[int] = None, **params) -> ExperimentReport:
    """Run a registered experiment; unknown parameter names raise."""
    if name not in REGISTRY:
        raise InvalidInputError(f"unknown experiment {name!r}; choose from {sorted(REGISTRY)}")
    exp = REGISTRY[name]
    unknown = set(params) - set(exp.defaults)
    if unknown:
        raise InvalidInputError(f"unknown parameters for {name}: {sorted(unknown)}")
    return exp.runner(seed=int(seed), workers=workers, **params)


_register("counterexample-wigner", run_counterexample_wigner,
          "averaged sum: cube fourth moment 3 - 2/m vs Wigner value 2")
_register("counterexample-cyclic", run_counterexample_cyclic,
          "pairwise-orthogonal coefficients: cube moment n vs Haar moment 2n - 1")
_register("hyper", run_hyper, "(2K,2) hypercontractivity on the cube and for frame inputs")
_register("majorize", run_majorization_sweep, "moment majorization with paired sweep over p")
_register("chop", run_chop, "distance to the clipped smoothed polynomial")
_register("noise-stability", run_noise_stability, "cube noise stability vs clipped Gaussian-matrix stability")
_register("anticoncentration", run_anticoncentration, "operator-norm exceedance curves")
_register("ncgi-opt", run_ncgi_opt, "unitary bilinear optimum: free vs symmetric ascent")
_register("psd-variant", run_psd_variant, "PSD block variant: constrained, relaxed, rounded")
_register("dict-test", run_dict_test, "dictatorship test objective and low-influence search")
_register("kd-estimate", run_kd_estimate, "Monte Carlo estimate of K(d)")
_register("ensemble-check", run_ensemble_check, "ensemble moment constants and Haar block damping")
