"""Seeded, chunked Monte Carlo with order-independent reproducibility.

Work is split into chunks of a fixed size. Chunk ``c`` draws from its own
counter-based stream derived from ``(master_seed, stream_index, c)``, so the
result does not depend on how many workers run the chunks. Chunk statistics
are merged in chunk order.
"""
from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidInputError

DEFAULT_CHUNK = 1000
SEED_ENV = "NCMAJ_SEED"


@dataclass(frozen=True)
class RngStream:
    """Independent random stream keyed by ``(master_seed, stream_index, *path)``."""

    master_seed: int
    stream_index: int = 0
    path: tuple = ()

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise InvalidInputError("master seed must be a 64-bit unsigned integer")

    def child(self, *keys: int) -> "RngStream":
        return RngStream(self.master_seed, self.stream_index, self.path + tuple(int(k) for k in keys))

    def generator(self, *keys: int) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.master_seed), spawn_key=(int(self.stream_index),) + self.path + keys)
        return np.random.Generator(np.random.Philox(ss))


def default_workers() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def resolve_seed(flag: Optional[int] = None) -> int:
    """Seed precedence: explicit value, then ``NCMAJ_SEED``, then the clock."""
    if flag is not None:
        return int(flag)
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise InvalidInputError(f"{SEED_ENV} must be an integer, got {env!r}") from exc
    return time.time_ns() % 2**63


class Welford:
    """One-pass mean/variance for scalar or array-valued samples, with merging."""

    def __init__(self, shape=()):
        self.count = 0
        self.mean = np.zeros(shape)
        self.m2 = np.zeros(shape)

    def add_batch(self, values) -> None:
        x = np.asarray(values, dtype=np.float64)
        k = x.shape[0]
        if k == 0:
            return
        mu = x.mean(axis=0)
        m2 = ((x - mu) ** 2).sum(axis=0)
        self.merge_stats(k, mu, m2)

    def merge_stats(self, k, mu, m2) -> None:
        if self.count == 0:
            self.count, self.mean, self.m2 = k, np.array(mu, dtype=np.float64), np.array(m2, dtype=np.float64)
            return
        total = self.count + k
        delta = mu - self.mean
        self.mean = self.mean + delta * (k / total)
        self.m2 = self.m2 + m2 + delta**2 * (self.count * k / total)
        self.count = total

    def merge(self, other: "Welford") -> None:
        if other.count:
            self.merge_stats(other.count, other.mean, other.m2)

    @property
    def variance(self):
        return self.m2 / (self.count - 1) if self.count > 1 else np.zeros_like(self.mean)

    @property
    def stderr(self):
        return np.sqrt(self.variance / max(self.count, 1))


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    samples: int
    master_seed: int
    label: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.isfinite(self.mean):
            raise InvalidInputError(f"non-finite Monte Carlo mean for {self.label!r}")
        if self.stderr < 0:
            raise InvalidInputError("stderr must be nonnegative")

    def within(self, target: float, k: float = 3.0) -> bool:
        return abs(self.mean - target) <= k * self.stderr

    def upper(self, k: float = 3.0) -> float:
        return self.mean + k * self.stderr

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "mean": float(self.mean),
            "stderr": float(self.stderr),
            "samples": int(self.samples),
            "seed": int(self.master_seed),
            "params": self.params,
        }


def chunk_sizes(samples: int, chunk: int = DEFAULT_CHUNK) -> list[int]:
    if samples < 1:
        raise InvalidInputError("need at least one sample")
    full, rest = divmod(int(samples), int(chunk))
    return [chunk] * full + ([rest] if rest else [])


def run_chunks(kernel: Callable[[RngStream, int], np.ndarray], samples: int, rng: RngStream, *,
               chunk: int = DEFAULT_CHUNK, workers: Optional[int] = None) -> Welford:
    """Evaluate ``kernel(chunk_stream, count)`` over all chunks and merge in order.

    The kernel returns a ``(count, ...)`` array of per-sample values; it must
    draw only from the stream it is handed.
    """
    sizes = chunk_sizes(samples, chunk)
    jobs = [(rng.child(c), k) for c, k in enumerate(sizes)]
    workers = default_workers() if workers is None else max(1, int(workers))

    def stats(job):
        stream, k = job
        acc = Welford()
        acc.add_batch(kernel(stream, k))
        return acc

    if workers == 1 or len(jobs) == 1:
        parts = [stats(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(stats, jobs))
    total = Welford()
    for part in parts:
        total.merge(part)
    return total


def mc_estimate(kernel, samples: int, rng: RngStream, *, label: str = "", params=None,
                chunk: int = DEFAULT_CHUNK, workers: Optional[int] = None) -> MCEstimate:
    """Scalar Monte Carlo mean with stderr."""
    acc = run_chunks(kernel, samples, rng, chunk=chunk, workers=workers)
    return MCEstimate(float(acc.mean), float(acc.stderr), acc.count, rng.master_seed, label, dict(params or {}))


def mc_estimates(kernel, samples: int, rng: RngStream, labels, *, params=None,
                 chunk: int = DEFAULT_CHUNK, workers: Optional[int] = None) -> list[MCEstimate]:
    """Several means from one paired run; the kernel returns ``(count, len(labels))``."""
    acc = run_chunks(kernel, samples, rng, chunk=chunk, workers=workers)
    mean = np.atleast_1d(acc.mean)
    se = np.atleast_1d(acc.stderr)
    return [MCEstimate(float(mean[j]), float(se[j]), acc.count, rng.master_seed, lab, dict(params or {}))
            for j, lab in enumerate(labels)]
