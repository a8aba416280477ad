"""Dictator chop distance at several ``p`` on shared inner draws.

The embedded dictator input is ``rho G R`` with ``R`` a ``n x p`` block of a
Haar unitary; ``R R* = I`` makes its singular values those of ``rho G`` for
every ``p``. This script shows the resulting per-draw equality numerically.

    python scripts/chop_p_invariance.py --ps 4 16 64 256
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from ncmaj.estimators import chop_distance_paired
from ncmaj.fourier import dictator
from ncmaj.montecarlo import RngStream


@dataclass
class Config:
    n: int = 2
    m: int = 8
    rho: float = 0.9
    ps: list[int] = field(default_factory=lambda: [4, 16, 64, 256])
    samples: int = 10_000
    seed: int = 0


def parse() -> Config:
    d = Config()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=d.n)
    ap.add_argument("--m", type=int, default=d.m)
    ap.add_argument("--rho", type=float, default=d.rho)
    ap.add_argument("--ps", type=int, nargs="+", default=d.ps)
    ap.add_argument("--samples", type=int, default=d.samples)
    ap.add_argument("--seed", type=int, default=d.seed)
    a = ap.parse_args()
    return Config(a.n, a.m, a.rho, a.ps, a.samples, a.seed)


def main() -> int:
    cfg = parse()
    ests, diffs = chop_distance_paired(dictator(cfg.m, 0, cfg.n), cfg.rho, cfg.ps, cfg.samples,
                                       RngStream(cfg.seed))
    for p, e in zip(cfg.ps, ests):
        print(f"p={p:5d}  chop distance {e.mean:.8f} +/- {e.stderr:.2e}")
    for d in diffs:
        print(f"{d.label:24s} {d.mean:+.3e} +/- {d.stderr:.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
