"""Fourth-moment majorization residual as ``p`` doubles, repeated over several seeds.

Prints one row per (seed, p) with the Monte Carlo left side, the exact cube
moment and the residual, then the paired residual changes.

    python scripts/majorization_sweep.py --seeds 0 1 2 --ps 32 64 128 256
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from ncmaj.lab import run


@dataclass
class Config:
    family: str = "spread"
    n: int = 2
    m: int = 16
    ps: list[int] = field(default_factory=lambda: [64, 128, 256])
    samples: int = 10_000
    seeds: list[int] = field(default_factory=lambda: [0])


def parse() -> Config:
    d = Config()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", default=d.family, choices=["spread", "random", "dictator"])
    ap.add_argument("--n", type=int, default=d.n)
    ap.add_argument("--m", type=int, default=d.m)
    ap.add_argument("--ps", type=int, nargs="+", default=d.ps)
    ap.add_argument("--samples", type=int, default=d.samples)
    ap.add_argument("--seeds", type=int, nargs="+", default=d.seeds)
    a = ap.parse_args()
    return Config(a.family, a.n, a.m, a.ps, a.samples, a.seeds)


def main() -> int:
    cfg = parse()
    print("seed,p,lhs,lhs_stderr,cube_moment,residual")
    changes = []
    for seed in cfg.seeds:
        rep = run("majorize", seed=seed, family=cfg.family, n=cfg.n, m=cfg.m, ps=cfg.ps, Ks=[2],
                  samples=cfg.samples)
        rhs = rep.result("K=2 cube moment")["value"]
        for p in cfg.ps:
            r = rep.result(f"K=2 lhs p={p}")
            print(f"{seed},{p},{r['mean']:.6f},{r['stderr']:.6f},{rhs:.6f},{r['mean'] - rhs:.6f}")
        for a, b in zip(cfg.ps, cfg.ps[1:]):
            r = rep.result(f"K=2 residual change p={a}->{b}")
            changes.append((seed, a, b, r["mean"], r["stderr"]))
    print("\nseed,p_from,p_to,paired_change,stderr")
    for row in changes:
        print("{},{},{},{:.6f},{:.6f}".format(*row))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
