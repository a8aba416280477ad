"""Run every registered experiment with its defaults and write one JSON report per experiment.

    python scripts/run_all_experiments.py --out results/ --seed 1
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field
from pathlib import Path

from ncmaj.lab import REGISTRY, run


@dataclass
class Config:
    out: Path = Path("results")
    seed: int = 1
    workers: int | None = None
    only: list[str] = field(default_factory=list)


def parse() -> Config:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Config.out)
    ap.add_argument("--seed", type=int, default=Config.seed)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--only", nargs="*", default=[], choices=sorted(REGISTRY))
    a = ap.parse_args()
    return Config(a.out, a.seed, a.workers, a.only)


def main() -> int:
    cfg = parse()
    cfg.out.mkdir(parents=True, exist_ok=True)
    failed = []
    for name in cfg.only or REGISTRY:
        t0 = time.perf_counter()
        rep = run(name, seed=cfg.seed, workers=cfg.workers)
        (cfg.out / f"{name}.json").write_text(rep.dumps())
        for key, text in rep.tables.items():
            (cfg.out / f"{name}-{key}.csv").write_text(text)
        print(f"{name:24s} {rep.verdict:12s} {time.perf_counter() - t0:7.1f}s")
        for c in rep.failed_checks():
            print(f"    FAIL {c['name']}: {c['detail']}")
        if rep.verdict == "fail":
            failed.append(name)
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
