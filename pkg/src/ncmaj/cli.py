"""Command-line entry point: ``ncmaj list`` and ``ncmaj run <experiment> [--param value ...]``.

Parameters come from an optional JSON config (``--config``) and from flags;
flags win. A previously written report is also accepted as a config, which
re-runs it with its recorded seed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from .errors import InvalidInputError
from .lab import REGISTRY, run
from .montecarlo import SEED_ENV, resolve_seed

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _scalar(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _converter(default: Any):
    """Flag parser matching the type of a parameter's default value."""
    if isinstance(default, bool):
        return _parse_bool
    if isinstance(default, int):
        return int
    if isinstance(default, float):
        return float
    if isinstance(default, (list, tuple)):
        return lambda text: [_scalar(t) for t in text.split(",") if t.strip()]
    if isinstance(default, str):
        return str
    if default is None:
        # lists (comma separated), JSON objects or scalars
        def parse(text: str):
            if text.lstrip().startswith(("{", "[")):
                return json.loads(text)
            if "," in text:
                return [_scalar(t) for t in text.split(",") if t.strip()]
            return _scalar(text)

        return parse
    return str


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncmaj", description="Matrix-valued majorization experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list registered experiments and their parameters")
    run_p = sub.add_parser("run", help="run one experiment")
    exp_sub = run_p.add_subparsers(dest="experiment", required=True, metavar="EXPERIMENT")
    for name, exp in REGISTRY.items():
        ep = exp_sub.add_parser(name, help=exp.summary, description=exp.summary)
        ep.add_argument("--config", type=Path, help="JSON file with parameters (flags override it)")
        ep.add_argument("--seed", type=int, default=None, help=f"master seed (else ${SEED_ENV}, else clock)")
        ep.add_argument("--workers", type=int, default=None, help="worker threads (default: all CPUs)")
        ep.add_argument("--out", type=Path, default=None, help="write the JSON report here")
        ep.add_argument("--csv", type=Path, default=None, help="write tabular output (CDF grids) here")
        ep.add_argument("--quiet", action="store_true", help="print only the seed and the verdict")
        for key, default in exp.defaults.items():
            flag = "--" + key.replace("_", "-")
            aliases = [flag] + (["--" + key] if "_" in key else [])
            ep.add_argument(*aliases, dest=f"param_{key}", type=_converter(default), default=None,
                            help=f"default: {default!r}")
    return parser


def load_config(path: Optional[Path]) -> tuple[dict, Optional[int]]:
    """Parameters and seed from a config file or a previous report."""
    if path is None:
        return {}, None
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise InvalidInputError("config must be a JSON object")
    seed = obj.get("seed")
    params = obj["config"] if isinstance(obj.get("config"), dict) else {
        k: v for k, v in obj.items() if k not in ("seed", "experiment")
    }
    return dict(params), (int(seed) if seed is not None else None)


def list_experiments(stream=None) -> None:
    stream = stream or sys.stdout
    for name, exp in REGISTRY.items():
        stream.write(f"{name}\n    {exp.summary}\n")
        params = ", ".join(f"{k}={v!r}" for k, v in exp.defaults.items())
        stream.write(f"    params: {params}\n")


def _run(args: argparse.Namespace) -> int:
    name = args.experiment
    params, cfg_seed = load_config(args.config)
    for key in REGISTRY[name].defaults:
        val = getattr(args, f"param_{key}")
        if val is not None:
            params[key] = val
    seed = resolve_seed(args.seed if args.seed is not None else cfg_seed)
    print(f"seed: {seed}", flush=True)
    report = run(name, seed=seed, workers=args.workers, **params)
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(report.dumps())
    if args.csv:
        args.csv.parent.mkdir(parents=True, exist_ok=True)
        if report.tables:
            parts = [f"# {key}\n{text}" for key, text in report.tables.items()]
            args.csv.write_text("".join(parts))
        else:
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["label", "value", "stderr", "provenance"])
            for r in report.results:
                val = r.get("mean", r.get("value"))
                writer.writerow([r["label"], json.dumps(val), r.get("stderr", ""), r["provenance"]])
            args.csv.write_text(buf.getvalue())
    print(f"verdict: {report.verdict}" if args.quiet else report.text())
    return EXIT_FAIL if report.verdict == "fail" else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "list":
        list_experiments()
        return EXIT_OK
    try:
        return _run(args)
    except InvalidInputError as exc:
        print(f"ncmaj: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
