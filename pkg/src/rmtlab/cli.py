"""Command-line interface: ``rmtlab <command> [options]``.

Exit codes: 0 on success (or when every verified criterion passes), 1 when a
criterion fails or a run raises a library error, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from rmtlab.config import build_config, load_file
from rmtlab.errors import InvalidConfig, RmtLabError
from rmtlab.runner import run
from rmtlab.verify import DEFAULT_SEED, SUITES, verify

log = logging.getLogger("rmtlab")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not serializable: {type(obj).__name__}")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="YAML file with configuration fields")
    p.add_argument("--model", help="additive | antihermitian | multiplicative")
    p.add_argument("--n", type=int)
    p.add_argument("--t", help="t value or named regime (e.g. mu_over_sqrt_n:2)")
    p.add_argument("--t-range", dest="t_range", help="a:b:steps")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help="master seed (default: $RMT_LAB_SEED or 0)")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--out", type=Path)
    p.add_argument("--svg", action="store_true", default=None, help="write SVG trajectory plots")
    p.add_argument("--w", choices=("v", "uniform"), help="additive left vector: equal to v or independent")
    p.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmtlab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (
        ("sample", "spectra of G(t) on a t grid"),
        ("trajectories", "tracked eigenvalue paths over a t range"),
        ("outlier", "outlier separation frequency"),
        ("overlaps", "diagonal eigenvector overlaps"),
    ):
        _common(sub.add_parser(name, help=helptext))

    g = sub.add_parser("gaf", help="zeros of g - c for random power series g")
    _common(g)
    g.add_argument("--radius", type=float)
    g.add_argument("--c", type=complex, help="level, e.g. 0.5 or 1+2j")

    v = sub.add_parser("verify", help="run an acceptance suite")
    v.add_argument("suite", nargs="?", default="all", help="one of: " + ", ".join(SUITES))
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--out", type=Path, help="write results.json into this directory")
    return parser


def _config_from_args(args):
    file_values = load_file(args.config) if args.config else {}
    t = args.t_range if args.t_range is not None else args.t
    overrides = {
        "analysis": args.command,
        "kind": args.model,
        "n": args.n,
        "t": t,
        "trials": args.trials,
        "master_seed": args.seed,
        "epsilon": args.epsilon,
        "out": args.out,
        "svg": args.svg,
        "w": args.w,
        "workers": args.workers,
        "radius": getattr(args, "radius", None),
        "c": getattr(args, "c", None),
    }
    return build_config(file_values, overrides)


def _verify(args) -> int:
    if args.suite not in SUITES:
        print(f"rmtlab verify: unknown suite {args.suite!r}; choose from {', '.join(SUITES)}", file=sys.stderr)
        return EXIT_USAGE
    results = verify(args.suite, args.seed)
    for r in results:
        print(r.line())
    records = [r.as_record() for r in results]
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "results.json").write_text(json.dumps(records, indent=2, default=_json_default) + "\n")
    print(json.dumps(records, default=_json_default))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")

    if args.command == "verify":
        return _verify(args)
    try:
        config = _config_from_args(args)
    except InvalidConfig as exc:
        print(f"rmtlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RmtLabError as exc:
        print(f"rmtlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    log.info("running %s with %s", args.command, config.as_record())
    try:
        summary = run(config)
    except InvalidConfig as exc:
        print(f"rmtlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RmtLabError as exc:
        print(f"rmtlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(json.dumps(summary, default=_json_default, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
