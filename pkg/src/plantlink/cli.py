"""Command line entry point: run/validate scenario files, list shipped examples.

Exit codes: 0 success, 1 config validation failure, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .scenario import (
    ScenarioRuntimeError,
    ScenarioValidationError,
    example_scenarios,
    load_scenario,
    run_scenario,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plantlink",
        description="Simulate plant-to-plant communication links from TOML scenarios.",
    )
    parser.add_argument("--version", action="version", version=f"plantlink {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and write CSVs plus summary.json")
    run.add_argument("scenario", help="path to a scenario TOML file")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--out", default="out", help="output directory (default: ./out)")
    run.add_argument(
        "--trials", type=int, default=None, help="override the Monte Carlo trial count"
    )

    val = sub.add_parser("validate", help="check a scenario file and report all problems")
    val.add_argument("scenario", help="path to a scenario TOML file")

    sub.add_parser("list-examples", help="list the shipped example scenarios")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "list-examples":
        for name, path in example_scenarios().items():
            print(f"{name}\t{path}")
        return EXIT_OK

    try:
        cfg = load_scenario(args.scenario)
    except FileNotFoundError:
        print(f"error: scenario file not found: {args.scenario}", file=sys.stderr)
        return EXIT_INVALID
    except ScenarioValidationError as exc:
        print(f"invalid scenario ({len(exc.errors)} problem(s)):", file=sys.stderr)
        for err in exc.errors:
            print(f"  - {err}", file=sys.stderr)
        return EXIT_INVALID

    if args.command == "validate":
        print(f"ok: {args.scenario} is a valid {cfg.modality} scenario")
        return EXIT_OK

    try:
        summary = run_scenario(
            cfg, Path(args.out), seed=args.seed, trials=args.trials
        )
    except ScenarioRuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # surface unexpected failures with the runtime code
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    metrics = summary["metrics"]
    print(f"wrote {Path(args.out) / 'summary.json'}")
    if "ser" in metrics:
        print(f"ser = {metrics['ser']:.6g}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
