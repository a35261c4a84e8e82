#!/usr/bin/env python3
"""Run every bundled scenario and print a one-line result per modality.

Outputs (CSV traces plus summary.json) land under --out, one directory per
scenario, so the results can be inspected or plotted afterwards.
"""

import argparse
import sys
from pathlib import Path

from plantlink.scenario import example_scenarios, load_scenario, run_scenario


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="example_runs", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override scenario seeds")
    args = parser.parse_args()

    out_root = Path(args.out)
    for name, path in sorted(example_scenarios().items()):
        cfg = load_scenario(path)
        summary = run_scenario(cfg, out_root / name, seed=args.seed)
        metrics = summary["metrics"]
        ser = metrics.get("ser")
        extras = ", ".join(
            f"{k}={v:.4g}" for k, v in sorted(metrics.items())
            if isinstance(v, (int, float)) and k != "ser"
        )
        print(f"{name:24s} modality={summary['modality']:10s} ser={ser} {extras}")
    print(f"\ntraces and summaries written under {out_root}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
