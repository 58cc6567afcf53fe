#!/usr/bin/env python3
"""Run one or all of the shipped desk-scale experiments.

Examples:
    python3 scripts/run_experiments.py consistency
    python3 scripts/run_experiments.py all --full-scale --out out_full
"""

import argparse
import sys
from pathlib import Path

from pfilin.cli import main as pfilin_main

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = {
    "consistency": "estimator_consistency.cfg",
    "density": "density.cfg",
    "dr-imputation": "dr_imputation.cfg",
    "pfi-compare": "pfi_compare.cfg",
}
FULL_REPS = {"consistency": 1000, "density": 1000, "dr-imputation": 1000,
              "pfi-compare": 500}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("experiment", choices=[*CONFIGS, "all"])
    parser.add_argument("--full-scale", action="store_true",
                        help="use the original replication counts")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None, help="output directory root")
    args = parser.parse_args()

    names = list(CONFIGS) if args.experiment == "all" else [args.experiment]
    for name in names:
        argv = ["run", "--config", str(ROOT / "configs" / CONFIGS[name])]
        if args.full_scale:
            argv += ["--reps", str(FULL_REPS[name])]
        if args.seed is not None:
            argv += ["--seed", str(args.seed)]
        if args.out is not None:
            argv += ["--out", str(Path(args.out) / name)]
        print(f"== {name}: pfilin {' '.join(argv)}")
        status = pfilin_main(argv)
        if status != 0:
            return status
    return 0


if __name__ == "__main__":
    sys.exit(main())
