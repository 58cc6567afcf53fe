#!/usr/bin/env python3
"""Print the closed-form sample-complexity and regret lower-bound diagnostics
for the 3-arm instance and the clustered surrogate at a few accuracy levels."""

import sys

from pfilin.cli import main as pfilin_main
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    three_arm = ROOT / "configs" / "estimator_consistency.cfg"
    clustered = ROOT / "configs" / "pfi_compare.cfg"
    for cfg, eps_values in ((three_arm, [0.5]), (clustered, [0.06, 0.12, 0.18])):
        for eps in eps_values:
            print(f"== {cfg.name} eps={eps}")
            status = pfilin_main(["bounds", "--config", str(cfg),
                                  "--eps", str(eps), "--delta", "0.1"])
            if status != 0:
                return status
    return 0


if __name__ == "__main__":
    sys.exit(main())
