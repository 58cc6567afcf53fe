"""Command-line entry point: run experiments, validate invariants on fixtures,
print the closed-form bound diagnostics, and emit the surrogate dataset."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import ConfigError, load_config, build_environment
from .environments import generate_surrogate_rewards
from .harness import run_experiment, write_csv
from .pareto import gap_profile, regret_lower_bound, sample_lower_bound
from .validate import run_validation


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pfilin",
                                     description="Pareto front identification for linear bandits")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured experiment")
    p_run.add_argument("--config", help="path to a flat key=value config file")
    p_run.add_argument("--out", help="output directory override")
    p_run.add_argument("--seed", type=int, help="base seed override")
    p_run.add_argument("--reps", type=int, help="replication count override")
    p_run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any config key (repeatable)")

    p_val = sub.add_parser("validate", help="run the invariant suite on fixtures")
    p_val.add_argument("--seed", type=int, default=0)

    p_bounds = sub.add_parser("bounds", help="print closed-form bound diagnostics")
    p_bounds.add_argument("--config", required=True, help="config file describing the environment")
    p_bounds.add_argument("--eps", type=float, required=True)
    p_bounds.add_argument("--delta", type=float, required=True)

    p_gen = sub.add_parser("gen-data", help="write the surrogate clustered dataset")
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--n", type=int, default=1024)
    p_gen.add_argument("--clusters", type=int, default=16)
    p_gen.add_argument("--within-std", type=float, default=0.12)
    return parser


def _cmd_run(args) -> int:
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, val = item.partition("=")
        overrides[key.strip()] = val.strip()
    if args.out is not None:
        overrides["out"] = args.out
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.reps is not None:
        overrides["reps"] = str(args.reps)
    cfg = load_config(args.config, overrides)
    run_experiment(cfg)
    print(f"wrote {cfg.experiment} outputs to {cfg.out_dir}")
    return 0


def _cmd_validate(args) -> int:
    failures = 0
    for name, problem in run_validation(args.seed):
        if problem is None:
            print(f"PASS {name}")
        else:
            print(f"FAIL {name}: {problem}")
            failures += 1
    return 1 if failures else 0


def _cmd_bounds(args) -> int:
    cfg = load_config(args.config)
    env = build_environment(cfg.env)
    means = np.asarray(env.means, dtype=float)
    profile = gap_profile(means)
    d, L = env.cs.d, env.n_objectives
    sample = sample_lower_bound(profile, env.sigma, L, args.delta, args.eps, d)
    suboptimal = [profile.delta_star[k] for k in range(means.shape[0])
                  if k not in profile.pareto_front]
    delta_star_eps = max(args.eps, min(suboptimal)) if suboptimal else args.eps
    regret = regret_lower_bound(delta_star_eps, env.sigma, d, args.delta)
    print(f"pareto_front={','.join(str(k) for k in profile.pareto_front)}")
    print(f"sample_lower_bound={sample!r}")
    print(f"regret_lower_bound={regret!r}")
    return 0


def _cmd_gen_data(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows = generate_surrogate_rewards(args.n, args.clusters, args.within_std, rng)
    write_csv(args.out, [f"objective_{i}" for i in range(rows.shape[1])],
              [tuple(row) for row in rows])
    print(f"wrote {rows.shape[0]} samples to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": _cmd_run, "validate": _cmd_validate,
                "bounds": _cmd_bounds, "gen-data": _cmd_gen_data}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config-error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"io-error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"param-error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
