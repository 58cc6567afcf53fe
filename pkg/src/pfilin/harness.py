"""Experiment orchestration: seeded replications, the four desk-scale
experiments, metric aggregation, and deterministic CSV emission."""

from __future__ import annotations

import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, build_environment
from .environments import pull_linear
from .estimators import EstimatorBundle, draw_mix_weights, resample_until_match
from .multipfi import MultiPfiConfig, run_multipfi
from .pareto import success_check
from .pfiwr import PfiwrConfig, run as run_pfiwr
from .seeding import multipfi_streams, pfiwr_streams, replication_seeds

# ---------------------------------------------------------------------------
# deterministic CSV / JSON output
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_manifest(out_dir, cfg: ExperimentConfig) -> None:
    manifest = {
        "config": asdict(cfg),
        "package": {"name": "pfilin", "version": __version__},
        "versions": {"python": sys.version.split()[0], "numpy": np.__version__},
    }
    path = Path(out_dir) / "manifest.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# replication plumbing
# ---------------------------------------------------------------------------


def map_replications(worker, tasks, workers: int) -> list:
    """Run per-replication tasks and return results in task order.

    Results are reduced sequentially over sorted indices so a parallel pool
    never changes output bytes.
    """
    if workers <= 1:
        return [worker(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, tasks))


# ---------------------------------------------------------------------------
# scheduled estimation runs (fixed pull schedule, shared by three experiments)
# ---------------------------------------------------------------------------


def scheduled_estimation_run(cs, model, n_rounds: int, switch_round: int, delta: float,
                             seeds, imputations=("mixed",), track_ridge=True,
                             exploit_arm: int = 0, checkpoints=()):
    """Drive the estimation pipeline under an external pull schedule: uniform
    basis draws up to the switch round (all stored as exploration), then the
    exploit arm only.  Tracks per-round reward errors for every estimator and
    snapshots the parameter estimates at the requested checkpoints."""
    rngs = pfiwr_streams(seeds)
    L = model.n_objectives
    d = cs.d
    bundle = EstimatorBundle(cs, L, delta, gamma_c=1.0, imputations=imputations,
                             track_ridge=track_ridge)
    means = cs.contexts.T @ model.theta
    other_arms = np.array([k for k in range(cs.n_arms) if k != exploit_arm])

    trackers = {}
    if track_ridge:
        trackers["ridge"] = bundle.theta_ridge
    trackers["mixed"] = bundle.theta_mixed
    for name in imputations:
        trackers[f"dr-{name}"] = (lambda _n=name: bundle.theta_dr(_n))

    errors = {est: np.zeros((n_rounds, 2)) for est in trackers}
    snapshots = {}
    checkpoints = set(checkpoints)
    contexts_T = cs.contexts.T

    for t in range(1, n_rounds + 1):
        i_t, check_arm = bundle.draw_direction(rngs["algorithm"])
        bundle.ledger.register_draw(check_arm)
        weights = None
        if t <= switch_round:
            explored = True
            action = check_arm
            bundle.ledger.force_exploration(t, action)
        else:
            explored = False
            action = exploit_arm
            weights = draw_mix_weights(rngs["weights"])

        def sampler(r, _a=action):
            return _a

        outcome = resample_until_match(sampler, d, t, delta, rngs["resampling"])
        rewards = pull_linear(model, cs, action, rngs["environment"])
        bundle.absorb(t, explored, i_t, check_arm, action, rewards, weights,
                      outcome.matched)
        if outcome.matched:
            bundle.dr_update(action, rewards)

        for est, solve in trackers.items():
            theta = solve()
            resid = contexts_T @ theta - means
            errors[est][t - 1, 0] = np.linalg.norm(resid[exploit_arm])
            errors[est][t - 1, 1] = np.linalg.norm(resid[other_arms])
            if t in checkpoints:
                snapshots[(est, t)] = theta.copy()
    return errors, snapshots


def _scheduled_worker(args):
    cfg, rep, imputations, track_ridge = args
    env = build_environment(cfg.env)
    seeds = replication_seeds(cfg.base_seed, rep)
    return scheduled_estimation_run(env.cs, env.model, cfg.n_rounds, cfg.switch_round,
                                    cfg.delta, seeds, imputations, track_ridge,
                                    checkpoints=cfg.checkpoints)


def _run_scheduled_experiment(cfg: ExperimentConfig, imputations, track_ridge):
    tasks = [(cfg, rep, imputations, track_ridge) for rep in range(cfg.replications)]
    return map_replications(_scheduled_worker, tasks, cfg.workers)


def _curve_stats(per_rep_curves) -> tuple[np.ndarray, np.ndarray]:
    stack = np.stack(per_rep_curves)
    mean = stack.mean(axis=0)
    sd = stack.std(axis=0, ddof=1) if stack.shape[0] > 1 else np.zeros_like(mean)
    return mean, sd


# ---------------------------------------------------------------------------
# experiment: estimator consistency (error curves)
# ---------------------------------------------------------------------------


def exp_estimator_consistency(cfg: ExperimentConfig) -> dict:
    results = _run_scheduled_experiment(cfg, imputations=("mixed",), track_ridge=True)
    estimators = ("ridge", "mixed", "dr-mixed")
    out = Path(cfg.out_dir)

    early_n = min(200, cfg.n_rounds)  # early reference point on the error curve
    curve_rows = []
    summary_rows = []
    summaries = {est: [] for est in estimators}
    for est in estimators:
        curves = [errors[est] for errors, _ in results]
        mean, sd = _curve_stats(curves)
        for n in range(cfg.n_rounds):
            curve_rows.append((est, n + 1, mean[n, 0], sd[n, 0], mean[n, 1], sd[n, 1]))
        for rep, curve in enumerate(curves):
            unexp = curve[:, 1]
            nondecreasing = bool(np.all(np.diff(unexp[cfg.switch_round:]) >= -1e-9))
            row = dict(replication=rep, early_n=early_n,
                       err_unexploited_early=float(unexp[early_n - 1]),
                       err_unexploited_final=float(unexp[cfg.n_rounds - 1]),
                       err_exploited_final=float(curve[cfg.n_rounds - 1, 0]),
                       nondecreasing_after_switch=nondecreasing)
            summaries[est].append(row)
            summary_rows.append((rep, est, early_n, row["err_unexploited_early"],
                                 row["err_unexploited_final"],
                                 row["err_exploited_final"], nondecreasing))

    write_csv(out / "consistency_curves.csv",
              ["estimator", "n", "mean_exploited", "sd_exploited",
               "mean_unexploited", "sd_unexploited"], curve_rows)
    write_csv(out / "consistency_summary.csv",
              ["replication", "estimator", "early_n", "err_unexploited_early",
               "err_unexploited_final", "err_exploited_final",
               "nondecreasing_after_switch"], summary_rows)
    return {"summaries": summaries, "results": results}


# ---------------------------------------------------------------------------
# experiment: estimate densities at checkpoints
# ---------------------------------------------------------------------------


def exp_density(cfg: ExperimentConfig) -> dict:
    results = _run_scheduled_experiment(cfg, imputations=("mixed",), track_ridge=True)
    estimators = ("ridge", "mixed", "dr-mixed")
    env = build_environment(cfg.env)
    means = env.means
    contexts_T = env.cs.contexts.T

    rows = []
    values = {}
    for est in estimators:
        for n in cfg.checkpoints:
            for arm in range(env.cs.n_arms):
                per_rep = []
                for rep, (_, snaps) in enumerate(results):
                    theta = snaps[(est, n)]
                    value = float(np.sqrt(n) * (contexts_T[arm] @ theta - means[arm])[0])
                    rows.append((est, arm, n, rep, value))
                    per_rep.append(value)
                values[(est, arm, n)] = np.array(per_rep)
    write_csv(Path(cfg.out_dir) / "density_samples.csv",
              ["estimator", "arm", "n", "replication", "value"], rows)
    return {"values": values}


# ---------------------------------------------------------------------------
# experiment: DR imputation source comparison
# ---------------------------------------------------------------------------


def exp_dr_imputation(cfg: ExperimentConfig) -> dict:
    results = _run_scheduled_experiment(cfg, imputations=("mixed", "ridge"),
                                        track_ridge=True)
    variants = ("dr-mixed", "dr-ridge")
    out = Path(cfg.out_dir)

    curve_rows = []
    summary_rows = []
    errs = {}
    for variant in variants:
        curves = [errors[variant] for errors, _ in results]
        mean, sd = _curve_stats(curves)
        for n in range(cfg.n_rounds):
            curve_rows.append((variant, n + 1, mean[n, 1], sd[n, 1]))
        errs[variant] = np.array([c[cfg.n_rounds - 1, 1] for c in curves])
    for rep in range(cfg.replications):
        summary_rows.append((rep, errs["dr-mixed"][rep], errs["dr-ridge"][rep]))

    write_csv(out / "dr_imputation_curves.csv",
              ["variant", "n", "mean_unexploited", "sd_unexploited"], curve_rows)
    write_csv(out / "dr_imputation_summary.csv",
              ["replication", "err_dr_mixed_final", "err_dr_ridge_final"], summary_rows)
    return {"errors": errs}


# ---------------------------------------------------------------------------
# experiment: identification comparison across the eps grid
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AggregateMetrics:
    algorithm: str
    eps: float
    replications: int
    mean_tau: float
    sd_tau: float
    median_tau: float
    mean_regret: float
    sd_regret: float
    median_regret: float
    success_rate: float


def _pfi_single(env, algorithm: str, eps: float, delta: float,
                cfg: ExperimentConfig, rep: int, keep_history: bool):
    seeds = replication_seeds(cfg.base_seed, rep)
    if algorithm == "pfiwr":
        acfg = PfiwrConfig(gamma_c=cfg.gamma_c, max_rounds=cfg.max_rounds,
                           keep_history=keep_history)
        return run_pfiwr(env, eps, delta, acfg, pfiwr_streams(seeds))
    if algorithm == "multipfi":
        acfg = MultiPfiConfig(max_rounds=cfg.max_rounds, keep_history=keep_history)
        return run_multipfi(env, eps, delta, acfg, multipfi_streams(seeds))
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _pfi_worker(args):
    env, algorithm, eps, cfg, rep, keep_history, max_rounds = args
    result = _pfi_single(env, algorithm, eps, cfg.delta, cfg, rep, keep_history)
    padded = np.zeros(max_rounds)
    padded[:result.regret_per_round.size] = result.regret_per_round
    record = {
        "tau": result.tau,
        "terminated": result.terminated,
        "cum_regret": result.cumulative_regret,
        "pareto_out": result.pareto_out,
        "cum_curve": np.cumsum(padded),
        "front_contained": result.front_contained,
        "history": result.history,
    }
    return record


def exp_pfi_compare(cfg: ExperimentConfig) -> dict:
    env = build_environment(cfg.env)
    means = env.means
    out = Path(cfg.out_dir)
    curve_eps = tuple(cfg.curve_eps) if cfg.curve_eps else (min(cfg.eps_list),)

    comparison_rows = []
    aggregate_rows = []
    curve_rows = []
    aggregates = []
    per_run = {}

    primary_eps = cfg.eps_list[0]
    for eps in cfg.eps_list:
        reps = cfg.replications if eps == primary_eps else cfg.grid_replications
        for algorithm in cfg.algorithms:
            tasks = [(env, algorithm, eps, cfg, rep, rep in cfg.round_log_reps,
                      cfg.max_rounds) for rep in range(reps)]
            records = map_replications(_pfi_worker, tasks, cfg.workers)

            taus = np.array([r["tau"] for r in records], dtype=float)
            regrets = np.array([r["cum_regret"] for r in records])
            succ = np.array([success_check(r["pareto_out"], means, eps) and r["terminated"]
                             for r in records])
            summary_rows = []
            for rep, rec in enumerate(records):
                row = (rep, rec["tau"], bool(succ[rep]), rec["cum_regret"],
                       ";".join(str(k) for k in rec["pareto_out"]))
                summary_rows.append(row)
                comparison_rows.append((algorithm, eps) + row)
                if rec["history"] is not None:
                    write_csv(out / f"rounds_{algorithm}_eps{eps}_rep{rep}.csv",
                              ["round", "phase", "i_t", "check_arm", "action", "matched",
                               "attempts", "regret", "n_undetermined", "n_accepted"],
                              [(h.round, h.phase, h.basis_index, h.check_arm, h.action,
                                h.matched, h.attempts, h.regret, h.n_undetermined,
                                h.n_accepted) for h in rec["history"]])
            write_csv(out / f"summary_{algorithm}_eps{eps}.csv",
                      ["seed", "tau", "success", "cum_regret", "pareto_out"],
                      summary_rows)

            agg = AggregateMetrics(
                algorithm=algorithm, eps=eps, replications=reps,
                mean_tau=float(np.mean(taus)),
                sd_tau=float(np.std(taus, ddof=1)) if reps > 1 else 0.0,
                median_tau=float(np.median(taus)),
                mean_regret=float(np.mean(regrets)),
                sd_regret=float(np.std(regrets, ddof=1)) if reps > 1 else 0.0,
                median_regret=float(np.median(regrets)),
                success_rate=float(np.mean(succ)),
            )
            aggregates.append(agg)
            aggregate_rows.append((algorithm, eps, reps, agg.mean_tau, agg.sd_tau,
                                   agg.median_tau, agg.mean_regret, agg.sd_regret,
                                   agg.median_regret, agg.success_rate))
            per_run[(algorithm, eps)] = {
                "tau": taus, "regret": regrets, "success": succ,
                "front_contained": np.array([r["front_contained"] for r in records]),
            }

            if eps in curve_eps:
                curves = np.stack([r["cum_curve"] for r in records])
                mean = curves.mean(axis=0)
                sd = curves.std(axis=0, ddof=1) if reps > 1 else np.zeros_like(mean)
                for n in range(cfg.max_rounds):
                    curve_rows.append((algorithm, eps, n + 1, mean[n], sd[n]))

    write_csv(out / "comparison.csv",
              ["algorithm", "eps", "seed", "tau", "success", "cum_regret", "pareto_out"],
              comparison_rows)
    write_csv(out / "aggregate.csv",
              ["algorithm", "eps", "replications", "mean_tau", "sd_tau", "median_tau",
               "mean_regret", "sd_regret", "median_regret", "success_rate"],
              aggregate_rows)
    write_csv(out / "regret_curves.csv",
              ["algorithm", "eps", "round", "mean_cum_regret", "sd_cum_regret"],
              curve_rows)
    return {"aggregates": aggregates, "per_run": per_run, "env": env}


_DISPATCH = {
    "estimator-consistency": exp_estimator_consistency,
    "density": exp_density,
    "dr-imputation": exp_dr_imputation,
    "pfi-compare": exp_pfi_compare,
    "custom": exp_pfi_compare,
}


def run_experiment(cfg: ExperimentConfig) -> dict:
    cfg.validate()
    Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
    write_manifest(cfg.out_dir, cfg)
    return _DISPATCH[cfg.experiment](cfg)
