"""Successive-elimination baseline for the K-armed (Euclidean-basis) setting:
round-robin sampling, per-arm empirical means with Hoeffding-style radii, and
delayed release of identified arms that still dominate undecided ones."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pareto import gap_profile
from .pfiwr import RunRecord, RunResult, gap_estimates


class NotMab(ValueError):
    """Baseline requires Euclidean-basis contexts."""


@dataclass
class MultiPfiConfig:
    max_rounds: int = 500_000
    radius_scale: float = 1.0  # the Hoeffding radius assumes unit-scale noise
    keep_history: bool = False


@dataclass
class MabEstimate:
    """Per-arm pull counts and running empirical mean vectors."""

    counts: np.ndarray
    sums: np.ndarray

    @property
    def means(self) -> np.ndarray:
        return self.sums / np.maximum(self.counts, 1)[:, None]


def confidence_radius(counts, n_arms: int, L: int, delta: float,
                      scale: float = 1.0) -> np.ndarray:
    """Per-arm radius sqrt((2 / n) * log(4 L K n^2 / delta))."""
    n = np.asarray(counts, dtype=float)
    return scale * np.sqrt((2.0 / n) * np.log(4.0 * L * n_arms * n**2 / delta))


def run_multipfi(env, eps: float, delta: float, cfg: MultiPfiConfig, rngs: dict) -> RunResult:
    """Round-robin elimination loop.

    Arms leave the rotation either by being dominated beyond the summed radii
    (discarded) or by being accepted and then released; an accepted arm stays
    sampled while any undecided arm is empirically dominated by it, so it can
    keep serving as the elimination witness.
    """
    cs = env.cs
    K, L = cs.n_arms, env.n_objectives
    if cs.d != K or not np.allclose(cs.contexts, np.eye(K), atol=1e-12):
        raise NotMab("contexts must be the Euclidean basis")
    env_rng = rngs["environment"]

    means = np.asarray(env.means, dtype=float)
    regret_vec = gap_profile(means).delta_star

    est = MabEstimate(counts=np.zeros(K, dtype=np.int64), sums=np.zeros((K, L)))
    alive = np.ones(K, dtype=bool)      # sampling rotation
    accepted = np.zeros(K, dtype=bool)  # identified optimal, possibly still sampled
    released = np.zeros(K, dtype=bool)  # final output, out of the rotation

    history = [] if cfg.keep_history else None
    regret_seq = np.zeros(cfg.max_rounds)
    cum_regret = 0.0
    t = 0

    while alive.any() and t < cfg.max_rounds:
        idx = np.flatnonzero(alive)
        for k in idx:
            if t >= cfg.max_rounds:
                break
            t += 1
            y = env.pull(int(k), env_rng)
            est.counts[k] += 1
            est.sums[k] += y
            r = float(regret_vec[k])
            cum_regret += r
            regret_seq[t - 1] = r
            if history is not None:
                history.append(RunRecord(t, "explore", -1, int(k), int(k), True, 1,
                                         r, int((alive & ~accepted).sum()),
                                         int((released | accepted).sum())))

        means_hat = est.sums[idx] / est.counts[idx, None]
        beta = confidence_radius(est.counts[idx], K, L, delta, cfg.radius_scale)
        m_hat, M_hat = gap_estimates(means_hat, eps)
        bsum = beta[:, None] + beta[None, :]

        dominated = (m_hat > bsum).any(axis=1)
        drop = dominated & ~accepted[idx]
        separated = M_hat >= bsum
        np.fill_diagonal(separated, True)
        # discard wins over acceptance (only clashes in the zero-radius limit)
        newly_accepted = separated.all(axis=1) & ~accepted[idx] & ~drop
        accepted[idx[newly_accepted]] = True
        alive[idx[drop]] = False

        # release accepted arms with no undecided arm left under them
        keep = alive[idx]
        local_accepted = accepted[idx] & keep
        local_undecided = keep & ~accepted[idx]
        if local_accepted.any():
            blocked = (m_hat[local_undecided][:, local_accepted] > 0.0).any(axis=0)
            release_local = np.flatnonzero(local_accepted)[~blocked]
            release_arms = idx[release_local]
            released[release_arms] = True
            alive[release_arms] = False

    terminated = not alive.any()
    out = released | accepted  # accepted-but-capped arms still belong to the output
    front = gap_profile(means).pareto_front
    return RunResult(
        pareto_out=tuple(int(k) for k in np.flatnonzero(out)),
        tau=t,
        terminated=terminated,
        cumulative_regret=cum_regret,
        regret_per_round=regret_seq[:t].copy(),
        history=history,
        front_contained=all(out[k] or alive[k] for k in front),
        unmatched_rounds=0,
    )
