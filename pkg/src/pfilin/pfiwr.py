"""The identification-with-regret-minimization round loop: basis draws,
exploration scheduling, sample recycling, pseudo-action coupling, DR updates,
gap estimation, confidence bounds, and arm elimination."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .contexts import ContextSet
from .estimators import EstimatorBundle, draw_mix_weights, resample_until_match
from .pareto import dominance_matrix, gap_profile


@dataclass
class RunRecord:
    """One row of the per-round log (shared schema with the baseline)."""

    round: int
    phase: str  # "explore" | "exploit"
    basis_index: int
    check_arm: int
    action: int
    matched: bool
    attempts: int
    regret: float
    n_undetermined: int
    n_accepted: int


@dataclass
class PfiState:
    """Evolving identification state: the undetermined and accepted arm sets,
    the round counter, the estimator bundle, and the append-only round log.

    The sets are disjoint, the undetermined set only shrinks, and arms never
    re-enter once removed.
    """

    undetermined: tuple
    accepted: tuple
    round: int
    bundle: EstimatorBundle
    history: list | None


@dataclass
class RunResult:
    """Terminal outcome of one identification run.

    ``terminated`` is False when the safety cap was hit before the
    undetermined set emptied (in-band partial result).
    """

    pareto_out: tuple
    tau: int
    terminated: bool
    cumulative_regret: float
    regret_per_round: np.ndarray
    history: list | None = None
    front_contained: bool = True
    unmatched_rounds: int = 0
    state: "PfiState" = None


@dataclass
class PfiwrConfig:
    gamma_c: float = 1.0
    max_rounds: int = 100_000
    delta_prime: float | None = None  # resampling confidence; defaults to delta
    mix_unmatched: bool = True
    sigma: float | None = None        # override the environment's noise scale
    theta_max: float | None = None    # override the environment's parameter bound
    keep_history: bool = False


def confidence_radii(norms, n_undetermined: int, d: int, L: int, t: int,
                     delta: float, theta_max: float, sigma: float) -> np.ndarray:
    """Per-arm radii 3 ||x_k||_{F_t^{-1}} * width, with the wide union-bound
    width while more than d arms are undetermined and the tight per-arm width
    afterwards."""
    if n_undetermined > d:
        width = theta_max + sigma * math.sqrt(d * math.log(7.0 * L * t / delta))
    else:
        width = theta_max + 3.0 * sigma * math.sqrt(math.log(28.0 * L * d * t * t / delta))
    return 3.0 * np.asarray(norms, dtype=float) * width


def confidence_bound(cs: ContextSet, k: int, t: int, n_undetermined: int,
                     theta_max: float, sigma: float, L: int, delta: float) -> float:
    """Single-arm radius; see `confidence_radii`."""
    from .contexts import design_norm
    norm = design_norm(cs, k, t)
    return float(confidence_radii(np.array([norm]), n_undetermined, cs.d, L, t,
                                  delta, theta_max, sigma)[0])


def gap_estimates(yhat: np.ndarray, eps: float):
    """Pairwise tables over estimated means: the domination margin and the
    2-eps-shifted weak-domination deficit."""
    yhat = np.asarray(yhat, dtype=float)
    diff = yhat[None, :, :] - yhat[:, None, :]  # (k, k', l): yhat_k' - yhat_k
    m_hat = np.maximum(0.0, diff.min(axis=-1))
    M_hat = np.maximum(0.0, (2.0 * eps - diff).max(axis=-1))
    return m_hat, M_hat


def eliminate(a_local: np.ndarray, p_local: np.ndarray, m_hat: np.ndarray,
              M_hat: np.ndarray, beta_local: np.ndarray):
    """One elimination step over the current universe (undetermined + accepted).

    Returns boolean masks, local to the universe, of the surviving candidates
    and the newly accepted arms.  The caller applies: accepted grows by the
    second mask, undetermined becomes candidates minus accepted.
    """
    bsum = beta_local[:, None] + beta_local[None, :]
    candidates = a_local & (m_hat <= bsum).all(axis=1)
    pool = candidates | p_local
    separated = M_hat >= bsum
    np.fill_diagonal(separated, True)  # the self-pair is excluded from the requirement
    accept = candidates & separated[:, pool].all(axis=1)
    return candidates, accept


def _nondominated(yhat: np.ndarray, arm_indices: np.ndarray) -> np.ndarray:
    """Arms among ``arm_indices`` whose estimates nobody strictly dominates;
    falls back to all of them in the (tie-only) degenerate case."""
    dom = dominance_matrix(yhat[arm_indices])
    keep = arm_indices[~dom.any(axis=1)]
    return keep if keep.size else arm_indices


def run(env, eps: float, delta: float, cfg: PfiwrConfig, rngs: dict) -> RunResult:
    """Run the full identification loop on an environment until the
    undetermined set empties or the round cap is reached."""
    cs = env.cs
    d, K, L = cs.d, cs.n_arms, env.n_objectives
    theta_max = env.theta_max if cfg.theta_max is None else cfg.theta_max
    sigma = env.sigma if cfg.sigma is None else cfg.sigma
    delta_prime = delta if cfg.delta_prime is None else cfg.delta_prime
    alg_rng, env_rng = rngs["algorithm"], rngs["environment"]
    w_rng, rs_rng = rngs["weights"], rngs["resampling"]

    bundle = EstimatorBundle(cs, L, delta, cfg.gamma_c, cfg.mix_unmatched)
    means = np.asarray(env.means, dtype=float)
    profile = gap_profile(means)
    regret_vec = profile.delta_star
    front_mask = np.zeros(K, dtype=bool)
    front_mask[list(profile.pareto_front)] = True

    # universe = A union P, maintained incrementally (arms never re-enter)
    universe = np.arange(K)
    a_local = np.ones(K, dtype=bool)
    p_local = np.zeros(K, dtype=bool)
    yhat = np.zeros((K, L))
    exploit_pool = universe  # nondominated undetermined arms, refreshed on updates
    n_undetermined = K
    n_accepted = 0
    state = PfiState(undetermined=tuple(range(K)), accepted=(), round=0,
                     bundle=bundle, history=None)

    history = [] if cfg.keep_history else None
    state.history = history
    regret_seq = np.zeros(cfg.max_rounds)
    cum_regret = 0.0
    front_contained = True
    unmatched = 0
    terminated = False
    rounds_run = cfg.max_rounds

    eigvals = cs._gram_eigvals
    proj_sq = cs._gram_proj**2
    contexts_T = cs.contexts.T
    n_front = front_mask.sum()
    sqrt_d = math.sqrt(d)

    for t in range(1, cfg.max_rounds + 1):
        i_t, check_arm = bundle.draw_direction(alg_rng)
        bundle.ledger.register_draw(check_arm)
        explored = bundle.ledger.exploration_decision(t, check_arm)

        weights = None
        if explored:
            def sampler(r, _a=check_arm):
                return _a
        else:
            # weights are fixed before resampling starts
            weights = draw_mix_weights(w_rng)

            def sampler(r, _c=exploit_pool):
                return int(_c[r.integers(len(_c))])

        outcome = resample_until_match(sampler, d, t, delta_prime, rs_rng)
        action = outcome.action
        rewards = env.pull(action, env_rng)
        bundle.absorb(t, explored, i_t, check_arm, action, rewards, weights,
                      outcome.matched)

        if outcome.matched:
            bundle.dr_update(action, rewards)
            theta = bundle.theta_dr()
            if n_undetermined > d:
                width = theta_max + sigma * sqrt_d * math.sqrt(
                    math.log(7.0 * L * t / delta))
            else:
                width = theta_max + 3.0 * sigma * math.sqrt(
                    math.log(28.0 * L * d * t * t / delta))
            norms = np.sqrt((1.0 / (t * eigvals + 1.0)) @ proj_sq)
            beta = (3.0 * width) * norms[universe]
            yhat[universe] = yh_local = contexts_T[universe] @ theta
            m_hat, M_hat = gap_estimates(yh_local, eps)
            candidates, accept = eliminate(a_local, p_local, m_hat, M_hat, beta)
            p_local = p_local | accept
            discarded = a_local & ~candidates
            a_local = candidates & ~accept
            if discarded.any():
                keep = ~discarded
                universe = universe[keep]
                a_local = a_local[keep]
                p_local = p_local[keep]
                if front_contained and front_mask[universe].sum() != n_front:
                    front_contained = False
            n_undetermined = int(a_local.sum())
            n_accepted = int(p_local.sum())
            und = universe[a_local]
            exploit_pool = _nondominated(yhat, und) if und.size else und
            state.undetermined = tuple(int(k) for k in und)
            state.accepted = tuple(int(k) for k in universe[p_local])
        else:
            unmatched += 1
        state.round = t

        r = float(regret_vec[action])
        cum_regret += r
        regret_seq[t - 1] = r
        if history is not None:
            history.append(RunRecord(t, "explore" if explored else "exploit",
                                     i_t, check_arm, action, outcome.matched,
                                     outcome.attempts, r, n_undetermined,
                                     n_accepted))
        if n_undetermined == 0:
            rounds_run = t
            terminated = True
            break

    return RunResult(
        pareto_out=tuple(int(k) for k in universe[p_local]),
        tau=rounds_run,
        terminated=terminated,
        cumulative_regret=cum_regret,
        regret_per_round=regret_seq[:rounds_run].copy(),
        history=history,
        front_contained=front_contained,
        unmatched_rounds=unmatched,
        state=state,
    )
