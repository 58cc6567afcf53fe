"""Estimation pipeline: exploration scheduling with logarithmic budget,
exploration-sample recycling, the exploration-mixed estimator, pseudo-action
coupling with capped resampling, doubly-robust pseudo-rewards, the DR-mix
estimator, and a conventional ridge baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from .contexts import ContextSet, reward_reweight, sample_basis_action

# constant in the exploration budget that the convergence theory prescribes;
# experiments run with much smaller values (see PfiwrConfig.gamma_c)
THEORY_GAMMA_C = 6 * 75**2

WEIGHT_HALF_WIDTH = math.sqrt(3.0)  # unif[-sqrt(3), sqrt(3)] has mean 0, variance 1


class NoExplorationSample(RuntimeError):
    """Recycling was requested for an arm with no stored exploration sample."""


def gamma_t(d: int, t: int, delta: float, c: float) -> float:
    """Exploration budget c * d^3 * log(2 d t^2 / delta) at round t."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    if c <= 0:
        raise ValueError("c must be positive")
    return c * d**3 * math.log(2.0 * d * t * t / delta)


def warmup_round(d: int, delta: float, c: float, cap: int = 10**9) -> int:
    """First round t with t >= gamma_t, found by scanning doubling brackets."""
    lo, hi = 1, 1
    while hi < cap and hi < gamma_t(d, hi, delta, c):
        lo, hi = hi, hi * 2
    if hi >= cap:
        return cap
    while lo < hi:  # binary search on the monotone crossing
        mid = (lo + hi) // 2
        if mid >= gamma_t(d, mid, delta, c):
            hi = mid
        else:
            lo = mid + 1
    return lo


@dataclass
class RecycledSample:
    """A stored exploration observation chosen for reuse."""

    round: int
    arm: int
    rewards: np.ndarray


class ExplorationLedger:
    """Bookkeeping for the exploration set, stored samples, and reuse balance.

    A round is marked for exploration while the arm's exploration count lags
    the fraction gamma_t / t of its draw count, which keeps the exploration set
    growing only logarithmically while guaranteeing that every drawn arm has at
    least one stored sample to recycle.
    """

    def __init__(self, n_arms: int, d: int, delta: float, gamma_c: float):
        self.n_arms = n_arms
        self.d = d
        self.delta = delta
        self.gamma_c = gamma_c
        self.exploration_rounds: list[int] = []
        self.per_arm_exploration_count = np.zeros(n_arms, dtype=np.int64)
        self.per_arm_draw_count = np.zeros(n_arms, dtype=np.int64)
        self._arm_rounds: list[list[int]] = [[] for _ in range(n_arms)]
        self._arm_rewards: list[list[np.ndarray]] = [[] for _ in range(n_arms)]
        self._arm_reuse: list[list[int]] = [[] for _ in range(n_arms)]

    def gamma(self, t: int) -> float:
        return gamma_t(self.d, t, self.delta, self.gamma_c)

    def register_draw(self, check_arm: int) -> None:
        self.per_arm_draw_count[check_arm] += 1

    def exploration_decision(self, t: int, check_arm: int) -> bool:
        """Apply the membership rule for round t; on success round t joins the
        exploration set (the observed sample must then be attached via
        ``store_sample``).  Draw counts must already include round t."""
        lhs = self.per_arm_exploration_count[check_arm]
        rhs = (self.gamma(t) / t) * self.per_arm_draw_count[check_arm]
        if lhs <= rhs:
            self._mark(t, check_arm)
            return True
        return False

    def force_exploration(self, t: int, arm: int) -> None:
        """Externally scheduled exploration round (bypasses the rule)."""
        self._mark(t, arm)

    def _mark(self, t: int, arm: int) -> None:
        self.exploration_rounds.append(t)
        self.per_arm_exploration_count[arm] += 1

    def store_sample(self, t: int, arm: int, rewards) -> None:
        self._arm_rounds[arm].append(t)
        self._arm_rewards[arm].append(np.asarray(rewards, dtype=float))
        self._arm_reuse[arm].append(0)

    def has_samples(self, arm: int) -> bool:
        return bool(self._arm_rounds[arm])

    def select_recycle(self, check_arm: int) -> RecycledSample:
        """Least-reused stored sample of the drawn arm; ties break toward the
        earliest round.  Increments the winner's reuse count."""
        reuse = self._arm_reuse[check_arm]
        if not reuse:
            raise NoExplorationSample(f"arm {check_arm} has no stored exploration sample")
        idx = min(range(len(reuse)), key=reuse.__getitem__)
        reuse[idx] += 1
        return RecycledSample(
            round=self._arm_rounds[check_arm][idx],
            arm=check_arm,
            rewards=self._arm_rewards[check_arm][idx],
        )

    def reuse_counts(self, arm: int) -> list[int]:
        return list(self._arm_reuse[arm])


class RegularizedAccumulator:
    """Gram matrix plus moment vector with on-demand linear solves.

    The recursion (rank-1 or block updates) must coincide with recomputing the
    sums from scratch; tests enforce this to 1e-8.
    """

    def __init__(self, d: int, n_objectives: int, reg: float):
        self.reg = reg
        self.gram = reg * np.eye(d)
        self.moment = np.zeros((d, n_objectives))
        self._solution = None

    def update(self, x, rewards) -> None:
        x = np.asarray(x, dtype=float)
        self.gram += np.outer(x, x)
        self.moment += np.outer(x, np.asarray(rewards, dtype=float))
        self._solution = None

    def update_block(self, contexts, rewards) -> None:
        """Add several (context, reward) rows at once."""
        X = np.asarray(contexts, dtype=float)
        Y = np.asarray(rewards, dtype=float)
        self.gram += X.T @ X
        self.moment += X.T @ Y
        self._solution = None

    def solve(self) -> np.ndarray:
        if self._solution is None:
            # Cholesky solve; the gram is SPD by construction (reg > 0)
            _, sol, info = lapack.dposv(self.gram, self.moment, lower=0)
            if info != 0:
                sol = np.linalg.solve(self.gram, self.moment)
            self._solution = sol
        return self._solution


class MixedRegressionState(RegularizedAccumulator):
    """Exploration-mixed regression: raw exploration rows plus mixed rows,
    ridge-regularized at 1/2."""

    def __init__(self, d: int, n_objectives: int):
        super().__init__(d, n_objectives, reg=0.5)


class RidgeState(RegularizedAccumulator):
    """Conventional ridge regression over the played (context, reward) pairs."""

    def __init__(self, d: int, n_objectives: int):
        super().__init__(d, n_objectives, reg=1.0)


class DrMixState(RegularizedAccumulator):
    """Doubly-robust estimator state over the d+1 pseudo-contexts; only rounds
    with a successful coupling contribute."""

    def __init__(self, d: int, n_objectives: int):
        super().__init__(d, n_objectives, reg=1.0)
        self.matched_rounds = 0

    def update_matched(self, contexts, pseudo_rewards) -> None:
        self.update_block(contexts, pseudo_rewards)
        self.matched_rounds += 1


def draw_mix_weights(rng: np.random.Generator) -> tuple[float, float]:
    """Independent pair of unit-variance, mean-zero uniform mixing weights."""
    w, wc = rng.uniform(-WEIGHT_HALF_WIDTH, WEIGHT_HALF_WIDTH, size=2)
    return float(w), float(wc)


def mix_sample(cs: ContextSet, action: int, basis_index: int, fresh_rewards,
               recycled: RecycledSample, weights: tuple[float, float]):
    """Blend the played context/reward with a recycled exploration sample.

    The context mixes toward the scaled basis direction; the reward mixes
    toward the sign-corrected, l1-reweighted recycled observation, so the pair
    stays unbiased for the same linear parameters.
    """
    w, wc = weights
    x_mixed = w * cs.contexts[:, action] + wc * cs.scaled_basis[basis_index]
    y_mixed = (w * np.asarray(fresh_rewards, dtype=float)
               + wc * reward_reweight(cs, basis_index, recycled.arm, recycled.rewards))
    return x_mixed, y_mixed


def draw_pseudo_action(d: int, rng: np.random.Generator) -> int:
    """Categorical draw over d+1 slots: each basis slot i < d has mass 1/(2d),
    the played-arm slot d has mass 1/2."""
    u = rng.random()
    if u < 0.5:
        return d
    return min(int((u - 0.5) * 2.0 * d), d - 1)


def pseudo_action_pmf(d: int) -> np.ndarray:
    pmf = np.full(d + 1, 1.0 / (2.0 * d))
    pmf[d] = 0.5
    return pmf


def max_resample_attempts(t: int, delta_prime: float) -> int:
    """Resampling cap ceil(log((t+1)^2 / delta') / log 2); with it the coupling
    fails with probability at most delta' / (t+1)^2."""
    return math.ceil(math.log((t + 1) ** 2 / delta_prime) / math.log(2.0))


@dataclass
class MatchOutcome:
    """Result of the coupling loop: the final (action, pseudo-action) pair."""

    matched: bool
    action: int
    pseudo_action: int
    attempts: int


def resample_until_match(action_sampler, d: int, t: int, delta_prime: float,
                         rng: np.random.Generator) -> MatchOutcome:
    """Jointly redraw (action, pseudo-action) until the pseudo-action lands on
    the played-arm slot, up to the round-t cap.  Failure is an in-band outcome;
    the caller then skips the DR update for the round."""
    cap = max_resample_attempts(t, delta_prime)
    action = pseudo = -1
    for attempt in range(1, cap + 1):
        action = action_sampler(rng)
        pseudo = draw_pseudo_action(d, rng)
        if pseudo == d:
            return MatchOutcome(True, action, pseudo, attempt)
    return MatchOutcome(False, action, pseudo, cap)


def pseudo_rewards(theta_imputed: np.ndarray, contexts: np.ndarray,
                   pseudo_action: int, observed) -> np.ndarray:
    """(d+1) x L table of doubly-robust pseudo-rewards.

    Every row carries the imputation; the drawn row additionally receives the
    inverse-probability-weighted correction toward its observed value, which
    restores unbiasedness regardless of the imputation's error.
    """
    d = contexts.shape[0] - 1
    base = contexts @ theta_imputed
    out = base.copy()
    pi = 0.5 if pseudo_action == d else 1.0 / (2.0 * d)
    out[pseudo_action] += (np.asarray(observed, dtype=float) - base[pseudo_action]) / pi
    return out


class EstimatorBundle:
    """Per-run estimation state shared by the algorithm loop and the scheduled
    experiments: one ledger, the mixed state, one DR state per imputation
    source, and optionally the ridge baseline."""

    def __init__(self, cs: ContextSet, n_objectives: int, delta: float,
                 gamma_c: float = 1.0, mix_unmatched: bool = True,
                 imputations: tuple[str, ...] = ("mixed",), track_ridge: bool = False):
        for name in imputations:
            if name not in ("mixed", "ridge"):
                raise ValueError(f"unknown imputation source {name!r}")
        d = cs.d
        self.cs = cs
        self.n_objectives = n_objectives
        self.mix_unmatched = mix_unmatched
        self.imputations = tuple(imputations)
        self.ledger = ExplorationLedger(cs.n_arms, d, delta, gamma_c)
        self.mixed = MixedRegressionState(d, n_objectives)
        self.ridge = RidgeState(d, n_objectives) if (track_ridge or "ridge" in imputations) else None
        self.dr = {name: DrMixState(d, n_objectives) for name in imputations}
        self.skipped_recycles = 0
        self._xtilde = np.vstack([cs.scaled_basis, np.zeros(d)])

    def draw_direction(self, rng: np.random.Generator) -> tuple[int, int]:
        """Fresh basis index and the arm drawn from its distribution."""
        i = int(rng.integers(self.cs.d))
        return i, sample_basis_action(self.cs, i, rng)

    def absorb(self, t: int, explored: bool, basis_index: int, check_arm: int,
               action: int, rewards, weights=None, matched: bool = True) -> None:
        """Feed round-t data into the mixed state (raw on exploration rounds,
        mixed on exploitation rounds) and the ridge baseline."""
        x_a = self.cs.contexts[:, action]
        if explored:
            self.ledger.store_sample(t, action, rewards)
            self.mixed.update(x_a, rewards)
        elif matched or self.mix_unmatched:
            if self.ledger.has_samples(check_arm):
                recycled = self.ledger.select_recycle(check_arm)
                x_mixed, y_mixed = mix_sample(self.cs, action, basis_index, rewards,
                                              recycled, weights)
                self.mixed.update(x_mixed, y_mixed)
            else:
                # only reachable under forced schedules that skipped an arm
                self.skipped_recycles += 1
        if self.ridge is not None:
            self.ridge.update(x_a, rewards)

    def dr_update(self, action: int, rewards) -> None:
        """Matched-round update of every DR state from its imputation source."""
        xt = self._xtilde
        xt[-1] = self.cs.contexts[:, action]
        for name in self.imputations:
            source = self.mixed if name == "mixed" else self.ridge
            yhat = pseudo_rewards(source.solve(), xt, self.cs.d, rewards)
            self.dr[name].update_matched(xt, yhat)

    def theta_mixed(self) -> np.ndarray:
        return self.mixed.solve()

    def theta_ridge(self) -> np.ndarray:
        return self.ridge.solve()

    def theta_dr(self, name: str = "mixed") -> np.ndarray:
        return self.dr[name].solve()
