import numpy as np
import pytest

from pfilin.config import EnvironmentSpec, build_environment
from pfilin.environments import LinearEnvironment, make_mab
from pfilin.multipfi import (MabEstimate, MultiPfiConfig, NotMab,
                             confidence_radius, run_multipfi)
from pfilin.pareto import pareto_front, success_check
from pfilin.seeding import multipfi_streams, replication_seeds

from conftest import random_context_matrix
from pfilin.contexts import build_context_set
from pfilin.environments import RewardModel


def mab_env(means, sigma):
    cs, model = make_mab(means, sigma=sigma)
    return LinearEnvironment(cs=cs, model=model)


class TestGuards:
    def test_non_euclidean_contexts_rejected(self, rng):
        X = random_context_matrix(rng, 2, 4)
        theta = np.zeros((2, 1))
        env = LinearEnvironment(cs=build_context_set(X),
                                model=RewardModel(theta=theta, theta_max=1.0, sigma=0.1))
        with pytest.raises(NotMab):
            run_multipfi(env, 0.1, 0.1, MultiPfiConfig(),
                         multipfi_streams(replication_seeds(0, 0)))


class TestEstimate:
    def test_running_mean_equals_batch(self, rng):
        est = MabEstimate(counts=np.zeros(3, dtype=np.int64), sums=np.zeros((3, 2)))
        samples = {k: [] for k in range(3)}
        for _ in range(500):
            k = int(rng.integers(3))
            y = rng.standard_normal(2)
            est.counts[k] += 1
            est.sums[k] += y
            samples[k].append(y)
        for k in range(3):
            assert np.abs(est.means[k] - np.mean(samples[k], axis=0)).max() < 1e-12

    def test_radius_formula(self):
        beta = confidence_radius(np.array([10]), n_arms=4, L=2, delta=0.1)
        assert beta[0] == pytest.approx(np.sqrt((2 / 10) * np.log(4 * 2 * 4 * 100 / 0.1)))


class TestRunMultipfi:
    def test_two_arm_identification(self):
        env = mab_env([[1.0], [0.0]], sigma=0.01)
        ok = 0
        for rep in range(40):
            res = run_multipfi(env, 0.1, 0.1, MultiPfiConfig(max_rounds=100_000),
                               multipfi_streams(replication_seeds(41, rep)))
            assert res.terminated
            ok += success_check(res.pareto_out, env.means, 0.1)
        assert ok >= 38

    def test_zero_radius_exact_means_single_epoch(self):
        env = mab_env([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]], sigma=0.0)
        res = run_multipfi(env, 0.1, 0.1,
                           MultiPfiConfig(max_rounds=1000, radius_scale=0.0),
                           multipfi_streams(replication_seeds(43, 0)))
        assert res.terminated
        assert res.tau == 3  # one pull per arm
        assert res.pareto_out == (0, 1)

    def test_delayed_release_keeps_witness(self):
        """An identified front arm stays in the rotation while an arm it
        empirically dominates is still undecided."""
        env = mab_env([[1.0], [0.62], [0.6]], sigma=0.02)
        res = run_multipfi(env, 0.05, 0.1,
                           MultiPfiConfig(max_rounds=200_000, keep_history=True),
                           multipfi_streams(replication_seeds(47, 1)))
        assert res.terminated
        pulls_of_best = [rec.round for rec in res.history if rec.action == 0]
        # arm 0 is identified almost immediately (huge margins) yet keeps being
        # sampled until arms 1 and 2 are decided
        last_epoch_others = max(rec.round for rec in res.history if rec.action != 0)
        assert max(pulls_of_best) > 0.5 * last_epoch_others

    def test_determinism(self):
        env = mab_env([[1.0], [0.3]], sigma=0.05)
        r1 = run_multipfi(env, 0.1, 0.1, MultiPfiConfig(max_rounds=50_000),
                          multipfi_streams(replication_seeds(53, 2)))
        r2 = run_multipfi(env, 0.1, 0.1, MultiPfiConfig(max_rounds=50_000),
                          multipfi_streams(replication_seeds(53, 2)))
        assert r1.tau == r2.tau
        assert r1.pareto_out == r2.pareto_out
        assert r1.cumulative_regret == r2.cumulative_regret

    def test_active_set_nonincreasing(self):
        env = mab_env([[1.0], [0.5], [0.2]], sigma=0.05)
        res = run_multipfi(env, 0.1, 0.1,
                           MultiPfiConfig(max_rounds=200_000, keep_history=True),
                           multipfi_streams(replication_seeds(59, 0)))
        sizes = [rec.n_undetermined for rec in res.history]
        assert all(b <= a for a, b in zip(sizes, sizes[1:]))

    def test_accepted_arms_near_front_under_success(self):
        env = mab_env([[1.0, 0.0], [0.0, 1.0], [0.4, 0.4], [-0.5, -0.5]], sigma=0.05)
        for rep in range(10):
            res = run_multipfi(env, 0.08, 0.1, MultiPfiConfig(max_rounds=300_000),
                               multipfi_streams(replication_seeds(61, rep)))
            assert res.terminated
            assert success_check(res.pareto_out, env.means, 0.08)

    def test_max_rounds_partial(self):
        env = mab_env([[0.02], [0.0]], sigma=0.5)
        res = run_multipfi(env, 0.001, 0.1, MultiPfiConfig(max_rounds=50),
                           multipfi_streams(replication_seeds(67, 0)))
        assert not res.terminated
        assert res.tau == 50

    def test_clustered_comparison_instance(self):
        env = build_environment(EnvironmentSpec(kind="clustered"))
        res = run_multipfi(env, 0.06, 0.1, MultiPfiConfig(max_rounds=300_000),
                           multipfi_streams(replication_seeds(71, 0)))
        assert res.terminated
        assert res.pareto_out == pareto_front(env.means)
