import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfilin.contexts import build_context_set
from pfilin.estimators import (DrMixState, EstimatorBundle, ExplorationLedger,
                               MixedRegressionState, NoExplorationSample,
                               RecycledSample, RidgeState, THEORY_GAMMA_C,
                               draw_mix_weights, draw_pseudo_action, gamma_t,
                               max_resample_attempts, mix_sample,
                               pseudo_action_pmf, pseudo_rewards,
                               resample_until_match, warmup_round)

from conftest import random_context_matrix


class TestGamma:
    def test_theory_constant(self):
        assert THEORY_GAMMA_C == 33750

    def test_trivial_case(self):
        assert gamma_t(1, 1, 1.0, 2.5) == pytest.approx(2.5 * math.log(2.0))

    def test_formula_value(self):
        assert gamma_t(3, 100, 0.1, 1.0) == pytest.approx(359.22649322335366)

    def test_warmup_is_crossing_point(self):
        for d, delta, c in ((3, 0.1, 1.0), (16, 0.1, 0.005), (2, 0.5, 0.2)):
            t = warmup_round(d, delta, c)
            assert t >= gamma_t(d, t, delta, c)
            if t > 1:
                assert t - 1 < gamma_t(d, t - 1, delta, c)

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            gamma_t(3, 0, 0.1, 1.0)
        with pytest.raises(ValueError):
            gamma_t(3, 1, 0.0, 1.0)
        with pytest.raises(ValueError):
            gamma_t(3, 1, 0.1, 0.0)


class TestExplorationLedger:
    def test_first_round_explores(self):
        ledger = ExplorationLedger(n_arms=4, d=2, delta=0.1, gamma_c=1.0)
        ledger.register_draw(3)
        assert ledger.exploration_decision(1, 3)
        assert ledger.exploration_rounds == [1]

    def test_rule_rejects_when_budget_exhausted(self):
        # arm drawn 10 times and explored 10 times, with gamma_t / t forced to
        # 1/2: 10 > 5 means exploitation
        ledger = ExplorationLedger(n_arms=2, d=1, delta=0.1, gamma_c=1.0)
        ledger.per_arm_draw_count[0] = 10
        ledger.per_arm_exploration_count[0] = 10
        ledger.gamma = lambda t: t / 2.0
        assert not ledger.exploration_decision(20, 0)

    def test_dominant_budget_always_explores(self):
        ledger = ExplorationLedger(n_arms=3, d=2, delta=0.1, gamma_c=1.0)
        ledger.gamma = lambda t: float(t)  # gamma_t / t == 1
        rng = np.random.default_rng(0)
        for t in range(1, 200):
            arm = int(rng.integers(3))
            ledger.register_draw(arm)
            assert ledger.exploration_decision(t, arm)

    def test_insertion_bound_at_decision_rounds(self):
        """At every round where insertion happened, the exploration count is at
        most (gamma_t / t) * draws + 1."""
        ledger = ExplorationLedger(n_arms=3, d=2, delta=0.1, gamma_c=0.02)
        rng = np.random.default_rng(1)
        for t in range(1, 500):
            arm = int(rng.integers(3))
            ledger.register_draw(arm)
            if ledger.exploration_decision(t, arm):
                bound = (ledger.gamma(t) / t) * ledger.per_arm_draw_count[arm] + 1
                assert ledger.per_arm_exploration_count[arm] <= bound
                ledger.store_sample(t, arm, np.zeros(1))

    def test_rule_replay(self):
        """Membership decisions replay exactly from the logged counts."""
        ledger = ExplorationLedger(n_arms=4, d=3, delta=0.2, gamma_c=0.01)
        rng = np.random.default_rng(2)
        draws, decisions = [], []
        for t in range(1, 400):
            arm = int(rng.integers(4))
            ledger.register_draw(arm)
            lhs_before = int(ledger.per_arm_exploration_count[arm])
            got = ledger.exploration_decision(t, arm)
            draws.append((t, arm, lhs_before))
            decisions.append(got)
            if got:
                ledger.store_sample(t, arm, np.zeros(1))
        draw_counts = np.zeros(4, dtype=int)
        expl_counts = np.zeros(4, dtype=int)
        for (t, arm, lhs_before), got in zip(draws, decisions):
            draw_counts[arm] += 1
            expect = lhs_before <= (gamma_t(3, t, 0.2, 0.01) / t) * draw_counts[arm]
            assert got == expect
            assert lhs_before == expl_counts[arm]
            if got:
                expl_counts[arm] += 1

    def test_exploitation_has_recycle_sample(self):
        """Whenever the rule declines, the drawn arm already has a stored
        sample (its first draw explored)."""
        ledger = ExplorationLedger(n_arms=3, d=2, delta=0.1, gamma_c=0.01)
        rng = np.random.default_rng(3)
        for t in range(1, 600):
            arm = int(rng.integers(3))
            ledger.register_draw(arm)
            if ledger.exploration_decision(t, arm):
                ledger.store_sample(t, arm, np.zeros(1))
            else:
                assert ledger.has_samples(arm)


class TestRecycleSelection:
    def _ledger_with(self, rounds, reuse):
        ledger = ExplorationLedger(n_arms=1, d=1, delta=0.1, gamma_c=1.0)
        for r in rounds:
            ledger.store_sample(r, 0, np.array([float(r)]))
        ledger._arm_reuse[0] = list(reuse)
        return ledger

    def test_argmin(self):
        ledger = self._ledger_with([5, 12], [2, 1])
        assert ledger.select_recycle(0).round == 12

    def test_tie_breaks_earliest(self):
        ledger = self._ledger_with([5, 12], [1, 1])
        assert ledger.select_recycle(0).round == 5

    def test_balanced_reuse(self):
        ledger = self._ledger_with([1, 2, 3], [0, 0, 0])
        seen = [ledger.select_recycle(0).round for _ in range(9)]
        assert ledger.reuse_counts(0) == [3, 3, 3]
        assert seen == [1, 2, 3] * 3

    def test_missing_sample_raises(self):
        ledger = ExplorationLedger(n_arms=2, d=1, delta=0.1, gamma_c=1.0)
        with pytest.raises(NoExplorationSample):
            ledger.select_recycle(1)


class TestMixSample:
    def test_pure_fresh(self, rng):
        cs = build_context_set(random_context_matrix(rng, 3, 5))
        rec = RecycledSample(round=1, arm=2, rewards=np.array([0.4]))
        x, y = mix_sample(cs, action=1, basis_index=0, fresh_rewards=np.array([1.5]),
                          recycled=rec, weights=(1.0, 0.0))
        assert np.allclose(x, cs.contexts[:, 1])
        assert y == pytest.approx([1.5])

    def test_pure_recycled_identity(self):
        cs = build_context_set(np.eye(3))
        rec = RecycledSample(round=1, arm=2, rewards=np.array([0.4]))
        x, y = mix_sample(cs, action=0, basis_index=2, fresh_rewards=np.array([9.9]),
                          recycled=rec, weights=(0.0, 1.0))
        assert np.allclose(np.abs(x), np.eye(3)[2])  # basis direction up to SVD sign
        assert abs(y[0]) == pytest.approx(0.4)
        # reweighted recycled reward stays unbiased for the mixed context
        theta = np.array([1.0, -2.0, 0.7])
        assert y[0] * np.sign(x[2]) * np.sign(0.4) >= 0  # sign carried consistently

    def test_weights_distribution(self):
        rng = np.random.default_rng(0)
        ws = np.array([draw_mix_weights(rng) for _ in range(100_000)])
        assert np.abs(ws.mean(axis=0)).max() < 0.02
        assert np.abs(ws.var(axis=0) - 1.0).max() < 0.02
        assert np.abs(ws).max() <= math.sqrt(3) + 1e-12

    def test_mixed_pair_statistics(self, rng):
        """Monte-Carlo check of both moment claims for the mixed pair: zero
        residual mean and expected gram dominating gram_sum / d."""
        X = random_context_matrix(rng, 3, 6)
        cs = build_context_set(X)
        theta = rng.standard_normal(3) * 0.5
        arm_means = X.T @ theta
        sigma = 0.1
        action = 2
        n = 60_000
        draw = np.random.default_rng(9)
        resid = np.empty(n)
        xs = np.empty((n, 3))
        for s in range(n):
            i = int(draw.integers(3))
            k = int(draw.choice(6, p=cs.basis_pmfs[i]))
            rec = RecycledSample(round=1, arm=k,
                                 rewards=np.array([arm_means[k] + sigma * draw.standard_normal()]))
            fresh = np.array([arm_means[action] + sigma * draw.standard_normal()])
            x, y = mix_sample(cs, action, i, fresh, rec, draw_mix_weights(draw))
            resid[s] = y[0] - x @ theta
            xs[s] = x
        assert abs(resid.mean()) < 4 * resid.std(ddof=1) / np.sqrt(n)
        emp_gram = xs.T @ xs / n
        gap = emp_gram - cs.gram_sum / 3
        assert np.linalg.eigvalsh(gap)[0] >= -0.02


class TestRegressionStates:
    def test_initial_solutions_zero(self):
        assert np.allclose(MixedRegressionState(3, 2).solve(), 0.0)
        assert np.allclose(RidgeState(3, 2).solve(), 0.0)
        assert np.allclose(DrMixState(3, 2).solve(), 0.0)

    def test_scalar_mixed_update(self):
        state = MixedRegressionState(1, 1)
        state.update(np.array([1.0]), np.array([2.0]))
        assert state.solve()[0, 0] == pytest.approx(4.0 / 3.0)

    def test_scalar_ridge_update(self):
        state = RidgeState(1, 1)
        state.update(np.array([1.0]), np.array([3.0]))
        assert state.solve()[0, 0] == pytest.approx(1.5)

    def test_min_eigenvalue_floor(self, rng):
        state = MixedRegressionState(4, 1)
        for _ in range(30):
            state.update(rng.standard_normal(4), rng.standard_normal(1))
        assert np.linalg.eigvalsh(state.gram)[0] >= 0.5 - 1e-12

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(1, 40))
    def test_batch_equivalence(self, seed, n):
        """Interleaved rank-1/block updates equal one batch recomputation."""
        rng = np.random.default_rng(seed)
        d, L = 3, 2
        mixed = MixedRegressionState(d, L)
        dr = DrMixState(d, L)
        log = []
        for _ in range(n):
            x = rng.standard_normal(d)
            y = rng.standard_normal(L)
            mixed.update(x, y)
            log.append((x, y))
            if rng.random() < 0.3:
                X = rng.standard_normal((d + 1, d))
                Y = rng.standard_normal((d + 1, L))
                dr.update_matched(X, Y)
                log.append((X, Y))
        xs = np.vstack([np.atleast_2d(x) for x, _ in log])
        ys = np.vstack([np.atleast_2d(y) for _, y in log])
        total = xs.T @ xs
        moment = xs.T @ ys
        assert np.abs((mixed.gram - 0.5 * np.eye(d)) + (dr.gram - np.eye(d))
                      - total).max() < 1e-8
        assert np.abs(mixed.moment + dr.moment - moment).max() < 1e-8

    def test_solve_matches_direct_inverse(self, rng):
        state = DrMixState(4, 2)
        for _ in range(20):
            state.update_matched(rng.standard_normal((5, 4)), rng.standard_normal((5, 2)))
        direct = np.linalg.inv(state.gram) @ state.moment
        assert np.abs(state.solve() - direct).max() < 1e-8

    def test_ridge_single_arm_limit(self):
        """Pulling one arm of a 3-armed instance forever: its coordinate
        converges, unpulled coordinates stay at the prior zero."""
        state = RidgeState(3, 1)
        rng = np.random.default_rng(0)
        x = np.eye(3)[0]
        n = 10_000
        for _ in range(n):
            state.update(x, np.array([1.0 + 0.1 * rng.standard_normal()]))
        theta = state.solve()[:, 0]
        assert abs(theta[0] - 1.0) < 0.01
        assert theta[1] == 0.0 and theta[2] == 0.0


class TestPseudoActions:
    def test_pmf(self):
        for d in (1, 2, 5, 16):
            pmf = pseudo_action_pmf(d)
            assert pmf.sum() == pytest.approx(1.0)
            assert pmf[-1] == pytest.approx(0.5)
            assert np.allclose(pmf[:-1], 1 / (2 * d))

    def test_d1_fair_coin(self):
        rng = np.random.default_rng(0)
        draws = np.array([draw_pseudo_action(1, rng) for _ in range(50_000)])
        assert abs((draws == 1).mean() - 0.5) < 0.01

    def test_frequencies_d3(self):
        rng = np.random.default_rng(1)
        draws = np.array([draw_pseudo_action(3, rng) for _ in range(100_000)])
        freq = np.bincount(draws, minlength=4) / draws.size
        assert np.abs(freq - [1 / 6, 1 / 6, 1 / 6, 1 / 2]).max() < 0.01


class TestResampling:
    def test_attempt_cap_value(self):
        assert max_resample_attempts(9, 0.1) == 10

    def test_forced_first_match(self):
        class FirstMatch:
            def __init__(self):
                self.calls = 0

            def random(self):
                self.calls += 1
                return 0.1  # lands on the played-arm slot

            def integers(self, n):
                return 0

        outcome = resample_until_match(lambda r: 7, d=3, t=5, delta_prime=0.1,
                                       rng=FirstMatch())
        assert outcome.matched and outcome.attempts == 1 and outcome.action == 7

    def test_failure_rate_geometric_tail(self):
        rng = np.random.default_rng(0)
        n = 100_000
        fails = sum(not resample_until_match(lambda r: 0, 3, 9, 0.1, rng).matched
                    for _ in range(n))
        p = 2.0**-10
        assert fails / n <= p + 3 * math.sqrt(p * (1 - p) / n)

    def test_attempts_never_exceed_cap(self):
        rng = np.random.default_rng(1)
        for t in (1, 5, 40):
            cap = max_resample_attempts(t, 0.1)
            for _ in range(200):
                out = resample_until_match(lambda r: 0, 2, t, 0.1, rng)
                assert out.attempts <= cap
                if out.matched:
                    assert out.pseudo_action == 2


class TestPseudoRewards:
    def test_perfect_imputation_noiseless(self, rng):
        X = random_context_matrix(rng, 3, 5)
        cs = build_context_set(X)
        theta = rng.standard_normal((3, 1)) * 0.4
        action = 1
        xt = np.vstack([cs.scaled_basis, cs.contexts[:, action]])
        observed = (cs.contexts[:, action] @ theta).ravel()
        table = pseudo_rewards(theta, xt, pseudo_action=3, observed=observed)
        assert np.abs(table - xt @ theta).max() < 1e-12

    def test_zero_imputation_plugin(self):
        cs = build_context_set(np.eye(2))
        xt = np.vstack([cs.scaled_basis, cs.contexts[:, 0]])
        table = pseudo_rewards(np.zeros((2, 1)), xt, pseudo_action=2,
                               observed=np.array([0.8]))
        assert table[2, 0] == pytest.approx(1.6)
        assert np.allclose(table[:2], 0.0)

    def test_dr_unbiasedness_any_imputation(self, rng):
        """Monte Carlo over the pseudo-action without conditioning on the
        matching: every row's mean equals its context's true mean even under
        an arbitrary fixed imputation."""
        X = random_context_matrix(rng, 3, 6)
        cs = build_context_set(X)
        theta = rng.standard_normal((3, 1)) * 0.5
        theta_imp = rng.uniform(-1, 1, size=(3, 1))  # arbitrary bounded imputation
        sigma = 0.2
        action = 4
        d = 3
        xt = np.vstack([cs.scaled_basis, cs.contexts[:, action]])
        targets = (xt @ theta).ravel()
        n = 120_000
        draw = np.random.default_rng(3)
        pseudo = np.array([draw_pseudo_action(d, draw) for _ in range(n)])
        noise = sigma * draw.standard_normal((n, 6))
        arm_rewards = X.T @ theta + noise[..., None].reshape(n, 6, 1)
        tables = np.empty((n, d + 1))
        base = (xt @ theta_imp).ravel()
        pmf = pseudo_action_pmf(d)
        for s in range(n):
            i = pseudo[s]
            if i == d:
                y_i = float(arm_rewards[s, action, 0])
            else:
                y_i = float(cs.right_vectors[i] @ arm_rewards[s, :, 0])
            row = base.copy()
            row[i] += (y_i - base[i]) / pmf[i]
            tables[s] = row
        mean = tables.mean(axis=0)
        sd = tables.std(axis=0, ddof=1)
        assert np.all(np.abs(mean - targets) <= 4 * sd / np.sqrt(n))

    def test_matches_pseudo_rewards_helper(self, rng):
        """The helper reproduces the hand-rolled formula row for the drawn slot."""
        cs = build_context_set(random_context_matrix(rng, 2, 4))
        theta_imp = rng.standard_normal((2, 1))
        xt = np.vstack([cs.scaled_basis, cs.contexts[:, 1]])
        y = np.array([0.37])
        for i in (0, 1, 2):
            table = pseudo_rewards(theta_imp, xt, i, y)
            base = xt @ theta_imp
            pi = 0.5 if i == 2 else 0.25
            assert table[i, 0] == pytest.approx(base[i, 0] + (0.37 - base[i, 0]) / pi)


class TestDrMixUpdates:
    def test_d1_single_matched_round(self):
        cs = build_context_set(np.array([[1.0]]))
        state = DrMixState(1, 1)
        xt = np.vstack([cs.scaled_basis, cs.contexts[:, 0]])
        yhat = np.array([[0.5], [0.9]])
        state.update_matched(xt, yhat)
        # gram = 1 + 1^2 + 1^2 = 3; moment = 0.5 + 0.9
        assert state.solve()[0, 0] == pytest.approx((0.5 + 0.9) / 3.0)
        assert state.matched_rounds == 1

    def test_bundle_dr_update_gram_structure(self, rng):
        X = random_context_matrix(rng, 3, 5)
        cs = build_context_set(X)
        bundle = EstimatorBundle(cs, 1, delta=0.1)
        bundle.ledger.force_exploration(1, 2)
        bundle.absorb(1, True, 0, 2, 2, np.array([1.0]))
        bundle.dr_update(2, np.array([1.0]))
        expect = np.eye(3) + cs.gram_sum + np.outer(X[:, 2], X[:, 2])
        assert np.abs(bundle.dr["mixed"].gram - expect).max() < 1e-10


class TestEstimatorBundle:
    def test_ridge_imputation_variant_tracked(self, rng):
        cs = build_context_set(np.eye(3))
        bundle = EstimatorBundle(cs, 1, delta=0.1, imputations=("mixed", "ridge"))
        assert bundle.ridge is not None
        bundle.ledger.force_exploration(1, 0)
        bundle.absorb(1, True, 0, 0, 0, np.array([1.0]))
        bundle.dr_update(0, np.array([1.0]))
        assert bundle.dr["mixed"].matched_rounds == 1
        assert bundle.dr["ridge"].matched_rounds == 1

    def test_unmatched_round_skips_mix_when_flagged(self):
        cs = build_context_set(np.eye(2))
        for flag, expected_updates in ((True, 2), (False, 1)):
            bundle = EstimatorBundle(cs, 1, delta=0.1, mix_unmatched=flag)
            bundle.ledger.force_exploration(1, 0)
            bundle.absorb(1, True, 0, 0, 0, np.array([1.0]))
            before = bundle.mixed.gram.copy()
            bundle.absorb(2, False, 0, 0, 1, np.array([0.5]),
                          weights=(1.0, 0.0), matched=False)
            changed = not np.allclose(bundle.mixed.gram, before)
            assert changed == (expected_updates == 2)
