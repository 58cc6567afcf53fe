"""Self-contained invariant suite over seeded fixtures, runnable from the CLI
without a test framework installed."""

from __future__ import annotations

import numpy as np

from .contexts import build_context_set, design_norms_sq
from .estimators import (DrMixState, MixedRegressionState, RidgeState,
                         resample_until_match)
from .environments import make_mab
from .pareto import gap_profile, m_gap, pareto_front
from .pfiwr import PfiwrConfig, run as run_pfiwr
from .environments import LinearEnvironment
from .seeding import pfiwr_streams, replication_seeds


def _random_context_set(rng, d, K):
    X = rng.standard_normal((d, K))
    X /= np.linalg.norm(X, axis=0) * rng.uniform(1.0, 2.0, size=K)
    return build_context_set(X)


def check_context_decomposition(rng) -> str | None:
    for _ in range(20):
        d = int(rng.integers(2, 6))
        K = int(rng.integers(d, 13))
        cs = _random_context_set(rng, d, K)
        X = cs.contexts
        recon = (cs.left_vectors * cs.singular_values) @ cs.right_vectors
        if np.linalg.norm(recon - X) > 1e-10 * max(1.0, np.linalg.norm(X)):
            return "reconstruction residual too large"
        if np.abs(cs.basis_pmfs.sum(axis=1) - 1.0).max() > 1e-12:
            return "basis pmf does not sum to 1"
        if np.abs(cs.left_vectors.T @ cs.left_vectors - np.eye(d)).max() > 1e-10:
            return "left vectors not orthonormal"
        theta = rng.standard_normal(d)
        for i in range(d):
            signs = np.where(cs.right_vectors[i] >= 0, 1.0, -1.0)
            expect = (cs.basis_pmfs[i] * cs.v_l1_norms[i] * signs) @ (X.T @ theta)
            target = cs.scaled_basis[i] @ theta
            if abs(expect - target) > 1e-10:
                return "basis expectation identity failed"
        gram = (cs.left_vectors * cs.singular_values**2) @ cs.left_vectors.T
        if np.abs(gram - cs.gram_sum).max() > 1e-10:
            return "spectral gram identity failed"
    return None


def check_norm_bounds(rng) -> str | None:
    for _ in range(10):
        d = int(rng.integers(2, 6))
        K = int(rng.integers(d, 13))
        cs = _random_context_set(rng, d, K)
        for eps in (1e-8, 1e-4, 1.0):
            M = np.linalg.inv(cs.gram_sum + eps * np.eye(d))
            vals = np.einsum("ik,ij,jk->k", cs.contexts, M, cs.contexts)
            if vals.max() > 1.0 + 1e-9:
                return f"normalized norm exceeded 1 at eps={eps}"
        prev = None
        for t in (1, 2, 5, 10, 50):
            norms = np.sqrt(design_norms_sq(cs, t))
            if norms.max() > 1.0 / np.sqrt(t) + 1e-12:
                return "design norm exceeded t^(-1/2)"
            if prev is not None and np.any(norms > prev + 1e-12):
                return "design norm not nonincreasing"
            prev = norms
    return None


def check_pareto_oracle(rng) -> str | None:
    for _ in range(50):
        K = int(rng.integers(2, 20))
        L = int(rng.integers(1, 5))
        Y = rng.standard_normal((K, L))
        front = set(pareto_front(Y))
        brute = set()
        for k in range(K):
            dominated = False
            for j in range(K):
                if j != k and np.all(Y[j] >= Y[k]) and np.any(Y[j] > Y[k]):
                    dominated = True
                    break
            if not dominated:
                brute.add(k)
        if front != brute:
            return "front mismatch with brute force"
        profile = gap_profile(Y)
        for k in range(K):
            direct = max(m_gap(Y[k], Y[j]) for j in brute)
            if abs(profile.delta_star[k] - direct) > 1e-12:
                return "delta_star mismatch"
    return None


def check_estimator_recursions(rng) -> str | None:
    d, L, n = 4, 2, 60
    for state, reg in ((MixedRegressionState(d, L), 0.5), (RidgeState(d, L), 1.0),
                       (DrMixState(d, L), 1.0)):
        xs = rng.standard_normal((n, d))
        ys = rng.standard_normal((n, L))
        for x, y in zip(xs, ys):
            state.update(x, y)
        gram = reg * np.eye(d) + xs.T @ xs
        moment = xs.T @ ys
        if np.abs(state.gram - gram).max() > 1e-8:
            return "gram recursion mismatch"
        if np.abs(state.moment - moment).max() > 1e-8:
            return "moment recursion mismatch"
        expect = np.linalg.solve(gram, moment)
        if np.abs(state.solve() - expect).max() > 1e-8:
            return "solution mismatch"
    return None


def check_ledger_invariants(rng) -> str | None:
    cs, model = make_mab(rng.standard_normal((4, 2)), sigma=0.1)
    env = LinearEnvironment(cs=cs, model=model)
    cfg = PfiwrConfig(gamma_c=0.05, max_rounds=400, keep_history=True)
    seeds = replication_seeds(int(rng.integers(2**31 - 1)), 0)
    result = run_pfiwr(env, 0.3, 0.1, cfg, pfiwr_streams(seeds))
    first_seen = {}
    for rec in result.history:
        if rec.check_arm not in first_seen:
            first_seen[rec.check_arm] = rec.phase
        if rec.phase == "explore" and rec.action != rec.check_arm:
            return "exploration round played a different arm than drawn"
    if any(phase != "explore" for phase in first_seen.values()):
        return "first draw of an arm did not explore"
    return None


def check_resampling(rng) -> str | None:
    outcome = resample_until_match(lambda r: 0, d=3, t=9, delta_prime=0.1, rng=rng)
    if outcome.attempts > 10:
        return "attempt cap exceeded"
    fails = 0
    trials = 2000
    for _ in range(trials):
        out = resample_until_match(lambda r: 0, d=3, t=9, delta_prime=0.1, rng=rng)
        fails += not out.matched
    # failure probability 2^-10; allow generous slack
    if fails > 10:
        return f"unexpectedly many coupling failures: {fails}/{trials}"
    return None


CHECKS = [
    ("context-decomposition", check_context_decomposition),
    ("normalized-norm-bounds", check_norm_bounds),
    ("pareto-brute-force", check_pareto_oracle),
    ("estimator-recursions", check_estimator_recursions),
    ("exploration-ledger", check_ledger_invariants),
    ("resampling-cap", check_resampling),
]


def run_validation(seed: int = 0) -> list[tuple[str, str | None]]:
    rng = np.random.default_rng(seed)
    return [(name, fn(rng)) for name, fn in CHECKS]
