import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def brute_force_front(Y):
    """O(K^2 L) double-loop reference for the Pareto front."""
    Y = np.asarray(Y, dtype=float)
    K = Y.shape[0]
    front = []
    for k in range(K):
        dominated = False
        for j in range(K):
            if j == k:
                continue
            if np.all(Y[j] >= Y[k]) and np.any(Y[j] > Y[k]):
                dominated = True
                break
        if not dominated:
            front.append(k)
    return front


def grid_m(y_k, y_j, step=1e-4):
    """Definitional minimization for the domination margin: the smallest alpha
    on a grid such that some component of y_k + alpha reaches y_j."""
    y_k = np.asarray(y_k, dtype=float)
    y_j = np.asarray(y_j, dtype=float)
    hi = max(0.0, float(np.max(y_j - y_k))) + step
    for alpha in np.arange(0.0, hi + step, step):
        if np.any(y_k + alpha >= y_j):
            return alpha
    return hi


def grid_M(y_k, y_j, step=1e-4):
    """Definitional minimization for the weak-domination deficit."""
    y_k = np.asarray(y_k, dtype=float)
    y_j = np.asarray(y_j, dtype=float)
    hi = max(0.0, float(np.max(y_k - y_j))) + step
    for alpha in np.arange(0.0, hi + step, step):
        if np.all(y_k <= y_j + alpha):
            return alpha
    return hi


def random_context_matrix(rng, d, K, max_norm=1.0):
    """Random full-rank d x K context matrix with column norms <= max_norm."""
    while True:
        X = rng.standard_normal((d, K))
        X /= np.linalg.norm(X, axis=0) / (max_norm * rng.uniform(0.3, 1.0, size=K))
        if np.linalg.matrix_rank(X) == d:
            return X
