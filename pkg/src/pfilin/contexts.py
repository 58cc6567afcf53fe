"""Fixed context matrix, its reduced SVD, the per-basis action sampling
distributions, and deterministic design-matrix norms used by confidence bounds."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-9


class RankDeficient(ValueError):
    """Context matrix does not span the full d-dimensional space."""


class NormViolation(ValueError):
    """A context column exceeds the unit-norm bound."""


class ZeroBasis(ValueError):
    """Requested basis direction has an all-zero right vector."""


@dataclass(frozen=True)
class ContextSet:
    """Immutable bundle of the K contexts and their spectral decomposition.

    ``contexts`` is d x K with arms as columns.  ``left_vectors`` (d x d,
    columns) are orthonormal, ``right_vectors`` (d x K, rows) and
    ``singular_values`` complete the decomposition X = sum_i s_i u_i v_i^T.
    The gram matrix satisfies sum_k x_k x_k^T = sum_i s_i^2 u_i u_i^T, so the
    gram eigenvalues are the squared singular values.  ``basis_pmfs`` row i is
    the sampling distribution |v_ik| / ||v_i||_1 and ``scaled_basis`` row i is
    s_i * u_i, the context realized in expectation by a reweighted draw from
    that row's distribution.
    """

    contexts: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    singular_values: np.ndarray
    basis_pmfs: np.ndarray
    v_l1_norms: np.ndarray
    scaled_basis: np.ndarray
    gram_sum: np.ndarray
    # eigendecomposition of gram_sum, cached for O(dK) design norms at any round
    _gram_eigvals: np.ndarray = field(repr=False, default=None)
    _gram_proj: np.ndarray = field(repr=False, default=None)
    _pmf_cumsum: np.ndarray = field(repr=False, default=None)

    @property
    def d(self) -> int:
        return self.contexts.shape[0]

    @property
    def n_arms(self) -> int:
        return self.contexts.shape[1]

    @property
    def gram_eigenvalues(self) -> np.ndarray:
        return self.singular_values**2


def build_context_set(X) -> ContextSet:
    """Validate and decompose a d x K context matrix.

    Columns must have Euclidean norm at most 1 (tolerance 1e-9) and the matrix
    must have full row rank d; rank deficiency is rejected rather than handled
    downstream.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("context matrix must be 2-dimensional (d x K)")
    d, K = X.shape
    if K < d:
        raise RankDeficient(f"need at least d={d} arms to span the space, got {K}")
    col_norms = np.linalg.norm(X, axis=0)
    worst = int(np.argmax(col_norms))
    if col_norms[worst] > 1.0 + NORM_TOL:
        raise NormViolation(f"column {worst} has norm {col_norms[worst]:.6g} > 1")

    U, S, Vt = np.linalg.svd(X, full_matrices=False)
    rank_tol = d * np.finfo(float).eps * S[0] if S[0] > 0 else 0.0
    if S.size < d or S[-1] <= rank_tol:
        raise RankDeficient(f"numerical rank < d={d} (smallest singular value {S[-1]:.3g})")

    v_l1 = np.abs(Vt).sum(axis=1)
    # positive singular values force nonzero right vectors, so this never divides by 0
    pmfs = np.abs(Vt) / v_l1[:, None]
    scaled_basis = S[:, None] * U.T

    gram = X @ X.T
    eigvals, eigvecs = np.linalg.eigh(gram)
    return ContextSet(
        contexts=X,
        left_vectors=U,
        right_vectors=Vt,
        singular_values=S,
        basis_pmfs=pmfs,
        v_l1_norms=v_l1,
        scaled_basis=scaled_basis,
        gram_sum=gram,
        _gram_eigvals=eigvals,
        _gram_proj=eigvecs.T @ X,  # (d, K): coordinates of each arm in the eigenbasis
        _pmf_cumsum=np.cumsum(pmfs, axis=1),
    )


def load_contexts_csv(path, d: int | None = None) -> np.ndarray:
    """Read a context matrix from CSV (one row per arm, d float columns).

    Returns the d x K matrix (arms as columns).  A non-numeric first row is
    treated as a header.  When ``d`` is given the column count is validated.
    """
    rows = np.genfromtxt(path, delimiter=",", skip_header=0)
    if rows.ndim == 1:
        rows = rows[None, :]
    if np.isnan(rows[0]).any():  # header row
        rows = rows[1:]
    if np.isnan(rows).any():
        raise ValueError(f"non-numeric entries in context CSV {path}")
    if d is not None and rows.shape[1] != d:
        raise ValueError(f"context CSV has {rows.shape[1]} columns, expected d={d}")
    return rows.T.copy()


def sample_basis_action(cs: ContextSet, i: int, rng: np.random.Generator) -> int:
    """Draw an arm index from basis distribution i (inverse-CDF on one uniform)."""
    k = int(np.searchsorted(cs._pmf_cumsum[i], rng.random(), side="right"))
    return min(k, cs.n_arms - 1)


def reward_reweight(cs: ContextSet, i: int, k: int, y):
    """Rescale a reward observed at arm ``k`` into an unbiased sample for basis i.

    Multiplies by ||v_i||_1 * sign(v_ik); the sign of an exactly-zero entry is
    taken as +1 (unobservable, since such arms have sampling probability 0).
    Accepts scalar or vector rewards.
    """
    if cs.v_l1_norms[i] == 0.0:
        raise ZeroBasis(f"basis {i} has an all-zero right vector")
    v = cs.right_vectors[i, k]
    sign = 1.0 if v >= 0 else -1.0
    return cs.v_l1_norms[i] * sign * np.asarray(y, dtype=float)


@dataclass(frozen=True)
class DesignMatrix:
    """Deterministic regularized design F_t = t * sum_k x_k x_k^T + I_d."""

    gram_sum: np.ndarray
    t: int

    def matrix(self) -> np.ndarray:
        d = self.gram_sum.shape[0]
        return self.t * self.gram_sum + np.eye(d)

    def norm_of(self, x) -> float:
        """The F_t^{-1}-weighted norm sqrt(x^T F_t^{-1} x)."""
        x = np.asarray(x, dtype=float)
        return float(np.sqrt(x @ np.linalg.solve(self.matrix(), x)))


def design_norm(cs: ContextSet, k: int, t: int) -> float:
    """||x_k|| in the F_t^{-1} metric; at most t^{-1/2} for t >= 1."""
    return float(np.sqrt(design_norms_sq(cs, t)[k]))


def design_norms_sq(cs: ContextSet, t: int) -> np.ndarray:
    """Squared F_t^{-1}-norms of every arm at once, via the cached eigenbasis."""
    scale = 1.0 / (t * cs._gram_eigvals + 1.0)
    return scale @ (cs._gram_proj**2)
