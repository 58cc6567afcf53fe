"""Multi-objective ground truth: dominance gaps, the Pareto front, per-arm
accuracy requirements, Pareto regret, the identification success condition,
and closed-form lower-bound evaluators used as diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LengthMismatch(ValueError):
    """Compared reward vectors have different lengths."""


def m_gap(y_k, y_j) -> float:
    """Smallest uniform lift of ``y_k`` after which some component reaches ``y_j``.

    Equals ``max(0, min_l(y_j[l] - y_k[l]))``; positive iff ``y_k`` is strictly
    below ``y_j`` in every component.
    """
    y_k = np.asarray(y_k, dtype=float)
    y_j = np.asarray(y_j, dtype=float)
    if y_k.shape != y_j.shape:
        raise LengthMismatch(f"shapes {y_k.shape} vs {y_j.shape}")
    return float(max(0.0, np.min(y_j - y_k)))


def M_gap(y_k, y_j) -> float:
    """Smallest uniform lift of ``y_j`` after which it weakly dominates ``y_k``.

    Equals ``max(0, max_l(y_k[l] - y_j[l]))``; zero iff ``y_k`` is already
    weakly dominated by ``y_j``.
    """
    y_k = np.asarray(y_k, dtype=float)
    y_j = np.asarray(y_j, dtype=float)
    if y_k.shape != y_j.shape:
        raise LengthMismatch(f"shapes {y_k.shape} vs {y_j.shape}")
    return float(max(0.0, np.max(y_k - y_j)))


def dominance_matrix(Y: np.ndarray) -> np.ndarray:
    """Boolean K x K matrix; entry (k, j) is True iff arm j strictly dominates arm k.

    Strict dominance requires >= in every component and > in at least one, so
    identical rows never dominate each other.
    """
    Y = np.asarray(Y, dtype=float)
    weakly = (Y[None, :, :] >= Y[:, None, :]).all(axis=-1)  # (k, j): y_j >= y_k everywhere
    strictly = (Y[None, :, :] > Y[:, None, :]).any(axis=-1)
    return weakly & strictly


def pareto_front(Y: np.ndarray) -> tuple[int, ...]:
    """Indices of arms whose mean vector is not strictly dominated by any other arm."""
    dom = dominance_matrix(Y)
    return tuple(int(k) for k in np.flatnonzero(~dom.any(axis=1)))


@dataclass(frozen=True)
class GapProfile:
    """Per-arm gap quantities of a fixed mean-reward table.

    ``delta_star`` is the sub-optimality distance (zero exactly on the front).
    ``delta_plus`` / ``delta_minus`` are the front-arm separation requirements;
    they are +inf for suboptimal arms and when the defining index set is empty.
    ``delta`` is the required estimation accuracy per arm.
    """

    delta_star: np.ndarray
    delta_plus: np.ndarray
    delta_minus: np.ndarray
    delta: np.ndarray
    pareto_front: tuple[int, ...]

    @property
    def has_zero_gaps(self) -> bool:
        """True when some required accuracy degenerates to zero (tied mean vectors)."""
        return bool(np.any(self.delta <= 0.0))


def gap_profile(Y: np.ndarray) -> GapProfile:
    """Compute all gap quantities for a K x L table of mean reward vectors."""
    Y = np.asarray(Y, dtype=float)
    K = Y.shape[0]
    front = pareto_front(Y)
    front_mask = np.zeros(K, dtype=bool)
    front_mask[list(front)] = True

    # pairwise tables: m[k, j] = m_gap(y_k, y_j), M[k, j] = M_gap(y_k, y_j)
    diff = Y[None, :, :] - Y[:, None, :]  # (k, j, l): y_j - y_k
    m_tab = np.maximum(0.0, diff.min(axis=-1))
    M_tab = np.maximum(0.0, (-diff).max(axis=-1))

    delta_star = m_tab[:, front_mask].max(axis=1) if front else np.zeros(K)

    delta_plus = np.full(K, np.inf)
    delta_minus = np.full(K, np.inf)
    sub = np.flatnonzero(~front_mask)
    for k in front:
        others = [j for j in front if j != k]
        if others:
            delta_plus[k] = min(min(M_tab[k, j], M_tab[j, k]) for j in others)
        if sub.size:
            delta_minus[k] = float(np.min(M_tab[sub, k] + delta_star[sub]))

    delta = np.where(front_mask, np.minimum(delta_plus, delta_minus), delta_star)
    return GapProfile(delta_star, delta_plus, delta_minus, delta, front)


def pareto_regret(k: int, Y: np.ndarray) -> float:
    """Instantaneous regret of playing arm ``k``: its sub-optimality distance."""
    Y = np.asarray(Y, dtype=float)
    front = pareto_front(Y)
    return float(max(m_gap(Y[k], Y[j]) for j in front))


def success_check(P, Y: np.ndarray, eps: float) -> bool:
    """True iff ``P`` contains the whole front and every extra arm is eps-near it."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    Y = np.asarray(Y, dtype=float)
    out = set(int(k) for k in P)
    profile = gap_profile(Y)
    front = set(profile.pareto_front)
    if not front.issubset(out):
        return False
    return all(profile.delta_star[k] <= eps for k in out - front)


def sample_lower_bound(profile: GapProfile, sigma: float, L: int, delta: float,
                       eps: float, d: int) -> float:
    """Information-theoretic floor on rounds needed for eps/delta identification.

    Uses the d smallest required accuracies, each clamped below at eps:
    (sigma^2 / 3) * sum_{k<=d} clamp(gap_(k))^-2 * log(3L / (4 delta)).
    Diagnostic only.
    """
    if not 0 < delta < 0.25:
        raise ValueError("delta must lie in (0, 1/4)")
    gaps = np.sort(np.maximum(profile.delta, eps))[:d]
    return float((sigma**2 / 3.0) * np.sum(gaps**-2.0) * np.log(3.0 * L / (4.0 * delta)))


def regret_lower_bound(delta_star_eps: float, sigma: float, d: int, delta: float) -> float:
    """Floor on cumulative regret of any identification-guaranteeing strategy:
    sqrt(3) d sigma / (8 delta_star_eps) * log(1 / (4 delta)). Diagnostic only."""
    if not 0 < delta < 0.25:
        raise ValueError("delta must lie in (0, 1/4)")
    if delta_star_eps <= 0:
        raise ValueError("delta_star_eps must be positive")
    return float(np.sqrt(3.0) * d * sigma / (8.0 * delta_star_eps) * np.log(1.0 / (4.0 * delta)))
