"""Deterministic random-stream plumbing: one base seed fans out into named
substreams per replication so environment noise, algorithm draws, mixing
weights, and resampling can each be replayed independently."""

from __future__ import annotations

import numpy as np

ROLES = ("environment", "algorithm", "weights", "resampling", "baseline")


def replication_seeds(base_seed: int, replication: int) -> dict[str, np.random.SeedSequence]:
    """Counter-based per-replication seeds (base + index), split by role."""
    root = np.random.SeedSequence(base_seed + replication)
    return dict(zip(ROLES, root.spawn(len(ROLES))))


def rng_for(seeds: dict, role: str) -> np.random.Generator:
    """Fresh generator for a role; repeated calls replay the same stream."""
    return np.random.default_rng(seeds[role])


def pfiwr_streams(seeds: dict) -> dict[str, np.random.Generator]:
    return {role: rng_for(seeds, role) for role in ("environment", "algorithm", "weights", "resampling")}


def multipfi_streams(seeds: dict) -> dict[str, np.random.Generator]:
    # paired comparisons share the environment seed but not algorithm streams
    return {"environment": rng_for(seeds, "environment"),
            "algorithm": rng_for(seeds, "baseline")}
