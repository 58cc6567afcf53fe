"""Flat key-value experiment configuration with typed validation, plus
environment construction from the parsed spec."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .environments import (ClusteredMabEnvironment, LinearEnvironment, RewardModel,
                           generate_surrogate_rewards, load_clustered,
                           load_rewards_csv, make_mab)
from .contexts import build_context_set, load_contexts_csv

EXPERIMENTS = ("estimator-consistency", "density", "dr-imputation", "pfi-compare", "custom")


class ConfigError(ValueError):
    """Malformed or out-of-range configuration input."""


@dataclass(frozen=True)
class EnvironmentSpec:
    kind: str = "mab"              # linear | mab | clustered
    sigma: float = 0.1
    theta: str | None = None       # inline rows "a,b;c,d" or @path (linear)
    means: str | None = None       # inline rows or @path (mab)
    contexts: str | None = None    # @path, one row per arm (linear)
    data: str = "surrogate"        # @path to N x L reward CSV, or "surrogate"
    clusters: int = 16
    surrogate_n: int = 1024
    within_std: float = 0.1
    sigma_bound: float | None = None  # noise scale handed to confidence bounds
    noise_kind: str = "gaussian"
    seed: int = 0                  # clustering / surrogate construction seed


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "estimator-consistency"
    env: EnvironmentSpec = field(default_factory=EnvironmentSpec)
    algorithms: tuple = ("pfiwr", "multipfi")
    eps_list: tuple = (0.06, 0.08, 0.10, 0.12, 0.14, 0.16, 0.18)
    delta: float = 0.1
    replications: int = 200
    grid_replications: int = 40    # replications for non-primary eps values
    base_seed: int = 0
    gamma_c: float = 1.0
    max_rounds: int = 100_000
    n_rounds: int = 2000           # scheduled estimator experiments
    switch_round: int = 50
    checkpoints: tuple = (50, 500, 2000)
    curve_eps: tuple | None = None  # eps values with emitted regret curves
    round_log_reps: tuple = (0,)
    out_dir: str = "out"
    workers: int = 1

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.replications < 1 or self.grid_replications < 1:
            raise ConfigError("replication counts must be >= 1")
        if not all(e > 0 for e in self.eps_list):
            raise ConfigError("eps values must be positive")
        if not 0.0 < self.delta < 1.0:
            raise ConfigError("delta must lie in (0, 1)")
        if self.gamma_c <= 0:
            raise ConfigError("gamma_c must be positive")
        if self.max_rounds < 1 or self.n_rounds < 1:
            raise ConfigError("round counts must be >= 1")
        if self.env.kind not in ("linear", "mab", "clustered"):
            raise ConfigError(f"unknown environment kind {self.env.kind!r}")
        if self.env.sigma < 0:
            raise ConfigError("sigma must be nonnegative")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        return self


# experiment-specific defaults layered under user keys; the comparison
# experiment runs with a small exploration constant because the theory value
# would keep every desk-scale round exploratory (see README)
_EXPERIMENT_DEFAULTS = {
    "estimator-consistency": dict(replications=200, n_rounds=2000,
                                  env=EnvironmentSpec(kind="mab", sigma=0.1, means="1;-1;-1")),
    "density": dict(replications=200, n_rounds=2000,
                    env=EnvironmentSpec(kind="mab", sigma=0.1, means="1;-1;-1")),
    "dr-imputation": dict(replications=200, n_rounds=2000,
                          env=EnvironmentSpec(kind="mab", sigma=0.1, means="1;-1;-1")),
    "pfi-compare": dict(replications=200, gamma_c=0.005, max_rounds=100_000,
                        env=EnvironmentSpec(kind="clustered")),
    "custom": dict(),
}


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


def _parse_floats(s: str) -> tuple:
    return tuple(float(x) for x in s.split(",") if x.strip() != "")


def _parse_ints(s: str) -> tuple:
    return tuple(int(x) for x in s.split(",") if x.strip() != "")


def _parse_strs(s: str) -> tuple:
    return tuple(x.strip() for x in s.split(",") if x.strip() != "")


_KEY_PARSERS = {
    "experiment": str,
    "algorithms": _parse_strs,
    "eps": _parse_floats,
    "delta": float,
    "reps": int,
    "grid_reps": int,
    "seed": int,
    "gamma_c": float,
    "max_rounds": int,
    "n_rounds": int,
    "switch_round": int,
    "checkpoints": _parse_ints,
    "curve_eps": _parse_floats,
    "round_log_reps": _parse_ints,
    "out": str,
    "workers": int,
    "env.kind": str,
    "env.sigma": float,
    "env.theta": str,
    "env.means": str,
    "env.contexts": str,
    "env.data": str,
    "env.clusters": int,
    "env.surrogate_n": int,
    "env.within_std": float,
    "env.sigma_bound": float,
    "env.noise_kind": str,
    "env.seed": int,
}

_KEY_TO_FIELD = {
    "eps": "eps_list", "reps": "replications", "grid_reps": "grid_replications",
    "seed": "base_seed", "out": "out_dir",
}


def parse_config_text(text: str) -> dict:
    """Parse `key = value` lines; '#' starts a comment, blank lines ignored."""
    values = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _KEY_PARSERS:
            raise ConfigError(f"line {ln}: unknown key {key!r}")
        try:
            values[key] = _KEY_PARSERS[key](val)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"line {ln}: bad value for {key!r}: {exc}") from exc
    return values


def build_config(values: dict) -> ExperimentConfig:
    """Assemble an ExperimentConfig from parsed key-values, layering the
    experiment's defaults under the user's keys."""
    experiment = values.get("experiment", "estimator-consistency")
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    cfg = ExperimentConfig(experiment=experiment)
    cfg = replace(cfg, **_EXPERIMENT_DEFAULTS[experiment])

    env_kwargs = {}
    cfg_kwargs = {}
    for key, val in values.items():
        if key == "experiment":
            continue
        if key.startswith("env."):
            env_kwargs[key[4:]] = val
        else:
            cfg_kwargs[_KEY_TO_FIELD.get(key, key)] = val
    if env_kwargs:
        cfg = replace(cfg, env=replace(cfg.env, **env_kwargs))
    if cfg_kwargs:
        cfg = replace(cfg, **cfg_kwargs)
    return cfg.validate()


def load_config(path=None, overrides: dict | None = None) -> ExperimentConfig:
    values = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            values = parse_config_text(fh.read())
    for key, val in (overrides or {}).items():
        if key not in _KEY_PARSERS:
            raise ConfigError(f"unknown key {key!r}")
        values[key] = _KEY_PARSERS[key](val) if isinstance(val, str) else val
    return build_config(values)


def parse_matrix(spec: str) -> np.ndarray:
    """Inline matrix 'a,b;c,d' (rows ';', columns ',') or '@path' to a CSV."""
    if spec.startswith("@"):
        rows = np.genfromtxt(spec[1:], delimiter=",")
        return np.atleast_2d(rows)
    return np.array([[float(x) for x in row.split(",")]
                     for row in spec.split(";") if row.strip() != ""])


def build_environment(spec: EnvironmentSpec):
    """Construct the runnable environment an EnvironmentSpec describes."""
    if spec.kind == "mab":
        if spec.means is None:
            raise ConfigError("mab environment needs env.means")
        means = parse_matrix(spec.means)
        cs, model = make_mab(means, spec.sigma, noise_kind=spec.noise_kind)
        return LinearEnvironment(cs=cs, model=model)
    if spec.kind == "linear":
        if spec.theta is None or spec.contexts is None:
            raise ConfigError("linear environment needs env.theta and env.contexts")
        X = load_contexts_csv(spec.contexts.lstrip("@"))
        theta = parse_matrix(spec.theta)
        if theta.shape[0] != X.shape[0]:
            raise ConfigError(
                f"theta has {theta.shape[0]} rows but contexts have dimension {X.shape[0]}")
        cs = build_context_set(X)
        theta_max = float(np.linalg.norm(theta, axis=0).max())
        model = RewardModel(theta=theta, theta_max=theta_max, sigma=spec.sigma,
                            noise_kind=spec.noise_kind)
        return LinearEnvironment(cs=cs, model=model)
    if spec.kind == "clustered":
        rng = np.random.default_rng(spec.seed)
        if spec.data == "surrogate":
            rows = generate_surrogate_rewards(spec.surrogate_n, spec.clusters,
                                              spec.within_std, rng)
        else:
            rows = load_rewards_csv(spec.data.lstrip("@"))
        clustered = load_clustered(rows, spec.clusters, rng)
        return ClusteredMabEnvironment.from_clusters(clustered, sigma=spec.sigma_bound)
    raise ConfigError(f"unknown environment kind {spec.kind!r}")
