"""Pareto front identification for linear bandits: estimation with recycled
exploration samples and doubly-robust corrections, the identification
algorithm with regret minimization, a successive-elimination baseline, and a
reproducible experiment harness."""

__version__ = "0.1.0"

from .contexts import (ContextSet, DesignMatrix, NormViolation, RankDeficient,
                       ZeroBasis, build_context_set, design_norm, load_contexts_csv,
                       reward_reweight, sample_basis_action)
from .pareto import (GapProfile, LengthMismatch, M_gap, gap_profile, m_gap,
                     pareto_front, pareto_regret, regret_lower_bound,
                     sample_lower_bound, success_check)
from .environments import (ClusteredEnvironment, ClusteredMabEnvironment,
                           DegenerateColumn, LinearEnvironment, RewardModel,
                           generate_surrogate_rewards, load_clustered, make_mab,
                           pull_clustered, pull_linear)
from .estimators import (DrMixState, EstimatorBundle, ExplorationLedger,
                         MatchOutcome, MixedRegressionState, NoExplorationSample,
                         RidgeState, THEORY_GAMMA_C, draw_mix_weights,
                         draw_pseudo_action, gamma_t, max_resample_attempts,
                         mix_sample, pseudo_rewards, resample_until_match,
                         warmup_round)
from .pfiwr import (PfiState, PfiwrConfig, RunRecord, RunResult,
                    confidence_bound, confidence_radii, eliminate, gap_estimates)
from .pfiwr import run as run_pfiwr
from .multipfi import MabEstimate, MultiPfiConfig, NotMab, run_multipfi
from .config import ConfigError, EnvironmentSpec, ExperimentConfig, build_environment, load_config
from .harness import AggregateMetrics, run_experiment
from .seeding import replication_seeds, pfiwr_streams, multipfi_streams
