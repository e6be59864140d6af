"""
Stochastic contraction toolkit
Author: Jay Guwalani

Contraction certificates for Ito SDEs, mean-square bounds between
trajectories, certificate combination rules and Monte-Carlo verification.
"""

from .errors import (StoconError, NonFiniteError, ConfigError, NotPositiveDefiniteError, NotSymmetricError,
                     SingularThetaError, MetricMismatchError, NonConstantMetricError,
                     MissingCouplingBoundError, DimensionMismatchError, LaplacianNotDiffusiveError)
from .core import (SdeSystem, Metric, MetricKind, DomainBox, Provenance, ContractionCertificate,
                   make_identity_metric, make_constant_metric, make_time_varying_metric,
                   block_diagonal_metric, validate_system, validate_metric)
from .sim import (SimConfig, PairMode, EnsemblePairStats, ObservableStats, em_step, increment_stream,
                  simulate_path, simulate_pair, simulate_pair_noisefree_vs_noisy, ensemble_pair_stats,
                  ensemble_observable_stats, fixed_pair, fixed_state)
from .analysis import (BoundEnvelope, TailBound, VerificationReport, ObservableReport, estimate_rate,
                       estimate_noise_bound, certify, generator_value, ms_bound, ms_bound_from_initial_samples,
                       t_epsilon, markov_tail, finite_time_supermartingale_tail, gronwall_envelope, verify_envelope,
                       verify_against_oracle, verify_observable, verify_generator_inequality, ou_exact_msd)
from .combine import (CouplingSpec, SuperpositionWeights, combine_parallel, combine_feedback,
                      combine_hierarchical, combine_small_gain, small_gain_estimate, check_feedback_structure)

__version__ = "1.0.0"
__author__ = "Jay Guwalani"
