"""Python bindings for the banditlc simulator core."""

from banditlc._core import (  # noqa: F401
    DistortionSpec,
    LcbConfig,
    ReconDistribution,
    SourceModel,
    TypeVector,
    blahut_arimoto_fixed_distortion,
    build_net,
    expected_bits,
    expected_bits_given_x,
    expected_log_given_x_integral,
    gamma_and_epsilon,
    kl_divergence_bits,
    match_probability,
    metric_mu,
    min_match_probability,
    nts_regret_bound,
    optimal_action_and_gaps,
    regret_bound_thm1,
    run_experiment,
    run_lcb_episode,
)

__all__ = [
    "DistortionSpec",
    "LcbConfig",
    "ReconDistribution",
    "SourceModel",
    "TypeVector",
    "blahut_arimoto_fixed_distortion",
    "build_net",
    "expected_bits",
    "expected_bits_given_x",
    "expected_log_given_x_integral",
    "gamma_and_epsilon",
    "kl_divergence_bits",
    "match_probability",
    "metric_mu",
    "min_match_probability",
    "nts_regret_bound",
    "optimal_action_and_gaps",
    "regret_bound_thm1",
    "run_experiment",
    "run_lcb_episode",
]
