"""Networked belief dynamics with multiview observations.

A simulation library and CLI for groups of agents that fuse beliefs about a
finite hypothesis set over a directed network. Each agent keeps one belief
per signal type; a time step log-linearly aggregates neighbours' same-type
beliefs with the agent's own other-type beliefs, then applies a Bayesian
update with the fresh observation. The analysis layer predicts the limit of
the dynamics from the network's eigenvector centrality and a ledger of KL
divergences, without simulating.
"""

from .analysis import (
    AnalysisReport,
    build_report,
    condition_values,
    limit_objective,
    predicted_limit,
)
from .errors import ModelError
from .learning import (
    BeliefState,
    ConvergenceSpec,
    LearningProblem,
    ObservationBatch,
    Trajectory,
    aggregate,
    apply_step,
    bayes_update,
    init_beliefs,
    observation_streams,
    presample_observations,
    run,
    step,
)
from .network import (
    AugmentedNetwork,
    Network,
    StationaryDistribution,
    augment,
    augmented_stationary,
    stationary_distribution,
    validate_gamma,
    validate_network,
)
from .scenarios import (
    GridScenario,
    LocalizationCampaign,
    LocalizationScenario,
    MonteCarloSummary,
    monte_carlo,
)
from .signals import (
    Categorical,
    DivergenceLedger,
    Gaussian,
    HypothesisSpace,
    SignalModel,
    check_identifiability,
    divergence_ledger,
    kl_divergence,
    log_likelihood,
    sample,
    sample_series,
    well_specified,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "AugmentedNetwork",
    "BeliefState",
    "Categorical",
    "ConvergenceSpec",
    "DivergenceLedger",
    "Gaussian",
    "GridScenario",
    "HypothesisSpace",
    "LearningProblem",
    "LocalizationCampaign",
    "LocalizationScenario",
    "ModelError",
    "MonteCarloSummary",
    "Network",
    "ObservationBatch",
    "SignalModel",
    "StationaryDistribution",
    "Trajectory",
    "aggregate",
    "apply_step",
    "augment",
    "augmented_stationary",
    "bayes_update",
    "build_report",
    "check_identifiability",
    "condition_values",
    "divergence_ledger",
    "init_beliefs",
    "kl_divergence",
    "limit_objective",
    "log_likelihood",
    "monte_carlo",
    "observation_streams",
    "predicted_limit",
    "presample_observations",
    "run",
    "sample",
    "sample_series",
    "stationary_distribution",
    "step",
    "validate_gamma",
    "validate_network",
    "well_specified",
]
