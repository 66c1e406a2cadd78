"""Value of information for Dirichlet-multinomial data under quadratic loss."""

from .core import (
    DataDistribution,
    DimensionError,
    DirichletPrior,
    LossSpec,
    SampleCounts,
    bayes_action,
    beta_binomial_evsi,
    dirichlet_moments,
    efficiency,
    evdi,
    evsi,
    expected_risk,
    marginal_likelihood,
    posterior,
    posterior_bayes_action,
    preposterior_expected_loss,
    prior_bayes_risk,
)
from .policies import (
    ChangeoverDecision,
    SampleSizeDecision,
    SamplingCost,
    SeasonSpec,
    optimal_changeover,
    optimal_sample_size,
    sampling_net_loss,
    season_net_cost,
)
from .simulation import (
    BenchmarkResult,
    Estimate,
    Procedure,
    SimConfig,
    estimate_evsi,
    run_benchmark,
    sample_counts,
    sample_dirichlet,
    verify_total_variance,
)

__version__ = "0.1.0"
