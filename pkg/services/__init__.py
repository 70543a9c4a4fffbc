# Services package
# (ccm_service is imported directly: it depends on repositories, which depend on graph_codec)

from .graph_codec import GraphCodec, GraphFormat, GraphParseError
from .property_stats import PropertyStats, evaluate, change_stat
from .cardinality import (
    CardinalityError,
    CardinalityEstimator,
    EnumerationRefused,
    ToggleContext,
    enumerate_classes,
    log_ratio_edges,
    log_ratio_mixing,
    log_ratio_degreedist,
    log_ratio_degmixing
)
from .distributions import (
    ClassDistribution,
    DistributionError,
    DistributionFactory,
    sample_theoretical
)
from .sampler import CcmSampler, SamplerError, StepOutcome, propose, sample
from .chain_orchestrator import ChainOrchestrator, derive_chain_seeds
from .diagnostics import DiagnosticsError, summarize, compare, emit_plot_data
from .posterior import (
    PosteriorError,
    normal_posterior,
    beta_posterior,
    benchmark_gnm,
    benchmark_bernoulli_edges,
    posterior_to_ccm,
    ensemble_recipe
)

__all__ = [
    "GraphCodec",
    "GraphFormat",
    "GraphParseError",
    "PropertyStats",
    "evaluate",
    "change_stat",
    "CardinalityError",
    "CardinalityEstimator",
    "EnumerationRefused",
    "ToggleContext",
    "enumerate_classes",
    "log_ratio_edges",
    "log_ratio_mixing",
    "log_ratio_degreedist",
    "log_ratio_degmixing",
    "ClassDistribution",
    "DistributionError",
    "DistributionFactory",
    "sample_theoretical",
    "CcmSampler",
    "SamplerError",
    "StepOutcome",
    "propose",
    "sample",
    "ChainOrchestrator",
    "derive_chain_seeds",
    "DiagnosticsError",
    "summarize",
    "compare",
    "emit_plot_data",
    "PosteriorError",
    "normal_posterior",
    "beta_posterior",
    "benchmark_gnm",
    "benchmark_bernoulli_edges",
    "posterior_to_ccm",
    "ensemble_recipe"
]
