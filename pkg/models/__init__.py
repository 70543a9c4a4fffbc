# Models package

from .graph import (
    Graph,
    Dyad,
    GraphUsageError,
    EmptySelectionError,
    all_dyads,
    dyad_index
)

from .config_models import (
    ConfigError,
    PropertyKind,
    DistributionKind,
    EstimatorMode,
    EnsembleFormat,
    PlotKind,
    PropertySpec,
    DistributionSpec,
    PoissonSpec,
    UniformSpec,
    NonParametricSpec,
    NormalSpec,
    BetaSpec,
    DirMultSpec,
    MvnSpec,
    CardinalityConfig,
    ModelConfig,
    SamplerConfig,
    OutputConfig,
    DiagnosticsConfig,
    RunConfig,
    NetworkObservation,
    PosteriorRequest,
    DEGREE_INDEXED,
    COVARIATE_BASED
)

from .core_models import (
    StatVector,
    EnumerationTable,
    AcceptanceCounts,
    SampleOutput,
    ChainResult,
    StatSummary,
    StatComparison,
    ComparisonReport,
    DensityPosterior,
    EnsembleRecipe
)

__all__ = [
    # Graph core
    "Graph",
    "Dyad",
    "GraphUsageError",
    "EmptySelectionError",
    "all_dyads",
    "dyad_index",

    # Configuration
    "ConfigError",
    "PropertyKind",
    "DistributionKind",
    "EstimatorMode",
    "EnsembleFormat",
    "PlotKind",
    "PropertySpec",
    "DistributionSpec",
    "PoissonSpec",
    "UniformSpec",
    "NonParametricSpec",
    "NormalSpec",
    "BetaSpec",
    "DirMultSpec",
    "MvnSpec",
    "CardinalityConfig",
    "ModelConfig",
    "SamplerConfig",
    "OutputConfig",
    "DiagnosticsConfig",
    "RunConfig",
    "NetworkObservation",
    "PosteriorRequest",
    "DEGREE_INDEXED",
    "COVARIATE_BASED",

    # Core Models
    "StatVector",
    "EnumerationTable",
    "AcceptanceCounts",
    "SampleOutput",
    "ChainResult",
    "StatSummary",
    "StatComparison",
    "ComparisonReport",
    "DensityPosterior",
    "EnsembleRecipe"
]
