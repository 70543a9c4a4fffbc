"""
Pydantic models for run configuration (model, sampler, outputs)
"""
import math
from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeFloat,
    PositiveFloat,
    field_validator,
    model_validator,
)

from config import engine_defaults


class ConfigError(ValueError):
    """Cross-field validation error addressed by a path relative to the model being validated"""

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class PropertyKind(str, Enum):
    """Network properties that define congruence classes"""
    EDGES = "edges"
    DENSITY = "density"
    DEGREEDIST = "degreedist"
    DEGMIXING = "degmixing"
    TRIANGLES = "triangles"
    MIXING = "mixing"
    DEGREEDIST_BY_GROUP = "degreedist_by_group"


class DistributionKind(str, Enum):
    """Class-level probability distributions"""
    POISSON = "poisson"
    UNIFORM = "uniform"
    NP = "np"
    NORMAL = "normal"
    BETA = "beta"
    DIRMULT = "dirmult"
    MVN = "mvn"


class EstimatorMode(str, Enum):
    """How congruence class cardinality ratios are evaluated"""
    EXACT_ANALYTIC = "exact-analytic"
    BENDER_CANFIELD = "bender-canfield"
    MATCHING_APPROX = "matching-approx"
    PRODUCT_APPROX = "product-approx"
    ORACLE_TABLE = "oracle-table"


class EnsembleFormat(str, Enum):
    """On-disk layout of a graph ensemble"""
    EDGELIST_DIR = "edgelist-dir"
    JSONL = "jsonl"


DEGREE_INDEXED = {PropertyKind.DEGREEDIST, PropertyKind.DEGMIXING, PropertyKind.DEGREEDIST_BY_GROUP}
COVARIATE_BASED = {PropertyKind.MIXING, PropertyKind.DEGREEDIST_BY_GROUP}

# Distributions accepted per property (Table of implemented properties plus
# independent-component normals where the statistic is a vector)
ALLOWED_DISTRIBUTIONS: Dict[PropertyKind, set] = {
    PropertyKind.EDGES: {DistributionKind.POISSON, DistributionKind.UNIFORM, DistributionKind.NP,
                         DistributionKind.NORMAL},
    PropertyKind.DENSITY: {DistributionKind.NORMAL, DistributionKind.BETA},
    PropertyKind.DEGREEDIST: {DistributionKind.DIRMULT, DistributionKind.MVN},
    PropertyKind.DEGMIXING: {DistributionKind.MVN, DistributionKind.NORMAL},
    PropertyKind.TRIANGLES: {DistributionKind.NORMAL, DistributionKind.POISSON},
    PropertyKind.MIXING: {DistributionKind.POISSON, DistributionKind.MVN, DistributionKind.NORMAL},
    PropertyKind.DEGREEDIST_BY_GROUP: {DistributionKind.NORMAL, DistributionKind.MVN},
}

# Component estimator modes a property may request; None means "tilt only"
ALLOWED_ESTIMATORS: Dict[PropertyKind, set] = {
    PropertyKind.EDGES: {EstimatorMode.EXACT_ANALYTIC},
    PropertyKind.DENSITY: {EstimatorMode.EXACT_ANALYTIC},
    PropertyKind.MIXING: {EstimatorMode.EXACT_ANALYTIC},
    PropertyKind.DEGREEDIST: {EstimatorMode.BENDER_CANFIELD},
    PropertyKind.DEGREEDIST_BY_GROUP: {EstimatorMode.BENDER_CANFIELD},
    PropertyKind.DEGMIXING: {EstimatorMode.MATCHING_APPROX},
    PropertyKind.TRIANGLES: set(),
}

DEFAULT_ESTIMATORS: Dict[PropertyKind, Optional[EstimatorMode]] = {
    PropertyKind.EDGES: EstimatorMode.EXACT_ANALYTIC,
    PropertyKind.DENSITY: EstimatorMode.EXACT_ANALYTIC,
    PropertyKind.MIXING: EstimatorMode.EXACT_ANALYTIC,
    PropertyKind.DEGREEDIST: EstimatorMode.BENDER_CANFIELD,
    PropertyKind.DEGREEDIST_BY_GROUP: EstimatorMode.BENDER_CANFIELD,
    PropertyKind.DEGMIXING: EstimatorMode.MATCHING_APPROX,
    PropertyKind.TRIANGLES: None,
}


class PropertySpec(BaseModel):
    """A network property (the mapping phi) and its kind-specific parameters"""

    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    kind: PropertyKind
    max_degree: Optional[int] = Field(default=None, ge=1)
    groups: Optional[int] = Field(default=None, ge=1)
    estimator: Optional[EstimatorMode] = None

    @model_validator(mode="before")
    @classmethod
    def accept_shorthand(cls, data: Any) -> Any:
        """Allow a bare kind string, e.g. "edges" """
        if isinstance(data, str):
            return {"kind": data}
        return data

    @model_validator(mode="after")
    def check_estimator(self) -> "PropertySpec":
        if self.estimator is not None and self.estimator not in ALLOWED_ESTIMATORS[self.kind]:
            allowed = sorted(m.value for m in ALLOWED_ESTIMATORS[self.kind]) or ["none (tilt only)"]
            raise ConfigError(
                "estimator",
                f"'{self.estimator.value}' is not available for {self.kind.value}; allowed: {allowed}"
            )
        return self

    @property
    def component_estimator(self) -> Optional[EstimatorMode]:
        return self.estimator or DEFAULT_ESTIMATORS[self.kind]

    def dimension(self) -> int:
        """Length of the StatVector this property produces"""
        K, G = self.max_degree, self.groups
        if self.kind in (PropertyKind.EDGES, PropertyKind.DENSITY, PropertyKind.TRIANGLES):
            return 1
        if self.kind == PropertyKind.DEGREEDIST:
            return K + 1
        if self.kind == PropertyKind.DEGMIXING:
            return K * (K + 1) // 2
        if self.kind == PropertyKind.MIXING:
            return G * (G + 1) // 2
        return G * (K + 1)


# ----------------------------------------------------------------------
# Distribution parameter models (named or positional form)
# ----------------------------------------------------------------------

_POSITIONAL_FIELDS: Dict[str, List[str]] = {
    "poisson": ["lambda"],
    "uniform": [],
    "np": ["probs"],
    "normal": ["mean", "var"],
    "beta": ["a", "b"],
    "dirmult": ["alpha"],
    "mvn": ["mean", "cov"],
}


class _DistributionBase(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    @model_validator(mode="before")
    @classmethod
    def expand_positional(cls, data: Any) -> Any:
        """Map the package-style positional list `params` onto named fields"""
        if isinstance(data, dict) and "params" in data:
            data = dict(data)
            params = data.pop("params")
            names = _POSITIONAL_FIELDS.get(data.get("kind"), [])
            if params is None:
                params = []
            if not isinstance(params, list):
                params = [params]
            if data.get("kind") == "uniform":
                params = []
            if len(params) > len(names):
                raise ValueError(
                    f"{data.get('kind')} takes {len(names)} positional parameter(s), got {len(params)}"
                )
            for name, value in zip(names, params):
                data[name] = value
        return data

    def dimension(self) -> Optional[int]:
        """Statistic dimension implied by the parameters (None if any dimension fits)"""
        return None


class PoissonSpec(_DistributionBase):
    kind: Literal["poisson"] = "poisson"
    lambda_: Union[PositiveFloat, List[PositiveFloat]] = Field(alias="lambda")

    def dimension(self) -> Optional[int]:
        return len(self.lambda_) if isinstance(self.lambda_, list) else None


class UniformSpec(_DistributionBase):
    kind: Literal["uniform"] = "uniform"


class NonParametricSpec(_DistributionBase):
    kind: Literal["np"] = "np"
    probs: List[NonNegativeFloat] = Field(min_length=1)

    @field_validator("probs")
    @classmethod
    def check_normalised(cls, v: List[float]) -> List[float]:
        total = math.fsum(v)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"np probabilities must sum to 1 (within 1e-9), got {total!r}")
        return v

    def dimension(self) -> Optional[int]:
        return 1


class NormalSpec(_DistributionBase):
    kind: Literal["normal"] = "normal"
    mean: Union[float, List[float]]
    var: Union[PositiveFloat, List[PositiveFloat]]

    @model_validator(mode="after")
    def check_shapes(self) -> "NormalSpec":
        if isinstance(self.mean, list) and isinstance(self.var, list) and len(self.mean) != len(self.var):
            raise ConfigError("var", f"length {len(self.var)} does not match mean length {len(self.mean)}")
        return self

    def dimension(self) -> Optional[int]:
        for v in (self.mean, self.var):
            if isinstance(v, list):
                return len(v)
        return None


class BetaSpec(_DistributionBase):
    kind: Literal["beta"] = "beta"
    a: PositiveFloat
    b: PositiveFloat

    def dimension(self) -> Optional[int]:
        return 1


class DirMultSpec(_DistributionBase):
    kind: Literal["dirmult"] = "dirmult"
    alpha: List[PositiveFloat] = Field(min_length=1)

    def dimension(self) -> Optional[int]:
        return len(self.alpha)


class MvnSpec(_DistributionBase):
    kind: Literal["mvn"] = "mvn"
    mean: List[float] = Field(min_length=1)
    cov: List[List[float]]

    @model_validator(mode="after")
    def check_covariance(self) -> "MvnSpec":
        d = len(self.mean)
        if len(self.cov) != d or any(len(row) != d for row in self.cov):
            raise ConfigError("cov", f"must be a {d}x{d} matrix to match the mean vector")
        sigma = np.asarray(self.cov, dtype=float)
        if not np.allclose(sigma, sigma.T, rtol=0.0, atol=1e-12):
            raise ConfigError("cov", "must be symmetric")
        try:
            np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError:
            raise ConfigError("cov", "must be positive definite")
        return self

    def dimension(self) -> Optional[int]:
        return len(self.mean)


DistributionSpec = Annotated[
    Union[PoissonSpec, UniformSpec, NonParametricSpec, NormalSpec, BetaSpec, DirMultSpec, MvnSpec],
    Field(discriminator="kind"),
]


# ----------------------------------------------------------------------
# Model, sampler and output configuration
# ----------------------------------------------------------------------

class CardinalityConfig(BaseModel):
    """Model-level cardinality evaluation"""

    model_config = ConfigDict(extra="forbid")

    mode: EstimatorMode = EstimatorMode.PRODUCT_APPROX
    # Oracle tables are enumerated on the fly when no file is given
    table_path: Optional[Path] = None

    @field_validator("mode")
    @classmethod
    def check_model_level(cls, v: EstimatorMode) -> EstimatorMode:
        if v not in (EstimatorMode.PRODUCT_APPROX, EstimatorMode.ORACLE_TABLE):
            raise ValueError(f"model-level mode must be product-approx or oracle-table, got '{v.value}'")
        return v


class ModelConfig(BaseModel):
    """Full CCM specification (CcmSpec): properties, distributions, population, covariates"""

    model_config = ConfigDict(extra="forbid")

    population: int = Field(ge=2)
    properties: List[PropertySpec] = Field(min_length=1)
    distributions: List[DistributionSpec] = Field(min_length=1)
    covariate: Optional[List[int]] = None
    cardinality: CardinalityConfig = Field(default_factory=CardinalityConfig)

    @property
    def max_edges(self) -> int:
        return self.population * (self.population - 1) // 2

    @model_validator(mode="after")
    def check_consistency(self) -> "ModelConfig":
        if len(self.properties) != len(self.distributions):
            raise ConfigError(
                "distributions",
                f"{len(self.distributions)} distribution(s) given for {len(self.properties)} propert(ies)"
            )
        if self.covariate is not None:
            if len(self.covariate) != self.population:
                raise ConfigError(
                    "covariate", f"length {len(self.covariate)} does not match population {self.population}"
                )
            if any(c < 0 for c in self.covariate):
                raise ConfigError("covariate", "labels must be non-negative integers")

        for i, (prop, dist) in enumerate(zip(self.properties, self.distributions)):
            self._resolve_property(i, prop, dist)
            if dist.kind not in {d.value for d in ALLOWED_DISTRIBUTIONS[prop.kind]}:
                allowed = sorted(d.value for d in ALLOWED_DISTRIBUTIONS[prop.kind])
                raise ConfigError(
                    f"distributions[{i}]",
                    f"'{dist.kind}' cannot be placed on {prop.kind.value}; allowed: {allowed}"
                )
            self._check_dimension(i, prop, dist)
        return self

    def _resolve_property(self, i: int, prop: PropertySpec, dist: Any) -> None:
        """Fill in groups / max_degree from covariates and parameter vectors"""
        if prop.kind in COVARIATE_BASED:
            if self.covariate is None:
                raise ConfigError(f"properties[{i}]", f"{prop.kind.value} requires covariate labels")
            needed = max(self.covariate) + 1
            if prop.groups is None:
                prop.groups = needed
            elif prop.groups < needed:
                raise ConfigError(
                    f"properties[{i}].groups", f"{prop.groups} is fewer than the {needed} labels present"
                )

        if prop.kind not in DEGREE_INDEXED or prop.max_degree is not None:
            return
        d = dist.dimension()
        if d is None:
            raise ConfigError(f"properties[{i}].max_degree", "required when it cannot be inferred")
        if prop.kind == PropertyKind.DEGREEDIST:
            prop.max_degree = max(d - 1, 1)
        elif prop.kind == PropertyKind.DEGMIXING:
            k = int(round((math.sqrt(8 * d + 1) - 1) / 2))
            if k * (k + 1) // 2 != d:
                raise ConfigError(
                    f"distributions[{i}]", f"dimension {d} is not K(K+1)/2 for any max degree K"
                )
            prop.max_degree = k
        else:
            if d % prop.groups != 0 or d // prop.groups < 2:
                raise ConfigError(
                    f"distributions[{i}]", f"dimension {d} is not groups*(K+1) for groups={prop.groups}"
                )
            prop.max_degree = d // prop.groups - 1

    def _check_dimension(self, i: int, prop: PropertySpec, dist: Any) -> None:
        expected = prop.dimension()
        if dist.kind == "np":
            if prop.kind != PropertyKind.EDGES:
                raise ConfigError(f"distributions[{i}]", "np is defined on edge counts only")
            if len(dist.probs) != self.max_edges + 1:
                raise ConfigError(
                    f"distributions[{i}].probs",
                    f"length {len(dist.probs)} must be C(n,2)+1 = {self.max_edges + 1}"
                )
            return
        d = dist.dimension()
        if d is not None and d != expected:
            raise ConfigError(
                f"distributions[{i}]",
                f"{dist.kind} dimension {d} does not match {prop.kind.value} dimension {expected}"
            )


class SamplerConfig(BaseModel):
    """MCMC run description"""

    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True)

    burnin: int = Field(default=engine_defaults.default_burnin, ge=0)
    interval: int = Field(default=engine_defaults.default_interval, ge=1)
    sample_size: int = Field(default=engine_defaults.default_sample_size, ge=1)
    seed: Optional[int] = Field(default=None, ge=0, lt=2 ** 64)
    # A Graph instance (programmatic use) or a path to a graph file
    initial_graph: Optional[Any] = None
    use_initial: bool = False
    stats_only: bool = True
    debug: bool = False

    # use_initial without initial_graph is a template (two-stage ensemble runs
    # receive the diagnostic run's final state at run time)

    def manifest_dict(self) -> Dict[str, Any]:
        data = self.model_dump(exclude={"initial_graph"})
        data["initial_graph"] = self.initial_graph if isinstance(self.initial_graph, str) else (
            None if self.initial_graph is None else "<in-memory graph>"
        )
        return data


class OutputConfig(BaseModel):
    """Where and how run artefacts are written"""

    model_config = ConfigDict(extra="forbid")

    directory: Optional[Path] = None
    stats_file: str = "stats.csv"
    manifest_file: str = "manifest.json"
    ensemble_format: EnsembleFormat = EnsembleFormat.JSONL
    write_final_state: bool = True


class PlotKind(str, Enum):
    HIST = "hist"
    DENSITY = "density"
    TRACE = "trace"


class DiagnosticsConfig(BaseModel):
    """Theoretical reference draws and plot-data emission"""

    model_config = ConfigDict(extra="forbid")

    theoretical_draws: int = Field(default=1000, ge=1)
    plots: List[PlotKind] = Field(default_factory=lambda: [PlotKind.HIST, PlotKind.TRACE])


class RunConfig(BaseModel):
    """One JSON file = one run"""

    model_config = ConfigDict(extra="forbid")

    model: ModelConfig
    sampler: SamplerConfig = Field(default_factory=SamplerConfig)
    outputs: OutputConfig = Field(default_factory=OutputConfig)
    diagnostics: DiagnosticsConfig = Field(default_factory=DiagnosticsConfig)


# ----------------------------------------------------------------------
# Posterior workflow input
# ----------------------------------------------------------------------

class NetworkObservation(BaseModel):
    """Node and edge count of one fully observed network"""

    model_config = ConfigDict(extra="forbid")

    name: str = ""
    nodes: int = Field(ge=2)
    edges: int = Field(ge=0)

    @model_validator(mode="after")
    def check_edges(self) -> "NetworkObservation":
        cap = self.nodes * (self.nodes - 1) // 2
        if self.edges > cap:
            raise ConfigError("edges", f"{self.edges} exceeds C({self.nodes},2) = {cap}")
        return self

    @property
    def density(self) -> float:
        return self.edges / (self.nodes * (self.nodes - 1) // 2)


class PosteriorRequest(BaseModel):
    """Observations and prior for density estimation under one of the two sampling designs"""

    model_config = ConfigDict(extra="forbid")

    design: Literal["whole-network", "within-network"]
    population: int = Field(ge=2)

    # whole-network design
    networks: Optional[List[NetworkObservation]] = None
    prior_mean: float = 0.5
    prior_var: PositiveFloat = 1.0
    sigma: Optional[PositiveFloat] = None

    # within-network design
    observed_edges: Optional[int] = Field(default=None, ge=0)
    observed_dyads: Optional[int] = Field(default=None, ge=1)
    population_dyads: Optional[int] = Field(default=None, ge=1)
    a0: PositiveFloat = 1.0
    b0: PositiveFloat = 1.0

    sampler: SamplerConfig = Field(default_factory=SamplerConfig)

    @model_validator(mode="after")
    def check_design(self) -> "PosteriorRequest":
        if self.design == "whole-network":
            if not self.networks:
                raise ConfigError("networks", "required for the whole-network design")
        else:
            if self.observed_edges is None or self.observed_dyads is None:
                raise ConfigError("observed_edges", "observed_edges and observed_dyads are required")
            if self.observed_edges > self.observed_dyads:
                raise ConfigError("observed_edges", "cannot exceed observed_dyads")
        return self
