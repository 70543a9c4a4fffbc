"""
Core data models for sampler runs, diagnostics and posterior workflows
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Literal, Optional, Sequence, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .config_models import SamplerConfig
from .graph import Graph


@dataclass(frozen=True)
class StatVector:
    """Ordered, named property values of one graph (phi(g))"""
    names: Tuple[str, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        if len(self.names) != len(self.values):
            raise ValueError(f"{len(self.names)} names for {len(self.values)} values")

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def __getitem__(self, name: str) -> float:
        return self.values[self.names.index(name)]

    def __add__(self, other: "StatVector") -> "StatVector":
        self._check_names(other)
        return StatVector(self.names, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "StatVector") -> "StatVector":
        self._check_names(other)
        return StatVector(self.names, tuple(a - b for a, b in zip(self.values, other.values)))

    def _check_names(self, other: "StatVector") -> None:
        if self.names != other.names:
            raise ValueError(f"Statistic names differ: {self.names} vs {other.names}")

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(self.names, self.values))

    @classmethod
    def concat(cls, parts: Sequence["StatVector"]) -> "StatVector":
        names: Tuple[str, ...] = ()
        values: Tuple[float, ...] = ()
        for p in parts:
            names += p.names
            values += p.values
        return cls(names, values)


@dataclass
class EnumerationTable:
    """
    Exact congruence class sizes for a small population.

    `entries` maps the flattened statistic tuple to the number of labelled
    graphs in that class; `outside` counts graphs outside the property
    support (e.g. a degree above max_degree), so total == 2^C(n,2).
    """
    n: int
    names: Tuple[str, ...]
    entries: Dict[Tuple, int]
    outside: int = 0
    _log_cache: Dict[Tuple, float] = field(default_factory=dict, repr=False, compare=False)

    @property
    def total(self) -> int:
        return sum(self.entries.values()) + self.outside

    def size(self, key: Sequence) -> int:
        return self.entries.get(tuple(key), 0)

    def log_size(self, key: Sequence) -> Optional[float]:
        """Natural log of the class size, None if the class is empty"""
        key = tuple(key)
        cached = self._log_cache.get(key)
        if cached is None:
            count = self.entries.get(key, 0)
            if count == 0:
                return None
            cached = math.log(count)
            self._log_cache[key] = cached
        return cached


class AcceptanceCounts(BaseModel):
    """Proposal bookkeeping for a sampler run"""
    proposed: int = Field(default=0, ge=0)
    accepted: int = Field(default=0, ge=0)
    rejected: int = Field(default=0, ge=0)
    # proposals that left the property support
    auto_rejected: int = Field(default=0, ge=0)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else 0.0

    def merge(self, other: "AcceptanceCounts") -> "AcceptanceCounts":
        return AcceptanceCounts(
            proposed=self.proposed + other.proposed,
            accepted=self.accepted + other.accepted,
            rejected=self.rejected + other.rejected,
            auto_rejected=self.auto_rejected + other.auto_rejected,
        )


class SampleOutput(BaseModel):
    """Result of one sampler run"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    stats: pd.DataFrame
    ensemble: List[Graph] = Field(default_factory=list)
    acceptance: AcceptanceCounts
    final_state: Graph
    seed: int
    names: List[str]
    execution_time: float = Field(default=0.0, ge=0)  # seconds

    @property
    def sample_size(self) -> int:
        return len(self.stats)


class ChainResult(BaseModel):
    """Result from a single chain of a multi-chain run"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    chain_id: int = Field(ge=0)
    seed: int
    output: Optional[SampleOutput] = None
    execution_time: float = Field(default=0.0, ge=0)  # seconds
    success: bool = True
    error_message: Optional[str] = None


class StatSummary(BaseModel):
    """Six-number summary of one statistic"""
    minimum: float
    q1: float
    median: float
    mean: float
    q3: float
    maximum: float

    def as_row(self) -> List[float]:
        return [self.minimum, self.q1, self.median, self.mean, self.q3, self.maximum]


class StatComparison(BaseModel):
    """MCMC vs theoretical comparison for one statistic"""
    name: str
    mcmc: StatSummary
    theoretical: StatSummary
    ks_statistic: float = Field(ge=0, le=1)
    theoretical_mean: float
    theoretical_q025: float
    theoretical_q975: float
    # quantiles come from the closed form when the distribution has one
    analytic_reference: bool = False
    ess: Optional[float] = None
    bin_edges: List[float] = Field(default_factory=list)


class ComparisonReport(BaseModel):
    """Per-statistic comparison of sampled and theoretical values"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    comparisons: List[StatComparison]
    mcmc: pd.DataFrame
    theoretical: pd.DataFrame
    metadata: Dict[str, Any] = Field(default_factory=dict)

    def get(self, name: str) -> StatComparison:
        for c in self.comparisons:
            if c.name == name:
                return c
        raise KeyError(name)


class DensityPosterior(BaseModel):
    """Posterior over network density"""
    family: Literal["normal", "beta"]
    mean: float
    variance: float = Field(gt=0)
    a: Optional[float] = Field(default=None, gt=0)
    b: Optional[float] = Field(default=None, gt=0)
    provenance: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_family(self) -> "DensityPosterior":
        if self.family == "beta" and (self.a is None or self.b is None):
            raise ValueError("beta posterior requires shape parameters a and b")
        return self

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)


class EnsembleRecipe(BaseModel):
    """Two-stage run: a diagnostic chain, then a short ensemble run started from its final state"""
    diagnostic: SamplerConfig
    ensemble: SamplerConfig
