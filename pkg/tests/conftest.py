"""
Shared fixtures for the test suite
"""
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pytest

from models import Graph, ModelConfig, RunConfig, SamplerConfig

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def config_dir() -> Path:
    return CONFIG_DIR


@pytest.fixture
def path_graph() -> Graph:
    """0-1-2-3"""
    return Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def triangle_plus_tail() -> Graph:
    """Triangle 0-1-2 with a pendant edge 2-3 and an isolated node 4"""
    return Graph.from_edges(5, [(0, 1), (0, 2), (1, 2), (2, 3)])


def make_model(
    population: int,
    properties: List[Any],
    distributions: List[Dict[str, Any]],
    covariate: Optional[List[int]] = None,
    oracle: bool = False
) -> ModelConfig:
    data: Dict[str, Any] = {
        "population": population,
        "properties": properties,
        "distributions": distributions,
    }
    if covariate is not None:
        data["covariate"] = covariate
    if oracle:
        data["cardinality"] = {"mode": "oracle-table"}
    return ModelConfig.model_validate(data)


def make_run(model: ModelConfig, **sampler: Any) -> RunConfig:
    return RunConfig(model=model, sampler=SamplerConfig(**sampler))


@pytest.fixture
def poisson_model() -> ModelConfig:
    return make_model(20, ["edges"], [{"kind": "poisson", "lambda": 40}])
