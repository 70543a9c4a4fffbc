"""
Posterior estimation of network density and CCM posterior predictive specs
"""
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from config import engine_defaults
from models import (
    BetaSpec,
    DensityPosterior,
    EnsembleRecipe,
    Graph,
    ModelConfig,
    NormalSpec,
    PropertyKind,
    PropertySpec,
    RunConfig,
    SamplerConfig,
    all_dyads,
)

logger = logging.getLogger(__name__)


class PosteriorError(Exception):
    """Posterior inputs are insufficient or out of range"""
    pass


def normal_posterior(
    densities: Sequence[float],
    prior_mean: float = 0.5,
    prior_var: float = 1.0,
    sigma: Optional[float] = None
) -> DensityPosterior:
    """
    Normal likelihood with known sd and a Normal prior on the mean density

    Args:
        densities: One observed density per fully observed network
        prior_mean: Prior mean
        prior_var: Prior variance (> 0)
        sigma: Likelihood sd; defaults to the sample sd of the densities

    Raises:
        PosteriorError: If sigma is missing with fewer than two points, or not positive
    """
    x = np.asarray(densities, dtype=float)
    n = x.size
    if n == 0:
        raise PosteriorError("At least one observed density is required")
    if prior_var <= 0:
        raise PosteriorError(f"prior_var must be positive, got {prior_var}")
    if sigma is None:
        if n < 2:
            raise PosteriorError("sigma must be given explicitly with fewer than 2 densities")
        sigma = float(np.std(x, ddof=1))
    if not sigma > 0:
        raise PosteriorError(f"Likelihood sd must be positive, got {sigma}")

    post_prec = 1.0 / prior_var + n / sigma ** 2
    post_mean = (prior_mean / prior_var + n * float(x.mean()) / sigma ** 2) / post_prec
    logger.info(f"Normal posterior from {n} densities: mean={post_mean:.6g}, sd={math.sqrt(1 / post_prec):.6g}")
    return DensityPosterior(
        family="normal",
        mean=post_mean,
        variance=1.0 / post_prec,
        provenance={
            "densities": x.tolist(),
            "prior_mean": prior_mean,
            "prior_var": prior_var,
            "sigma": sigma,
        },
    )


def beta_posterior(
    observed_edges: int,
    observed_dyads: int,
    a0: float = 1.0,
    b0: float = 1.0,
    population_dyads: Optional[int] = None
) -> DensityPosterior:
    """
    Bernoulli likelihood over observed dyads with a Beta prior

    With population_dyads the variance is scaled by the finite population
    correction (1 - observed/population) and the shape parameters are
    moment-matched to the corrected mean and variance.
    """
    if not 0 <= observed_edges <= observed_dyads:
        raise PosteriorError(
            f"Need 0 <= observed_edges <= observed_dyads, got {observed_edges} of {observed_dyads}"
        )
    if a0 <= 0 or b0 <= 0:
        raise PosteriorError("Prior shape parameters must be positive")
    a = a0 + observed_edges
    b = b0 + observed_dyads - observed_edges
    mean = a / (a + b)
    variance = a * b / ((a + b) ** 2 * (a + b + 1))
    provenance = {
        "observed_edges": observed_edges,
        "observed_dyads": observed_dyads,
        "a0": a0,
        "b0": b0,
        "conjugate_a": a,
        "conjugate_b": b,
    }
    if population_dyads is not None:
        factor = 1.0 - observed_dyads / population_dyads
        if factor < engine_defaults.fpc_floor:
            logger.warning(
                f"Observed dyads ({observed_dyads}) cover the population ({population_dyads}); "
                f"finite population correction clamped to {engine_defaults.fpc_floor}"
            )
            factor = engine_defaults.fpc_floor
        variance *= factor
        common = mean * (1.0 - mean) / variance - 1.0
        a, b = mean * common, (1.0 - mean) * common
        provenance.update({"population_dyads": population_dyads, "fpc_factor": factor,
                           "fpc_method": "variance scaling, moment-matched beta"})
    logger.info(f"Beta posterior: a={a:.6g}, b={b:.6g}, mean={mean:.6g}")
    return DensityPosterior(family="beta", mean=mean, variance=variance, a=a, b=b, provenance=provenance)


def benchmark_gnm(n: int, m: int, count: int) -> np.ndarray:
    """
    Densities of G(n, m): the constant m / C(n, 2)

    G(n, m) fixes the edge count, so every draw has the same density and no
    generator is needed (benchmark_bernoulli_edges takes one because its edge
    count is random).
    """
    M = n * (n - 1) // 2
    if not 0 <= m <= M:
        raise PosteriorError(f"m={m} outside [0, {M}] for n={n}")
    return np.full(count, m / M)


def benchmark_bernoulli_edges(n: int, p: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Densities of an edges-only Bernoulli graph model (i.i.d. dyads with probability p)"""
    if not 0 < p < 1:
        raise PosteriorError(f"p must lie in (0, 1), got {p}")
    M = n * (n - 1) // 2
    return rng.binomial(M, p, size=count) / M


def posterior_to_ccm(
    post: DensityPosterior,
    n: int,
    sampler: Optional[SamplerConfig] = None
) -> RunConfig:
    """Density CCM whose class distribution is the posterior"""
    if post.family == "normal":
        dist = NormalSpec(mean=post.mean, var=post.variance)
    else:
        dist = BetaSpec(a=post.a, b=post.b)
    model = ModelConfig(
        population=n,
        properties=[PropertySpec(kind=PropertyKind.DENSITY)],
        distributions=[dist],
    )
    return RunConfig(model=model, sampler=sampler or SamplerConfig())


def ensemble_recipe(diagnostic: SamplerConfig, ensemble_size: int = 10, interval: int = 1000) -> EnsembleRecipe:
    """Diagnostic run, then a short run started from its final state keeping every network"""
    ensemble = SamplerConfig(
        burnin=engine_defaults.ensemble_burnin,
        interval=interval,
        sample_size=ensemble_size,
        seed=diagnostic.seed,
        use_initial=True,
        stats_only=False,
    )
    return EnsembleRecipe(diagnostic=diagnostic, ensemble=ensemble)


def induced_sample_counts(g: Graph, k: int, rng: np.random.Generator) -> Tuple[int, int]:
    """
    Edges and dyads observed among k nodes drawn uniformly without replacement

    Returns:
        (observed_edges, observed_dyads) with observed_dyads = C(k, 2)
    """
    if not 2 <= k <= g.n:
        raise PosteriorError(f"Subsample size must lie in [2, {g.n}], got {k}")
    nodes = set(int(x) for x in rng.choice(g.n, size=k, replace=False))
    edges = sum(1 for u, v in g.edges() if u in nodes and v in nodes)
    return edges, k * (k - 1) // 2


def synthetic_graph(n: int, m: int, rng: np.random.Generator) -> Graph:
    """Uniform G(n, m) graph"""
    M = n * (n - 1) // 2
    if not 0 <= m <= M:
        raise PosteriorError(f"m={m} outside [0, {M}] for n={n}")
    pool = list(all_dyads(n))
    chosen = rng.choice(M, size=m, replace=False)
    return Graph.from_edges(n, (pool[int(i)] for i in chosen))
