"""
Class-level probability distributions P_phi over property values
"""
import logging
import math
from abc import ABC, abstractmethod
from typing import ClassVar, Dict, List, Optional, Sequence, Type

import numpy as np
import pandas as pd
from scipy import stats as sps
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.special import betaln, gammaln

from models import (
    BetaSpec,
    DirMultSpec,
    DistributionKind,
    MvnSpec,
    NonParametricSpec,
    NormalSpec,
    PoissonSpec,
    UniformSpec,
)
from terms import PropertyTerm

logger = logging.getLogger(__name__)

LOG_2PI = math.log(2.0 * math.pi)


class DistributionError(Exception):
    """Invalid distribution parameters or a log-probability request outside the support"""
    pass


def _vector(value, dim: int, label: str) -> np.ndarray:
    """Broadcast a scalar parameter, or check a vector parameter's length"""
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size == 1 and dim > 1:
        arr = np.full(dim, float(arr[0]))
    if arr.size != dim:
        raise DistributionError(f"{label} has length {arr.size}, expected {dim}")
    return arr


class ClassDistribution(ABC):
    """
    Distribution over one property's statistic vector.

    log_pmf may drop constants that cancel in ratios; values outside the
    support give -inf.
    """

    kind: ClassVar[DistributionKind]

    def __init__(self, dim: int):
        self.dim = dim

    @abstractmethod
    def log_pmf(self, x: Sequence[float]) -> float:
        pass

    def log_pmf_ratio(self, x_from: Sequence[float], x_to: Sequence[float]) -> float:
        """
        log P(x_to) - log P(x_from)

        Raises:
            DistributionError: If x_from itself has zero probability
        """
        lp_from = self.log_pmf(x_from)
        if lp_from == -math.inf:
            raise DistributionError(f"{self.kind.value}: current value {list(x_from)} is outside the support")
        return self.log_pmf(x_to) - lp_from

    @abstractmethod
    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Independent draws, shape (count, dim)"""
        pass

    @abstractmethod
    def mean(self) -> np.ndarray:
        pass

    def quantiles(self, probs: Sequence[float]) -> Optional[np.ndarray]:
        """Marginal quantiles, shape (len(probs), dim); None when there is no closed form"""
        return None

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(dim={self.dim})"


class PoissonDistribution(ClassDistribution):
    """Independent Poisson components"""

    kind = DistributionKind.POISSON

    def __init__(self, lam, dim: int):
        super().__init__(dim)
        self.lam = _vector(lam, dim, "lambda")
        self.log_lam = np.log(self.lam)

    def log_pmf(self, x: Sequence[float]) -> float:
        arr = np.asarray(x, dtype=float)
        if np.any(arr < 0) or np.any(arr != np.floor(arr)):
            return -math.inf
        return float((arr * self.log_lam - self.lam - gammaln(arr + 1)).sum())

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return rng.poisson(self.lam, size=(count, self.dim))

    def mean(self) -> np.ndarray:
        return self.lam.copy()

    def quantiles(self, probs: Sequence[float]) -> Optional[np.ndarray]:
        return np.column_stack([sps.poisson.ppf(probs, lam) for lam in self.lam])


class UniformDistribution(ClassDistribution):
    """Discrete uniform on 0..upper"""

    kind = DistributionKind.UNIFORM

    def __init__(self, upper: int):
        super().__init__(1)
        self.upper = upper

    def log_pmf(self, x: Sequence[float]) -> float:
        k = x[0]
        if k < 0 or k > self.upper or k != int(k):
            return -math.inf
        return -math.log(self.upper + 1)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, self.upper + 1, size=(count, 1))

    def mean(self) -> np.ndarray:
        return np.array([self.upper / 2.0])

    def quantiles(self, probs: Sequence[float]) -> Optional[np.ndarray]:
        return np.asarray(sps.randint.ppf(probs, 0, self.upper + 1), dtype=float).reshape(-1, 1)


class NonParametricDistribution(ClassDistribution):
    """Explicit probability for every edge count 0..M"""

    kind = DistributionKind.NP

    def __init__(self, probs: Sequence[float]):
        super().__init__(1)
        self.probs = np.asarray(probs, dtype=float)
        if np.any(self.probs < 0) or abs(self.probs.sum() - 1.0) > 1e-9:
            raise DistributionError("np probabilities must be non-negative and sum to 1")
        with np.errstate(divide="ignore"):
            self.log_probs = np.log(self.probs)

    def log_pmf(self, x: Sequence[float]) -> float:
        k = x[0]
        if k < 0 or k >= len(self.probs) or k != int(k):
            return -math.inf
        return float(self.log_probs[int(k)])

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return rng.choice(len(self.probs), size=(count, 1), p=self.probs)

    def mean(self) -> np.ndarray:
        return np.array([float((np.arange(len(self.probs)) * self.probs).sum())])

    def mode(self) -> int:
        return int(np.argmax(self.probs))

    def quantiles(self, probs: Sequence[float]) -> Optional[np.ndarray]:
        cdf = np.cumsum(self.probs)
        idx = np.searchsorted(cdf, np.asarray(probs) - 1e-12, side="left")
        return np.minimum(idx, len(self.probs) - 1).astype(float).reshape(-1, 1)


class NormalDistribution(ClassDistribution):
    """Independent normal components (a discretised tilt on integer statistics)"""

    kind = DistributionKind.NORMAL

    def __init__(self, mean, var, dim: int):
        super().__init__(dim)
        self.mu = _vector(mean, dim, "mean")
        self.var = _vector(var, dim, "var")
        if np.any(self.var <= 0):
            raise DistributionError("normal variance must be positive")
        self._const = float(-0.5 * (LOG_2PI + np.log(self.var)).sum())

    def log_pmf(self, x: Sequence[float]) -> float:
        d = np.asarray(x, dtype=float) - self.mu
        return self._const - float((d * d / (2.0 * self.var)).sum())

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return rng.normal(self.mu, np.sqrt(self.var), size=(count, self.dim))

    def mean(self) -> np.ndarray:
        return self.mu.copy()

    def quantiles(self, probs: Sequence[float]) -> Optional[np.ndarray]:
        return np.column_stack([
            sps.norm.ppf(probs, loc=mu, scale=math.sqrt(v)) for mu, v in zip(self.mu, self.var)
        ])


class BetaDistribution(ClassDistribution):
    """Beta on density; densities are clamped to [1/(2M), 1 - 1/(2M)] before evaluation"""

    kind = DistributionKind.BETA

    def __init__(self, a: float, b: float, max_edges: int):
        super().__init__(1)
        self.a = float(a)
        self.b = float(b)
        self.lo = 1.0 / (2 * max_edges)
        self.hi = 1.0 - self.lo
        self._log_norm = float(betaln(self.a, self.b))

    def log_pmf(self, x: Sequence[float]) -> float:
        p = x[0]
        if p < 0 or p > 1:
            return -math.inf
        p = min(max(p, self.lo), self.hi)
        return (self.a - 1) * math.log(p) + (self.b - 1) * math.log1p(-p) - self._log_norm

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return rng.beta(self.a, self.b, size=(count, 1))

    def mean(self) -> np.ndarray:
        return np.array([self.a / (self.a + self.b)])

    def quantiles(self, probs: Sequence[float]) -> Optional[np.ndarray]:
        return np.asarray(sps.beta.ppf(probs, self.a, self.b)).reshape(-1, 1)


class DirichletMultinomialDistribution(ClassDistribution):
    """Dirichlet-multinomial over the degree histogram of n nodes"""

    kind = DistributionKind.DIRMULT

    def __init__(self, alpha: Sequence[float], n: int):
        super().__init__(len(alpha))
        self.alpha = np.asarray(alpha, dtype=float)
        self.n = n
        a0 = self.alpha.sum()
        self._const = float(
            gammaln(n + 1) + gammaln(a0) - gammaln(n + a0) - gammaln(self.alpha).sum()
        )

    def log_pmf(self, x: Sequence[float]) -> float:
        c = np.asarray(x, dtype=float)
        if np.any(c < 0) or c.sum() != self.n:
            return -math.inf
        return self._const + float((gammaln(c + self.alpha) - gammaln(c + 1)).sum())

    def log_pmf_ratio(self, x_from: Sequence[float], x_to: Sequence[float]) -> float:
        c_from = np.asarray(x_from, dtype=float)
        c_to = np.asarray(x_to, dtype=float)
        if np.any(c_from < 0) or c_from.sum() != self.n:
            raise DistributionError(f"dirmult: current value {list(x_from)} is outside the support")
        if np.any(c_to < 0) or c_to.sum() != self.n:
            return -math.inf
        changed = c_from != c_to
        if not changed.any():
            return 0.0
        a = self.alpha[changed]
        f, t = c_from[changed], c_to[changed]
        return float((gammaln(t + a) - gammaln(f + a) - gammaln(t + 1) + gammaln(f + 1)).sum())

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        p = rng.dirichlet(self.alpha, size=count)
        return rng.multinomial(self.n, p)

    def mean(self) -> np.ndarray:
        return self.n * self.alpha / self.alpha.sum()

    def quantiles(self, probs: Sequence[float]) -> Optional[np.ndarray]:
        a0 = self.alpha.sum()
        # marginals are beta-binomial
        return np.column_stack([
            sps.betabinom.ppf(probs, self.n, a, a0 - a) for a in self.alpha
        ]).astype(float)


class MultivariateNormalDistribution(ClassDistribution):
    """Correlated normal tilt; the covariance is Cholesky-factored once"""

    kind = DistributionKind.MVN

    def __init__(self, mean: Sequence[float], cov: Sequence[Sequence[float]]):
        super().__init__(len(mean))
        self.mu = np.asarray(mean, dtype=float)
        self.cov = np.asarray(cov, dtype=float)
        try:
            factor = cho_factor(self.cov, lower=True)
        except LinAlgError as e:
            raise DistributionError(f"mvn covariance is not positive definite: {e}")
        self.precision = cho_solve(factor, np.eye(self.dim))
        log_det = 2.0 * float(np.log(np.diag(factor[0])).sum())
        self._const = -0.5 * (self.dim * LOG_2PI + log_det)

    def log_pmf(self, x: Sequence[float]) -> float:
        d = np.asarray(x, dtype=float) - self.mu
        return self._const - 0.5 * float(d @ self.precision @ d)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return rng.multivariate_normal(self.mu, self.cov, size=count, method="cholesky")

    def mean(self) -> np.ndarray:
        return self.mu.copy()

    def quantiles(self, probs: Sequence[float]) -> Optional[np.ndarray]:
        sd = np.sqrt(np.diag(self.cov))
        return np.column_stack([sps.norm.ppf(probs, loc=m, scale=s) for m, s in zip(self.mu, sd)])


class DistributionFactory:
    """Builds the distribution object for a (distribution spec, property term) pair"""

    @staticmethod
    def create(spec, term: PropertyTerm) -> ClassDistribution:
        dim = term.dimension
        M = term.n * (term.n - 1) // 2
        if isinstance(spec, PoissonSpec):
            return PoissonDistribution(spec.lambda_, dim)
        if isinstance(spec, UniformSpec):
            return UniformDistribution(M)
        if isinstance(spec, NonParametricSpec):
            if len(spec.probs) != M + 1:
                raise DistributionError(f"np needs {M + 1} probabilities, got {len(spec.probs)}")
            return NonParametricDistribution(spec.probs)
        if isinstance(spec, NormalSpec):
            return NormalDistribution(spec.mean, spec.var, dim)
        if isinstance(spec, BetaSpec):
            return BetaDistribution(spec.a, spec.b, M)
        if isinstance(spec, DirMultSpec):
            if len(spec.alpha) != dim:
                raise DistributionError(f"dirmult alpha has length {len(spec.alpha)}, expected {dim}")
            return DirichletMultinomialDistribution(spec.alpha, term.n)
        if isinstance(spec, MvnSpec):
            if len(spec.mean) != dim:
                raise DistributionError(f"mvn mean has length {len(spec.mean)}, expected {dim}")
            return MultivariateNormalDistribution(spec.mean, spec.cov)
        raise DistributionError(f"Unknown distribution spec: {spec!r}")


def sample_theoretical(
    distributions: Sequence[ClassDistribution],
    names: Sequence[str],
    count: int,
    rng: np.random.Generator
) -> pd.DataFrame:
    """Independent draws from each property's distribution, one column per statistic"""
    if count < 1:
        raise DistributionError(f"count must be >= 1, got {count}")
    blocks = [np.asarray(d.sample(count, rng), dtype=float).reshape(count, d.dim) for d in distributions]
    data = np.hstack(blocks)
    if data.shape[1] != len(names):
        raise DistributionError(f"{data.shape[1]} sampled columns for {len(names)} statistic names")
    return pd.DataFrame(data, columns=list(names))


__all__ = [
    "DistributionError",
    "ClassDistribution",
    "PoissonDistribution",
    "UniformDistribution",
    "NonParametricDistribution",
    "NormalDistribution",
    "BetaDistribution",
    "DirichletMultinomialDistribution",
    "MultivariateNormalDistribution",
    "DistributionFactory",
    "sample_theoretical",
]
