"""
Composite property evaluation: full statistics and per-toggle change statistics
"""
import logging
from typing import List, Optional, Sequence, Union

from models import Graph, PropertySpec, StatVector
from terms import PropertyTerm, SupportViolation, create_term

logger = logging.getLogger(__name__)


class PropertyStats:
    """Ordered collection of property terms evaluated as one StatVector"""

    def __init__(
        self,
        specs: Sequence[PropertySpec],
        n: int,
        covariate: Optional[Sequence[int]] = None,
        terms: Optional[List[PropertyTerm]] = None
    ):
        """
        Initialize composite statistics

        Args:
            specs: Resolved property specifications, in model order
            n: Population size
            covariate: Group label per node (required by covariate-based kinds)
            terms: Pre-built terms (used for widened enumeration variants)
        """
        self.specs = list(specs)
        self.n = n
        self.covariate = covariate
        self.terms: List[PropertyTerm] = terms if terms is not None else [
            create_term(spec, n, covariate) for spec in self.specs
        ]
        self.names: List[str] = [name for t in self.terms for name in t.names]
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"Duplicate statistic names in model: {self.names}")
        self.offsets: List[int] = []
        offset = 0
        for t in self.terms:
            self.offsets.append(offset)
            offset += t.dimension
        logger.debug(f"PropertyStats initialized with terms: {self.terms}")

    @property
    def dimension(self) -> int:
        return len(self.names)

    def evaluate_parts(self, g: Graph) -> List[List[float]]:
        """Per-term values (raises SupportViolation outside the support)"""
        return [t.evaluate(g) for t in self.terms]

    def evaluate(self, g: Graph) -> StatVector:
        return self.to_vector(self.evaluate_parts(g))

    def advance_parts(self, g: Graph, u: int, v: int, current: List[List[float]]) -> List[List[float]]:
        """Per-term values after toggling (u, v); g is not mutated"""
        present = g.has_edge(u, v)
        return [t.advance(g, u, v, present, cur) for t, cur in zip(self.terms, current)]

    def change_stat(self, g: Graph, u: int, v: int) -> StatVector:
        """
        phi(g with (u, v) toggled) - phi(g), computed locally

        Raises:
            SupportViolation: If the toggled graph leaves a term's support
        """
        g.dyad(u, v)
        present = g.has_edge(u, v)
        values: List[float] = [0] * self.dimension
        for t, offset in zip(self.terms, self.offsets):
            for i, c in t.delta(g, u, v, present).items():
                values[offset + i] = c
        return StatVector(tuple(self.names), tuple(values))

    def to_vector(self, parts: Sequence[Sequence[float]]) -> StatVector:
        return StatVector(tuple(self.names), tuple(x for p in parts for x in p))

    def widened(self) -> "PropertyStats":
        """Same properties with degree-indexed supports widened to n - 1"""
        return PropertyStats(self.specs, self.n, self.covariate, [t.widened() for t in self.terms])


SpecLike = Union[PropertySpec, Sequence[PropertySpec]]


def _as_stats(spec: SpecLike, g: Graph) -> PropertyStats:
    specs = [spec] if isinstance(spec, PropertySpec) else list(spec)
    return PropertyStats(specs, g.n, g.covariate)


def evaluate(spec: SpecLike, g: Graph) -> StatVector:
    """phi(g) for one property spec or a composite list of them"""
    return _as_stats(spec, g).evaluate(g)


def change_stat(spec: SpecLike, g: Graph, u: int, v: int) -> StatVector:
    """Change statistic of toggling (u, v) for one property spec or a composite list"""
    return _as_stats(spec, g).change_stat(g, u, v)


__all__ = ["PropertyStats", "SupportViolation", "evaluate", "change_stat"]
