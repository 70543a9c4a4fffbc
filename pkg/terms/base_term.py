"""
Abstract base class for property terms (one network property phi each)
"""
import logging
from abc import ABC, abstractmethod
from typing import ClassVar, Dict, List, Optional, Sequence, Tuple

from models import Graph, PropertyKind, PropertySpec

logger = logging.getLogger(__name__)


class SupportViolation(Exception):
    """A state (or proposed state) lies outside a property's support"""

    def __init__(self, term: str, message: str):
        self.term = term
        self.message = message
        super().__init__(f"{term}: {message}")


class PropertyTerm(ABC):
    """
    One network property with its statistic names, full evaluation and
    O(local) change statistic for a single dyad toggle.

    Values are held as plain lists in the sampler hot loop; `advance`
    returns the post-toggle values without mutating the graph.
    """

    kind: ClassVar[PropertyKind]
    integer_valued: ClassVar[bool] = True

    def __init__(self, spec: PropertySpec, n: int, covariate: Optional[Sequence[int]] = None):
        """
        Initialize property term

        Args:
            spec: Resolved property specification (max_degree / groups filled in)
            n: Population size
            covariate: Group label per node, when the property needs one
        """
        self.spec = spec
        self.n = n
        self.covariate = tuple(covariate) if covariate is not None else None
        self.term_name = spec.kind.value

    @property
    @abstractmethod
    def names(self) -> List[str]:
        """Statistic names, in value order"""
        pass

    @property
    def dimension(self) -> int:
        return len(self.names)

    @abstractmethod
    def evaluate(self, g: Graph) -> List[float]:
        """
        Full evaluation of the statistic

        Raises:
            SupportViolation: If g lies outside the property support
        """
        pass

    @abstractmethod
    def delta(self, g: Graph, u: int, v: int, present: bool) -> Dict[int, float]:
        """
        Sparse change of the statistic if dyad (u, v) were toggled

        Args:
            g: Current graph (not mutated)
            u, v: Dyad endpoints
            present: Whether the edge exists before the toggle

        Returns:
            Mapping of value index to change, zero entries omitted

        Raises:
            SupportViolation: If the toggled graph leaves the support
        """
        pass

    def advance(self, g: Graph, u: int, v: int, present: bool, current: List[float]) -> List[float]:
        """Post-toggle values from the cached current values"""
        changes = self.delta(g, u, v, present)
        if not changes:
            return current
        updated = list(current)
        for i, c in changes.items():
            updated[i] += c
        return updated

    def widened(self) -> "PropertyTerm":
        """Variant with the widest support on n nodes (used for enumeration)"""
        return self

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.term_name}, dim={self.dimension})"


def merge_changes(pairs: Sequence[Tuple[int, float]]) -> Dict[int, float]:
    """Sum (index, change) pairs and drop entries that cancel"""
    out: Dict[int, float] = {}
    for i, c in pairs:
        out[i] = out.get(i, 0) + c
    return {i: c for i, c in out.items() if c != 0}
