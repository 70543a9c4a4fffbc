"""
Edge count, density and triangle count
"""
from typing import Dict, List

from models import Graph, PropertyKind
from .base_term import PropertyTerm


class EdgesTerm(PropertyTerm):
    """Number of edges"""

    kind = PropertyKind.EDGES

    @property
    def names(self) -> List[str]:
        return ["edges"]

    def evaluate(self, g: Graph) -> List[float]:
        return [g.m]

    def delta(self, g: Graph, u: int, v: int, present: bool) -> Dict[int, float]:
        return {0: -1 if present else 1}


class DensityTerm(PropertyTerm):
    """Edge count divided by C(n, 2)"""

    kind = PropertyKind.DENSITY
    integer_valued = False

    @property
    def names(self) -> List[str]:
        return ["density"]

    def evaluate(self, g: Graph) -> List[float]:
        return [g.m / g.max_edges]

    def delta(self, g: Graph, u: int, v: int, present: bool) -> Dict[int, float]:
        m_after = g.m - 1 if present else g.m + 1
        return {0: m_after / g.max_edges - g.m / g.max_edges}

    def advance(self, g: Graph, u: int, v: int, present: bool, current: List[float]) -> List[float]:
        # recomputed from the edge count so no rounding accumulates
        m_after = g.m - 1 if present else g.m + 1
        return [m_after / g.max_edges]


class TrianglesTerm(PropertyTerm):
    """Number of triangles; a toggle changes it by the common-neighbour count"""

    kind = PropertyKind.TRIANGLES

    @property
    def names(self) -> List[str]:
        return ["triangles"]

    def evaluate(self, g: Graph) -> List[float]:
        total = 0
        for u, v in g.edges():
            total += len(g.neighbors(u) & g.neighbors(v))
        return [total // 3]

    def delta(self, g: Graph, u: int, v: int, present: bool) -> Dict[int, float]:
        shared = len(g.neighbors(u) & g.neighbors(v))
        if shared == 0:
            return {}
        return {0: -shared if present else shared}
