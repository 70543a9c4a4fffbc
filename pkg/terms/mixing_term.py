"""
Covariate mixing: edge counts between (and within) covariate groups
"""
from typing import Dict, List, Optional, Sequence, Tuple

from models import Graph, PropertyKind, PropertySpec
from .base_term import PropertyTerm


class MixingTerm(PropertyTerm):
    """Edges per unordered group pair (i <= j)"""

    kind = PropertyKind.MIXING

    def __init__(self, spec: PropertySpec, n: int, covariate: Optional[Sequence[int]] = None):
        super().__init__(spec, n, covariate)
        if self.covariate is None:
            raise ValueError("mixing requires covariate labels")
        self.groups = spec.groups or max(self.covariate) + 1
        self.blocks: List[Tuple[int, int]] = [
            (i, j) for i in range(self.groups) for j in range(i, self.groups)
        ]
        self.index: Dict[Tuple[int, int], int] = {b: k for k, b in enumerate(self.blocks)}
        sizes = [0] * self.groups
        for label in self.covariate:
            sizes[label] += 1
        self.group_sizes = sizes
        # dyads available in each block
        self.capacities: List[int] = [
            sizes[i] * (sizes[i] - 1) // 2 if i == j else sizes[i] * sizes[j]
            for i, j in self.blocks
        ]

    @property
    def names(self) -> List[str]:
        return [f"MIX{i}.{j}" for i, j in self.blocks]

    def block_of(self, u: int, v: int) -> int:
        x, y = self.covariate[u], self.covariate[v]
        return self.index[(x, y) if x <= y else (y, x)]

    def evaluate(self, g: Graph) -> List[float]:
        values = [0] * len(self.blocks)
        for u, v in g.edges():
            values[self.block_of(u, v)] += 1
        return values

    def delta(self, g: Graph, u: int, v: int, present: bool) -> Dict[int, float]:
        return {self.block_of(u, v): -1 if present else 1}
