"""
Degree distribution, joint degree (degree mixing) and per-group degree distribution
"""
from typing import Dict, List, Optional, Sequence, Tuple

from models import Graph, PropertyKind, PropertySpec
from .base_term import PropertyTerm, SupportViolation, merge_changes


class _DegreeIndexedTerm(PropertyTerm):
    """Shared support handling for statistics indexed by node degree 0..K"""

    def __init__(self, spec: PropertySpec, n: int, covariate: Optional[Sequence[int]] = None):
        super().__init__(spec, n, covariate)
        self.max_degree = spec.max_degree if spec.max_degree is not None else n - 1

    def _check_state(self, g: Graph) -> None:
        top = g.max_degree
        if top > self.max_degree:
            raise SupportViolation(
                self.term_name, f"graph has a node of degree {top} > max_degree {self.max_degree}"
            )

    def _check_addition(self, a: int, b: int) -> None:
        if a + 1 > self.max_degree or b + 1 > self.max_degree:
            raise SupportViolation(
                self.term_name, f"toggle raises a degree above max_degree {self.max_degree}"
            )

    def widened(self) -> "PropertyTerm":
        wide = self.spec.model_copy(update={"max_degree": max(self.max_degree, self.n - 1)})
        return type(self)(wide, self.n, self.covariate)


class DegreeDistTerm(_DegreeIndexedTerm):
    """Counts of nodes with degree 0..K"""

    kind = PropertyKind.DEGREEDIST

    @property
    def names(self) -> List[str]:
        return [f"deg{j}" for j in range(self.max_degree + 1)]

    def evaluate(self, g: Graph) -> List[float]:
        self._check_state(g)
        counts = g.degree_counts
        return [counts[j] if j < len(counts) else 0 for j in range(self.max_degree + 1)]

    def delta(self, g: Graph, u: int, v: int, present: bool) -> Dict[int, float]:
        a, b = g.degree(u), g.degree(v)
        if present:
            return merge_changes([(a, -1), (a - 1, 1), (b, -1), (b - 1, 1)])
        self._check_addition(a, b)
        return merge_changes([(a, -1), (a + 1, 1), (b, -1), (b + 1, 1)])


class DegMixingTerm(_DegreeIndexedTerm):
    """
    Joint degree matrix: edge counts between degree classes i <= j, 1 <= i, j <= K.

    An edge is classified by the current degrees of its endpoints, so a toggle
    reclassifies every other edge incident to u or v.
    """

    kind = PropertyKind.DEGMIXING

    def __init__(self, spec: PropertySpec, n: int, covariate: Optional[Sequence[int]] = None):
        super().__init__(spec, n, covariate)
        self.pairs: List[Tuple[int, int]] = [
            (i, j) for i in range(1, self.max_degree + 1) for j in range(i, self.max_degree + 1)
        ]
        self.index: Dict[Tuple[int, int], int] = {p: k for k, p in enumerate(self.pairs)}

    @property
    def names(self) -> List[str]:
        return [f"DM{i}{j}" for i, j in self.pairs]

    def _slot(self, x: int, y: int) -> int:
        return self.index[(x, y) if x <= y else (y, x)]

    def evaluate(self, g: Graph) -> List[float]:
        self._check_state(g)
        values = [0] * len(self.pairs)
        for u, v in g.edges():
            values[self._slot(g.degree(u), g.degree(v))] += 1
        return values

    def delta(self, g: Graph, u: int, v: int, present: bool) -> Dict[int, float]:
        a, b = g.degree(u), g.degree(v)
        step = -1 if present else 1
        if not present:
            self._check_addition(a, b)
        pairs: List[Tuple[int, float]] = []
        for node, d in ((u, a), (v, b)):
            other = v if node == u else u
            for w in g.neighbors(node):
                if w == other:
                    continue
                dw = g.degree(w)
                pairs.append((self._slot(d, dw), -1))
                pairs.append((self._slot(d + step, dw), 1))
        if present:
            pairs.append((self._slot(a, b), -1))
        else:
            pairs.append((self._slot(a + 1, b + 1), 1))
        return merge_changes(pairs)


class DegreeDistByGroupTerm(_DegreeIndexedTerm):
    """Degree distribution within each covariate group, group-major order"""

    kind = PropertyKind.DEGREEDIST_BY_GROUP

    def __init__(self, spec: PropertySpec, n: int, covariate: Optional[Sequence[int]] = None):
        super().__init__(spec, n, covariate)
        if self.covariate is None:
            raise ValueError("degreedist_by_group requires covariate labels")
        self.groups = spec.groups or max(self.covariate) + 1

    @property
    def names(self) -> List[str]:
        return [f"G{grp}deg{j}" for grp in range(self.groups) for j in range(self.max_degree + 1)]

    def _slot(self, node: int, degree: int) -> int:
        return self.covariate[node] * (self.max_degree + 1) + degree

    def evaluate(self, g: Graph) -> List[float]:
        self._check_state(g)
        values = [0] * (self.groups * (self.max_degree + 1))
        for node in range(g.n):
            values[self._slot(node, g.degree(node))] += 1
        return values

    def delta(self, g: Graph, u: int, v: int, present: bool) -> Dict[int, float]:
        a, b = g.degree(u), g.degree(v)
        if present:
            return merge_changes([
                (self._slot(u, a), -1), (self._slot(u, a - 1), 1),
                (self._slot(v, b), -1), (self._slot(v, b - 1), 1),
            ])
        self._check_addition(a, b)
        return merge_changes([
            (self._slot(u, a), -1), (self._slot(u, a + 1), 1),
            (self._slot(v, b), -1), (self._slot(v, b + 1), 1),
        ])

    def group_slice(self, group: int) -> slice:
        width = self.max_degree + 1
        return slice(group * width, (group + 1) * width)
