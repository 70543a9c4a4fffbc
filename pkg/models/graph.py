"""
Mutable simple undirected graph used as the sampler state
"""
import logging
from typing import Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from config import engine_defaults

logger = logging.getLogger(__name__)


class GraphUsageError(ValueError):
    """Invalid node index, dyad or covariate vector"""
    pass


class EmptySelectionError(Exception):
    """Uniform selection requested from an empty pool"""
    pass


class Dyad(NamedTuple):
    """Unordered node pair stored with u < v"""
    u: int
    v: int


class Graph:
    """
    Simple undirected labelled graph on nodes 0..n-1.

    Keeps adjacency sets, the degree sequence, the degree histogram and an
    indexable edge pool up to date on every toggle, so edge queries, degree
    lookups and uniform edge selection are O(1).
    """

    __slots__ = (
        "n", "covariate", "_adj", "_deg", "_deg_counts", "_edges", "_edge_pos", "_free", "_free_pos"
    )

    def __init__(self, n: int, covariate: Optional[Sequence[int]] = None):
        """
        Create an empty graph

        Args:
            n: Number of nodes (>= 1)
            covariate: Optional group label per node (values 0..G-1)
        """
        if n < 1:
            raise GraphUsageError(f"Node count must be >= 1, got {n}")
        self.n = int(n)
        self.covariate: Optional[Tuple[int, ...]] = None
        if covariate is not None:
            labels = tuple(int(c) for c in covariate)
            if len(labels) != self.n:
                raise GraphUsageError(
                    f"Covariate vector has length {len(labels)}, expected {self.n}"
                )
            if any(c < 0 for c in labels):
                raise GraphUsageError("Covariate labels must be non-negative integers")
            self.covariate = labels
        self._adj: List[Set[int]] = [set() for _ in range(self.n)]
        self._deg: List[int] = [0] * self.n
        self._deg_counts: List[int] = [0] * self.n
        self._deg_counts[0] = self.n
        self._edges: List[Dyad] = []
        self._edge_pos: dict = {}
        # non-edge pool, built on demand for dense graphs and then kept in step with toggles
        self._free: Optional[List[Dyad]] = None
        self._free_pos: Optional[dict] = None

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Tuple[int, int]],
        covariate: Optional[Sequence[int]] = None
    ) -> "Graph":
        """Build a graph from an iterable of node pairs (duplicates rejected)"""
        g = cls(n, covariate)
        for a, b in edges:
            d = g.dyad(a, b)
            if g.has_edge(d.u, d.v):
                raise GraphUsageError(f"Duplicate edge ({d.u}, {d.v})")
            g._add(d)
        return g

    @classmethod
    def from_mask(cls, n: int, mask: int, covariate: Optional[Sequence[int]] = None) -> "Graph":
        """Build a graph whose edge set is the bitmask over dyad indices"""
        g = cls(n, covariate)
        for index, d in enumerate(all_dyads(n)):
            if (mask >> index) & 1:
                g._add(d)
        return g

    def copy(self) -> "Graph":
        """Deep copy (used for ensemble snapshots)"""
        g = Graph.__new__(Graph)
        g.n = self.n
        g.covariate = self.covariate
        g._adj = [set(s) for s in self._adj]
        g._deg = list(self._deg)
        g._deg_counts = list(self._deg_counts)
        g._edges = list(self._edges)
        g._edge_pos = dict(self._edge_pos)
        g._free = None
        g._free_pos = None
        return g

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def max_edges(self) -> int:
        """M = C(n, 2)"""
        return self.n * (self.n - 1) // 2

    @property
    def density(self) -> float:
        return self.m / self.max_edges if self.max_edges else 0.0

    @property
    def groups(self) -> int:
        """Number of covariate groups (max label + 1), 0 without covariates"""
        return max(self.covariate) + 1 if self.covariate else 0

    def dyad(self, a: int, b: int) -> Dyad:
        """Validate a node pair and return it as an ordered dyad"""
        if not (0 <= a < self.n and 0 <= b < self.n):
            raise GraphUsageError(f"Node index out of range for n={self.n}: ({a}, {b})")
        if a == b:
            raise GraphUsageError(f"Self-loop ({a}, {b}) is not a valid dyad")
        return Dyad(a, b) if a < b else Dyad(b, a)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def neighbors(self, u: int) -> Set[int]:
        """Neighbour set of u (read-only view, do not mutate)"""
        return self._adj[u]

    def degree(self, u: int) -> int:
        return self._deg[u]

    @property
    def degrees(self) -> List[int]:
        """Degree sequence (read-only view, do not mutate)"""
        return self._deg

    @property
    def degree_counts(self) -> List[int]:
        """Histogram: degree_counts[j] = number of nodes with degree j"""
        return self._deg_counts

    @property
    def max_degree(self) -> int:
        return max(self._deg)

    def edges(self) -> List[Dyad]:
        """Edge list sorted ascending"""
        return sorted(self._edges)

    def edge_mask(self) -> int:
        """Bitmask of the edge set over dyad indices"""
        mask = 0
        for d in self._edges:
            mask |= 1 << dyad_index(self.n, d.u, d.v)
        return mask

    # ------------------------------------------------------------------
    # Mutation
    # ------------------------------------------------------------------

    def toggle(self, a: int, b: int) -> bool:
        """
        Flip the presence of dyad (a, b) in place

        Args:
            a, b: Node indices

        Returns:
            True if the edge was present before the toggle

        Raises:
            GraphUsageError: If an index is out of range or a == b
        """
        d = self.dyad(a, b)
        if d.v in self._adj[d.u]:
            self._remove(d)
            return True
        self._add(d)
        return False

    def _add(self, d: Dyad) -> None:
        u, v = d
        self._adj[u].add(v)
        self._adj[v].add(u)
        for w in (u, v):
            self._deg_counts[self._deg[w]] -= 1
            self._deg[w] += 1
            self._deg_counts[self._deg[w]] += 1
        _pool_append(self._edges, self._edge_pos, d)
        if self._free is not None:
            _pool_discard(self._free, self._free_pos, d)

    def _remove(self, d: Dyad) -> None:
        u, v = d
        self._adj[u].discard(v)
        self._adj[v].discard(u)
        for w in (u, v):
            self._deg_counts[self._deg[w]] -= 1
            self._deg[w] -= 1
            self._deg_counts[self._deg[w]] += 1
        _pool_discard(self._edges, self._edge_pos, d)
        if self._free is not None:
            _pool_append(self._free, self._free_pos, d)

    # ------------------------------------------------------------------
    # Uniform selection for tie / no-tie proposals
    # ------------------------------------------------------------------

    def uniform_edge(self, rng: np.random.Generator) -> Dyad:
        """Existing edge chosen with probability exactly 1/m"""
        if not self._edges:
            raise EmptySelectionError("uniform_edge requires m > 0")
        return self._edges[int(rng.integers(len(self._edges)))]

    def uniform_nonedge(self, rng: np.random.Generator) -> Dyad:
        """Absent dyad chosen with probability exactly 1/(M - m)"""
        free = self.max_edges - self.m
        if free <= 0:
            raise EmptySelectionError("uniform_nonedge requires m < M")
        if self.m < engine_defaults.rejection_density_threshold * self.max_edges:
            self._free = self._free_pos = None
            n = self.n
            while True:
                a = int(rng.integers(n))
                b = int(rng.integers(n - 1))
                if b >= a:
                    b += 1
                if b not in self._adj[a]:
                    return Dyad(a, b) if a < b else Dyad(b, a)
        if self._free is None:
            self._free = [d for d in all_dyads(self.n) if d.v not in self._adj[d.u]]
            self._free_pos = {d: i for i, d in enumerate(self._free)}
            logger.debug(f"Built non-edge pool of {len(self._free)} dyads at density {self.density:.3f}")
        return self._free[int(rng.integers(free))]

    # ------------------------------------------------------------------
    # Consistency and interop
    # ------------------------------------------------------------------

    def recount_matches(self) -> bool:
        """Full recount of degrees, histogram and edge pool against the incremental state"""
        deg = [len(s) for s in self._adj]
        counts = [0] * self.n
        for d in deg:
            counts[d] += 1
        symmetric = all(u in self._adj[v] for u in range(self.n) for v in self._adj[u])
        loop_free = all(u not in self._adj[u] for u in range(self.n))
        pool_ok = (
            len(self._edges) == sum(deg) // 2
            and all(self._edges[p] == d for d, p in self._edge_pos.items())
            and all(d.v in self._adj[d.u] for d in self._edges)
        )
        if self._free is not None:
            pool_ok = pool_ok and (
                len(self._free) == self.max_edges - len(self._edges)
                and all(self._free[p] == d for d, p in self._free_pos.items())
                and all(d.v not in self._adj[d.u] for d in self._free)
            )
        return (
            symmetric and loop_free and pool_ok
            and deg == self._deg and counts == self._deg_counts
            and sum(deg) == 2 * self.m
        )

    def to_networkx(self) -> nx.Graph:
        """Hand the graph to networkx (covariates become the 'group' node attribute)"""
        h = nx.Graph()
        h.add_nodes_from(range(self.n))
        h.add_edges_from(self._edges)
        if self.covariate is not None:
            nx.set_node_attributes(h, dict(enumerate(self.covariate)), "group")
        return h

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.covariate == other.covariate
            and set(self._edges) == set(other._edges)
        )

    __hash__ = None  # mutable

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def all_dyads(n: int) -> Iterable[Dyad]:
    """All C(n, 2) dyads in ascending order"""
    for u in range(n):
        for v in range(u + 1, n):
            yield Dyad(u, v)


def dyad_index(n: int, u: int, v: int) -> int:
    """Position of dyad (u, v), u < v, in the ascending order of all_dyads"""
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


def _pool_append(pool: List[Dyad], pos: dict, d: Dyad) -> None:
    pos[d] = len(pool)
    pool.append(d)


def _pool_discard(pool: List[Dyad], pos: dict, d: Dyad) -> None:
    # swap-remove keeps the pool dense
    i = pos.pop(d)
    last = pool.pop()
    if i < len(pool):
        pool[i] = last
        pos[last] = i
