"""
Congruence class cardinality: exact ratios, asymptotic estimates and the enumeration oracle
"""
import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from config import engine_defaults
from models import (
    EnumerationTable,
    EstimatorMode,
    Graph,
    PropertyKind,
    PropertySpec,
    all_dyads,
)
from terms import PropertyTerm, SupportViolation
from services.property_stats import PropertyStats

logger = logging.getLogger(__name__)

LOG2 = math.log(2.0)


class CardinalityError(Exception):
    """Arguments outside a statistic's domain or inconsistent with each other"""
    pass


class EnumerationRefused(Exception):
    """Exhaustive enumeration requested for a population that is too large"""
    pass


# ----------------------------------------------------------------------
# Closed forms
# ----------------------------------------------------------------------

def log_binomial(n: int, k: int) -> float:
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


def log_ratio_edges(k_from: int, k_to: int, n: int) -> float:
    """log C(M, k_from) - log C(M, k_to), M = C(n, 2)"""
    M = n * (n - 1) // 2
    for k in (k_from, k_to):
        if not 0 <= k <= M:
            raise CardinalityError(f"Edge count {k} outside [0, {M}] for n={n}")
    if k_to == k_from + 1:
        return math.log((k_from + 1) / (M - k_from))
    if k_to == k_from - 1:
        return math.log((M - k_from + 1) / k_from)
    return log_binomial(M, k_from) - log_binomial(M, k_to)


def log_ratio_mixing(count: int, direction: int, capacity: int) -> float:
    """
    Log class-size ratio for one covariate block whose edge count moves by `direction`

    Args:
        count: Edges in the block before the toggle
        direction: +1 (addition), -1 (removal) or 0
        capacity: Dyads available in the block (n_i * n_j, or C(n_i, 2) within a group)
    """
    if direction == 0:
        return 0.0
    if not 0 <= count <= capacity:
        raise CardinalityError(f"Block count {count} outside [0, {capacity}]")
    if direction > 0:
        if count >= capacity:
            raise CardinalityError(f"Cannot add to a full block (count {count} = capacity {capacity})")
        return math.log((count + 1) / (capacity - count))
    if count <= 0:
        raise CardinalityError("Cannot remove from an empty block")
    return math.log((capacity - count + 1) / count)


def bin_shift(a: int, b: int, direction: int) -> Dict[int, int]:
    """
    Net change of the degree histogram when an edge between nodes of degree a and b
    is added (direction +1) or removed (-1); a and b are pre-toggle degrees
    """
    if direction > 0:
        if a == b:
            return {a: -2, a + 1: 2}
        if b == a + 1:
            return {a: -1, a + 2: 1}
        if a == b + 1:
            return {b: -1, b + 2: 1}
        return {a: -1, a + 1: 1, b: -1, b + 1: 1}
    if a == b:
        return {a: -2, a - 1: 2}
    if b == a + 1:
        return {a - 1: 1, a + 1: -1}
    if a == b + 1:
        return {b - 1: 1, b + 1: -1}
    return {a: -1, a - 1: 1, b: -1, b - 1: 1}


def log_multinomial(counts: Sequence[int]) -> float:
    c = np.asarray(counts, dtype=float)
    return float(gammaln(c.sum() + 1) - gammaln(c + 1).sum())


def log_matchings_estimate(counts: Sequence[int]) -> float:
    """
    Asymptotic log-count of simple graphs with a fixed degree sequence
    (counts[j] nodes of degree j); the stub total may be odd within a group
    """
    c = np.asarray(counts, dtype=float)
    j = np.arange(len(c), dtype=float)
    stubs = float((c * j).sum())
    if stubs == 0:
        return 0.0
    m = stubs / 2.0
    nu = float((c * j * (j - 1)).sum()) / stubs
    return float(
        gammaln(stubs + 1) - m * LOG2 - gammaln(m + 1)
        - (c * gammaln(j + 1)).sum()
        - nu / 2.0 - nu * nu / 4.0
    )


def log_degree_class_size(counts: Sequence[int]) -> float:
    """log |c(D)|: node labellings of the histogram times the estimated graphs per sequence"""
    if any(x < 0 for x in counts):
        raise CardinalityError(f"Negative degree count in {list(counts)}")
    return log_multinomial(counts) + log_matchings_estimate(counts)


def log_ratio_degreedist(counts_from: Sequence[int], a: int, b: int, direction: int) -> float:
    """log |c(D_from)| - log |c(D_to)| for a toggle between nodes of degree a and b"""
    counts_to = list(counts_from)
    for j, change in bin_shift(a, b, direction).items():
        if j >= len(counts_to):
            counts_to.extend([0] * (j + 1 - len(counts_to)))
        if j < 0:
            raise CardinalityError(f"Degree bin {j} is negative")
        counts_to[j] += change
        if counts_to[j] < 0:
            raise CardinalityError(
                f"Degree histogram {list(counts_from)} has no node of degree {j} to move"
            )
    return log_degree_class_size(counts_from) - log_degree_class_size(counts_to)


def degree_counts_from_jdm(jdm: Mapping[Tuple[int, int], int], n: int) -> List[int]:
    """Degree histogram implied by a joint degree matrix on n nodes"""
    stubs: Dict[int, int] = {}
    for (k, l), count in jdm.items():
        stubs[k] = stubs.get(k, 0) + count
        stubs[l] = stubs.get(l, 0) + count
    top = max(stubs) if stubs else 0
    counts = [0] * (top + 1)
    for k, s in stubs.items():
        if s % k != 0:
            raise CardinalityError(f"Joint degree row {k} has {s} stubs, not a multiple of {k}")
        counts[k] = s // k
    isolated = n - sum(counts)
    if isolated < 0:
        raise CardinalityError(f"Joint degree matrix needs more than n={n} nodes")
    counts[0] = isolated
    return counts


def log_jdm_class_size(jdm: Mapping[Tuple[int, int], int], counts: Sequence[int]) -> float:
    """
    log |c(J)| ~ log |c(D)| + log P(a uniform stub matching realises J)

    Args:
        jdm: Edge counts keyed by degree pair (k, l), k <= l
        counts: Degree histogram (counts[j] nodes of degree j)
    """
    row: Dict[int, int] = {}
    for (k, l), count in jdm.items():
        if count < 0:
            raise CardinalityError(f"Negative joint degree entry {(k, l)}: {count}")
        row[k] = row.get(k, 0) + count
        row[l] = row.get(l, 0) + count
    for k in range(1, len(counts)):
        if row.get(k, 0) != k * counts[k]:
            raise CardinalityError(
                f"Joint degree row {k} has {row.get(k, 0)} stubs but {counts[k]} nodes of degree {k} "
                f"need {k * counts[k]}"
            )
    for k, s in row.items():
        if k >= len(counts) and s:
            raise CardinalityError(f"Joint degree row {k} has stubs but no nodes of that degree")

    m = sum(jdm.values())
    base = log_degree_class_size(counts)
    if m == 0:
        return base
    log_match = sum(float(gammaln(k * counts[k] + 1)) for k in range(1, len(counts)))
    for (k, l), count in jdm.items():
        if k == l:
            log_match -= count * LOG2 + float(gammaln(count + 1))
        else:
            log_match -= float(gammaln(count + 1))
    log_total = float(gammaln(2 * m + 1)) - m * LOG2 - float(gammaln(m + 1))
    return base + log_match - log_total


def log_ratio_degmixing(
    jdm_from: Mapping[Tuple[int, int], int],
    jdm_to: Mapping[Tuple[int, int], int],
    n: int,
    counts_from: Optional[Sequence[int]] = None,
    counts_to: Optional[Sequence[int]] = None
) -> float:
    """log |c(J_from)| - log |c(J_to)|; degree histograms are derived when not given"""
    if counts_from is None:
        counts_from = degree_counts_from_jdm(jdm_from, n)
    if counts_to is None:
        counts_to = degree_counts_from_jdm(jdm_to, n)
    return log_jdm_class_size(jdm_from, counts_from) - log_jdm_class_size(jdm_to, counts_to)


# ----------------------------------------------------------------------
# Estimator used by the sampler
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ToggleContext:
    """Local information about one proposed toggle (degrees and edge count pre-toggle)"""
    u: int
    v: int
    adding: bool
    deg_u: int
    deg_v: int
    m: int
    n: int


class CardinalityEstimator:
    """
    Evaluates log |c(x_from)| / |c(x_to)| for a composite property.

    product-approx sums the per-term component estimators; oracle-table
    looks both classes up in an exact enumeration table.
    """

    def __init__(
        self,
        stats: PropertyStats,
        mode: EstimatorMode = EstimatorMode.PRODUCT_APPROX,
        table: Optional[EnumerationTable] = None
    ):
        self.stats = stats
        self.mode = mode
        self.table = table
        if mode == EstimatorMode.ORACLE_TABLE:
            if table is None:
                raise CardinalityError("oracle-table mode requires an enumeration table")
            if list(table.names) != stats.names or table.n != stats.n:
                raise CardinalityError(
                    f"Enumeration table (n={table.n}, {list(table.names)}) does not match the model "
                    f"(n={stats.n}, {stats.names})"
                )
        elif mode != EstimatorMode.PRODUCT_APPROX:
            raise CardinalityError(f"Unsupported model-level cardinality mode: {mode}")
        # terms without a component estimator only tilt the distribution
        self.components: List[Tuple[int, PropertyTerm]] = [
            (i, t) for i, t in enumerate(stats.terms) if t.spec.component_estimator is not None
        ]
        logger.debug(f"CardinalityEstimator mode={mode.value}, components={[t for _, t in self.components]}")

    def log_ratio(
        self,
        x_from: Sequence[Sequence[float]],
        x_to: Sequence[Sequence[float]],
        ctx: ToggleContext
    ) -> float:
        """
        log |c(x_from)| - log |c(x_to)|

        Raises:
            SupportViolation: If x_to is not a class present in the oracle table
        """
        if self.mode == EstimatorMode.ORACLE_TABLE:
            key_from = tuple(x for p in x_from for x in p)
            key_to = tuple(x for p in x_to for x in p)
            log_to = self.table.log_size(key_to)
            if log_to is None:
                raise SupportViolation("oracle-table", f"class {key_to} is empty")
            log_from = self.table.log_size(key_from)
            if log_from is None:
                raise CardinalityError(f"Current class {key_from} is missing from the table")
            return log_from - log_to

        total = 0.0
        for i, term in self.components:
            total += self._component_ratio(term, x_from[i], x_to[i], ctx)
        return total

    def _component_ratio(self, term: PropertyTerm, before, after, ctx: ToggleContext) -> float:
        kind = term.kind
        direction = 1 if ctx.adding else -1
        if kind in (PropertyKind.EDGES, PropertyKind.DENSITY):
            return log_ratio_edges(ctx.m, ctx.m + direction, ctx.n)
        if kind == PropertyKind.MIXING:
            block = term.block_of(ctx.u, ctx.v)
            return log_ratio_mixing(int(before[block]), direction, term.capacities[block])
        if kind == PropertyKind.DEGREEDIST:
            return log_ratio_degreedist(before, ctx.deg_u, ctx.deg_v, direction)
        if kind == PropertyKind.DEGMIXING:
            return log_ratio_degmixing(dict(zip(term.pairs, before)), dict(zip(term.pairs, after)), ctx.n)
        if kind == PropertyKind.DEGREEDIST_BY_GROUP:
            total = 0.0
            for group in {term.covariate[ctx.u], term.covariate[ctx.v]}:
                part = term.group_slice(group)
                total += log_degree_class_size(before[part]) - log_degree_class_size(after[part])
            return total
        return 0.0

    def log_class_size(self, parts: Sequence[Sequence[float]]) -> Optional[float]:
        """Full log class size under this estimator (None for an empty oracle class)"""
        if self.mode == EstimatorMode.ORACLE_TABLE:
            return self.table.log_size(tuple(x for p in parts for x in p))
        total = 0.0
        for i, term in self.components:
            total += component_log_size(term, parts[i])
        return total


def component_log_size(term: PropertyTerm, values: Sequence[float]) -> float:
    """Estimated log class size of one term's statistic"""
    kind = term.kind
    n = term.n
    M = n * (n - 1) // 2
    if kind == PropertyKind.EDGES:
        return log_binomial(M, int(values[0]))
    if kind == PropertyKind.DENSITY:
        return log_binomial(M, int(round(values[0] * M)))
    if kind == PropertyKind.MIXING:
        return sum(log_binomial(cap, int(x)) for cap, x in zip(term.capacities, values))
    if kind == PropertyKind.DEGREEDIST:
        return log_degree_class_size([int(x) for x in values])
    if kind == PropertyKind.DEGMIXING:
        jdm = {p: int(x) for p, x in zip(term.pairs, values)}
        return log_jdm_class_size(jdm, degree_counts_from_jdm(jdm, n))
    if kind == PropertyKind.DEGREEDIST_BY_GROUP:
        return sum(
            log_degree_class_size([int(x) for x in values[term.group_slice(grp)]])
            for grp in range(term.groups)
        )
    return 0.0


# ----------------------------------------------------------------------
# Enumeration oracle
# ----------------------------------------------------------------------

def _gray(i: int) -> int:
    return i ^ (i >> 1)


def _count_range(
    n: int,
    specs: List[PropertySpec],
    covariate: Optional[List[int]],
    start: int,
    stop: int
) -> Tuple[Dict[Tuple, int], int]:
    """Class counts over Gray-code positions [start, stop)"""
    narrow = PropertyStats(specs, n, covariate)
    wide = narrow.widened()
    position = {name: i for i, name in enumerate(wide.names)}
    keep = [position[name] for name in narrow.names]
    kept = set(keep)
    extra = [i for i in range(len(wide.names)) if i not in kept]

    dyads = list(all_dyads(n))
    g = Graph.from_mask(n, _gray(start), covariate)
    parts = wide.evaluate_parts(g)
    counts: Counter = Counter()
    outside = 0
    for i in range(start, stop):
        if i > start:
            u, v = dyads[(i & -i).bit_length() - 1]
            parts = wide.advance_parts(g, u, v, parts)
            g.toggle(u, v)
        flat = [x for p in parts for x in p]
        if any(flat[j] for j in extra):
            outside += 1
        else:
            counts[tuple(flat[j] for j in keep)] += 1
    return dict(counts), outside


def enumerate_classes(
    n: int,
    specs: Sequence[PropertySpec],
    covariate: Optional[Sequence[int]] = None,
    workers: int = 1
) -> EnumerationTable:
    """
    Exact class sizes by walking all 2^C(n,2) labelled graphs in Gray-code order

    Args:
        n: Population size (refused above the configured limit)
        specs: Resolved property specifications
        covariate: Group label per node for covariate-based properties
        workers: Processes to split the walk across

    Raises:
        EnumerationRefused: If n exceeds the enumeration limit
    """
    limit = engine_defaults.max_enumeration_nodes
    M = n * (n - 1) // 2
    if n > limit:
        raise EnumerationRefused(
            f"Enumerating n={n} means walking 2^{M} = {2 ** M:.3e} graphs; the limit is n <= {limit}"
        )
    specs = list(specs)
    cov = list(covariate) if covariate is not None else None
    names = tuple(PropertyStats(specs, n, cov).names)
    total = 2 ** M
    logger.info(f"Enumerating {total} graphs on n={n} for {list(names)}")

    if workers <= 1 or total < 4096:
        entries, outside = _count_range(n, specs, cov, 0, total)
    else:
        chunk = -(-total // (workers * 4))
        bounds = [(s, min(s + chunk, total)) for s in range(0, total, chunk)]
        merged: Counter = Counter()
        outside = 0
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_count_range, n, specs, cov, s, e) for s, e in bounds]
            for f in futures:
                part, out = f.result()
                merged.update(part)
                outside += out
        entries = dict(merged)

    table = EnumerationTable(n=n, names=names, entries=entries, outside=outside)
    if table.total != total:
        raise CardinalityError(f"Enumeration counted {table.total} graphs, expected {total}")
    logger.info(f"Enumeration found {len(entries)} classes ({outside} graphs outside the support)")
    return table


__all__ = [
    "CardinalityError",
    "EnumerationRefused",
    "ToggleContext",
    "CardinalityEstimator",
    "log_binomial",
    "log_ratio_edges",
    "log_ratio_mixing",
    "bin_shift",
    "log_multinomial",
    "log_matchings_estimate",
    "log_degree_class_size",
    "log_ratio_degreedist",
    "degree_counts_from_jdm",
    "log_jdm_class_size",
    "log_ratio_degmixing",
    "component_log_size",
    "enumerate_classes",
]
