"""
Tie-no-tie Metropolis-Hastings sampler for congruence class models
"""
import logging
import math
import time
from enum import Enum
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
import pandas as pd

from config import engine_defaults
from models import (
    AcceptanceCounts,
    Dyad,
    EnumerationTable,
    EstimatorMode,
    Graph,
    ModelConfig,
    PropertyKind,
    SampleOutput,
    SamplerConfig,
    all_dyads,
)
from services.cardinality import CardinalityError, CardinalityEstimator, ToggleContext
from services.distributions import (
    ClassDistribution,
    DistributionError,
    DistributionFactory,
    NonParametricDistribution,
)
from services.property_stats import PropertyStats
from terms import SupportViolation

logger = logging.getLogger(__name__)


class SamplerError(Exception):
    """Unrecoverable sampler failure (bad initial state, NaN acceptance, cache drift)"""
    pass


class StepOutcome(str, Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    OUT_OF_SUPPORT = "out_of_support"


class Proposal(NamedTuple):
    dyad: Dyad
    adding: bool
    log_q_ratio: float


class ProposalTerms(NamedTuple):
    """Pieces of the log acceptance ratio for one proposal"""
    log_pmf_ratio: float
    log_cardinality_ratio: float
    log_q_ratio: float
    new_values: List[List[float]]

    @property
    def total(self) -> float:
        return self.log_pmf_ratio + self.log_cardinality_ratio + self.log_q_ratio


def _p_delete(m: int, M: int) -> float:
    if m == 0:
        return 0.0
    if m == M:
        return 1.0
    return 0.5


def tnt_log_q_ratio(m: int, M: int, adding: bool) -> float:
    """
    Log of reverse over forward proposal probability for a tie-no-tie move from m edges

    Interior states give log((M-m)/(m+1)) for additions; the boundaries
    use the forced move probabilities.
    """
    if adding:
        q_fwd = (1.0 - _p_delete(m, M)) / (M - m)
        q_rev = _p_delete(m + 1, M) / (m + 1)
    else:
        q_fwd = _p_delete(m, M) / m
        q_rev = (1.0 - _p_delete(m - 1, M)) / (M - m + 1)
    return math.log(q_rev / q_fwd)


def propose(g: Graph, rng: np.random.Generator) -> Proposal:
    """
    Tie-no-tie proposal: delete a uniform edge or add a uniform non-edge with
    probability 1/2 each, forced at the empty and complete graphs
    """
    M = g.max_edges
    m = g.m
    if m == 0:
        adding = True
    elif m == M:
        adding = False
    else:
        adding = rng.random() >= 0.5
    dyad = g.uniform_nonedge(rng) if adding else g.uniform_edge(rng)
    return Proposal(dyad, adding, tnt_log_q_ratio(m, M, adding))


class CcmSampler:
    """Sampler for one CCM: property terms, distributions and the cardinality estimator"""

    def __init__(self, model: ModelConfig, table: Optional[EnumerationTable] = None):
        """
        Initialize the sampler

        Args:
            model: Validated model configuration
            table: Enumeration table for oracle-table cardinality mode
        """
        self.model = model
        self.n = model.population
        self.stats = PropertyStats(model.properties, self.n, model.covariate)
        self.distributions: List[ClassDistribution] = [
            DistributionFactory.create(spec, term)
            for spec, term in zip(model.distributions, self.stats.terms)
        ]
        self.estimator = CardinalityEstimator(self.stats, model.cardinality.mode, table)
        self.names = self.stats.names
        logger.info(
            f"CcmSampler initialized: n={self.n}, terms={self.stats.terms}, "
            f"cardinality={model.cardinality.mode.value}"
        )

    # ------------------------------------------------------------------
    # Acceptance ratio
    # ------------------------------------------------------------------

    def evaluate_proposal(self, g: Graph, proposal: Proposal, current: List[List[float]]) -> ProposalTerms:
        """
        Log acceptance components for a proposal

        Raises:
            SupportViolation: If the proposal leaves any property's support
            SamplerError: If a component is NaN
        """
        u, v = proposal.dyad
        present = not proposal.adding
        new_values = []
        for term, cur in zip(self.stats.terms, current):
            new_values.append(term.advance(g, u, v, present, cur))

        log_pmf = 0.0
        for term, dist, cur, new in zip(self.stats.terms, self.distributions, current, new_values):
            if new is cur:
                continue
            ratio = dist.log_pmf_ratio(cur, new)
            if math.isnan(ratio):
                raise SamplerError(f"NaN log-probability ratio from {dist} on {term.term_name}")
            if ratio == -math.inf:
                raise SupportViolation(term.term_name, f"{dist.kind.value} gives zero probability to {new}")
            log_pmf += ratio

        ctx = ToggleContext(u, v, proposal.adding, g.degree(u), g.degree(v), g.m, g.n)
        log_card = self.estimator.log_ratio(current, new_values, ctx)
        if math.isnan(log_card):
            raise SamplerError(f"NaN cardinality ratio at toggle ({u}, {v})")
        return ProposalTerms(log_pmf, log_card, proposal.log_q_ratio, new_values)

    # ------------------------------------------------------------------
    # Initial state
    # ------------------------------------------------------------------

    def check_support(self, g: Graph) -> List[List[float]]:
        """
        Values of g, verified to lie in every property's support

        Raises:
            SamplerError: Naming the violated property
        """
        try:
            values = self.stats.evaluate_parts(g)
        except SupportViolation as e:
            raise SamplerError(f"Initial graph is outside the support: {e}")
        for term, dist, vals in zip(self.stats.terms, self.distributions, values):
            if dist.log_pmf(vals) == -math.inf:
                raise SamplerError(
                    f"Initial graph has zero probability under {dist.kind.value} on {term.term_name}: {vals}"
                )
        if self.model.cardinality.mode == EstimatorMode.ORACLE_TABLE:
            if self.estimator.log_class_size(values) is None:
                raise SamplerError("Initial graph's class is missing from the enumeration table")
        return values

    def _bernoulli_graph(self, rng: np.random.Generator) -> Graph:
        kinds = {t.kind for t in self.stats.terms}
        g = Graph(self.n, self.model.covariate)
        if kinds - {PropertyKind.EDGES, PropertyKind.DENSITY, PropertyKind.MIXING}:
            # degree-indexed and triangle statistics start empty
            return g
        M = g.max_edges
        p_global = None
        block_p = None
        for term, dist in zip(self.stats.terms, self.distributions):
            mean = dist.mean()
            if term.kind == PropertyKind.EDGES:
                p_global = float(mean[0]) / M
            elif term.kind == PropertyKind.DENSITY:
                p_global = float(mean[0])
            elif term.kind == PropertyKind.MIXING:
                block_p = [
                    (float(mu) / cap) if cap else 0.0 for mu, cap in zip(mean, term.capacities)
                ]
                mixing = term
        draws = rng.random(M)
        for k, d in enumerate(all_dyads(self.n)):
            p = p_global if block_p is None else block_p[mixing.block_of(d.u, d.v)]
            if draws[k] < min(max(p, 0.0), 1.0):
                g.toggle(d.u, d.v)
        return g

    def initial_graph(self, rng: np.random.Generator) -> Graph:
        """
        Construct a starting graph in the support

        Bernoulli draws at the target mean for edge-like properties, the empty
        graph for degree-indexed ones; falls back to G(n, mode) for np.

        Raises:
            SamplerError: If no supported graph is found
        """
        last_error: Optional[Exception] = None
        for _ in range(engine_defaults.max_init_attempts):
            g = self._bernoulli_graph(rng)
            try:
                self.check_support(g)
                return g
            except SamplerError as e:
                last_error = e
        for term, dist in zip(self.stats.terms, self.distributions):
            if isinstance(dist, NonParametricDistribution):
                g = Graph(self.n, self.model.covariate)
                pool = list(all_dyads(self.n))
                chosen = rng.choice(len(pool), size=dist.mode(), replace=False)
                for k in chosen:
                    g.toggle(*pool[int(k)])
                try:
                    self.check_support(g)
                    return g
                except SamplerError as e:
                    last_error = e
        raise SamplerError(f"Could not construct an initial graph in the support: {last_error}")

    # ------------------------------------------------------------------
    # Run
    # ------------------------------------------------------------------

    def run(self, config: SamplerConfig, initial_graph: Optional[Graph] = None) -> SampleOutput:
        """
        Run burn-in then record sample_size snapshots every interval toggle attempts

        Args:
            config: Sampler configuration (seed, burnin, interval, sample_size, ...)
            initial_graph: Starting graph when config.use_initial is set

        Returns:
            SampleOutput with the statistics table, optional ensemble and acceptance counts
        """
        seed = config.seed if config.seed is not None else int(
            np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0]
        )
        rng = np.random.default_rng(seed)
        start = time.perf_counter()

        if config.use_initial:
            start_graph = initial_graph if initial_graph is not None else config.initial_graph
            if not isinstance(start_graph, Graph):
                raise SamplerError("use_initial requires an initial Graph")
            if start_graph.n != self.n:
                raise SamplerError(f"Initial graph has n={start_graph.n}, model has n={self.n}")
            g = start_graph.copy()
            if self.model.covariate is not None and g.covariate is None:
                g = Graph.from_edges(self.n, g.edges(), self.model.covariate)
        else:
            g = self.initial_graph(rng)
        current = self.check_support(g)

        counts = AcceptanceCounts()
        total = config.burnin + config.sample_size * config.interval
        records = np.empty((config.sample_size, self.stats.dimension), dtype=float)
        ensemble: List[Graph] = []
        logger.info(
            f"Sampling: seed={seed}, burnin={config.burnin}, interval={config.interval}, "
            f"sample_size={config.sample_size} ({total} toggle attempts)"
        )

        attempt = 0
        next_record = config.burnin + config.interval
        recorded = 0
        progress_every = engine_defaults.progress_interval
        recompute_every = engine_defaults.recompute_interval
        while attempt < total:
            attempt += 1
            current, _ = self.step(g, rng, current, counts, config.debug)

            if attempt == next_record:
                records[recorded] = [x for part in current for x in part]
                if not config.stats_only:
                    ensemble.append(g.copy())
                recorded += 1
                next_record += config.interval
            if attempt % progress_every == 0:
                logger.info(
                    f"{attempt}/{total} attempts, acceptance rate {counts.acceptance_rate:.4f}"
                )
            if config.debug and attempt % recompute_every == 0:
                self._verify_cache(g, current)

        stats = pd.DataFrame(records, columns=self.names)
        for term in self.stats.terms:
            if term.integer_valued:
                for name in term.names:
                    stats[name] = stats[name].round().astype(np.int64)

        elapsed = time.perf_counter() - start
        logger.info(
            f"Sampling finished in {elapsed:.2f}s: proposed={counts.proposed}, accepted={counts.accepted}, "
            f"rejected={counts.rejected}, auto_rejected={counts.auto_rejected}"
        )
        return SampleOutput(
            stats=stats,
            ensemble=ensemble,
            acceptance=counts,
            final_state=g.copy(),
            seed=seed,
            names=list(self.names),
            execution_time=elapsed,
        )

    def step(
        self,
        g: Graph,
        rng: np.random.Generator,
        current: List[List[float]],
        counts: AcceptanceCounts,
        debug: bool = False
    ) -> Tuple[List[List[float]], StepOutcome]:
        """
        One toggle attempt; mutates g only on acceptance

        Returns:
            The (possibly updated) cached values and the step outcome
        """
        counts.proposed += 1
        proposal = propose(g, rng)
        try:
            terms = self.evaluate_proposal(g, proposal, current)
        except SupportViolation:
            counts.auto_rejected += 1
            return current, StepOutcome.OUT_OF_SUPPORT
        except (DistributionError, CardinalityError) as e:
            raise SamplerError(f"Acceptance ratio failed at toggle {tuple(proposal.dyad)}: {e}")

        delta = terms.total
        if delta >= 0 or math.log(rng.random()) < delta:
            g.toggle(*proposal.dyad)
            counts.accepted += 1
            return terms.new_values, StepOutcome.ACCEPTED

        counts.rejected += 1
        if debug:
            # rejected proposals must leave the graph untouched
            if g.has_edge(*proposal.dyad) == proposal.adding:
                raise SamplerError(f"Rejected proposal {tuple(proposal.dyad)} mutated the graph")
        return current, StepOutcome.REJECTED

    def _verify_cache(self, g: Graph, current: List[List[float]]) -> None:
        fresh = self.stats.evaluate_parts(g)
        if fresh != current:
            raise SamplerError(f"Cached statistics drifted from a full recount: {current} vs {fresh}")
        if not g.recount_matches():
            raise SamplerError("Graph bookkeeping drifted from a full recount")
        logger.debug("Cached statistics verified against a full recount")


def sample(
    model: ModelConfig,
    config: SamplerConfig,
    initial_graph: Optional[Graph] = None,
    table: Optional[EnumerationTable] = None
) -> SampleOutput:
    """Build a sampler for `model` and run it"""
    return CcmSampler(model, table).run(config, initial_graph)


__all__ = [
    "SamplerError",
    "StepOutcome",
    "Proposal",
    "ProposalTerms",
    "tnt_log_q_ratio",
    "propose",
    "CcmSampler",
    "sample",
]
