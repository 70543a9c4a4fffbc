"""
Chain orchestrator - runs independent sampler chains concurrently
"""
import asyncio
import logging
import time
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from typing import List, Literal, Optional

import numpy as np

from models import ChainResult, EnumerationTable, Graph, ModelConfig, SampleOutput, SamplerConfig
from services.sampler import CcmSampler

logger = logging.getLogger(__name__)


def derive_chain_seeds(seed: int, chains: int) -> List[int]:
    """
    Independent per-chain seeds spawned from one master seed

    A single chain keeps the master seed itself so a one-chain run is
    reproducible with the plain sampler.
    """
    if chains < 1:
        raise ValueError(f"chains must be >= 1, got {chains}")
    if chains == 1:
        return [seed]
    children = np.random.SeedSequence(seed).spawn(chains)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def _run_chain(
    model: ModelConfig,
    config: SamplerConfig,
    initial_graph: Optional[Graph],
    table: Optional[EnumerationTable]
) -> SampleOutput:
    """Worker entry point (module level so process pools can pickle it)"""
    return CcmSampler(model, table).run(config, initial_graph)


class ChainOrchestrator:
    """Runs k chains of one model with derived seeds, each chain in its own worker"""

    def __init__(
        self,
        model: ModelConfig,
        config: SamplerConfig,
        table: Optional[EnumerationTable] = None,
        initial_graph: Optional[Graph] = None,
        executor: Literal["process", "thread"] = "process",
        max_workers: Optional[int] = None,
        timeout: Optional[float] = None
    ):
        """
        Initialize chain orchestrator

        Args:
            model: Validated model configuration
            config: Sampler configuration shared by every chain (seed is the master seed)
            table: Enumeration table for oracle-table mode
            initial_graph: Starting graph when config.use_initial is set
            executor: Worker pool kind
            max_workers: Pool size (defaults to the number of chains)
            timeout: Per-chain timeout in seconds
        """
        self.model = model
        self.config = config
        self.table = table
        self.initial_graph = initial_graph
        self.executor = executor
        self.max_workers = max_workers
        self.timeout = timeout
        logger.info(f"ChainOrchestrator initialized ({executor} pool)")

    def _pool(self, chains: int) -> Executor:
        workers = self.max_workers or chains
        if self.executor == "thread":
            return ThreadPoolExecutor(max_workers=workers)
        return ProcessPoolExecutor(max_workers=workers)

    async def run_chains(self, chains: int) -> List[ChainResult]:
        """
        Run `chains` chains concurrently

        Returns:
            One ChainResult per chain, in chain order; failed chains carry the error message
        """
        master = self.config.seed if self.config.seed is not None else int(
            np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0]
        )
        seeds = derive_chain_seeds(master, chains)
        logger.info(f"Starting {chains} chain(s) from master seed {master}")

        loop = asyncio.get_running_loop()
        with self._pool(chains) as pool:
            tasks = [
                self._run_one(loop, pool, chain_id, seed)
                for chain_id, seed in enumerate(seeds)
            ]
            results = await asyncio.gather(*tasks, return_exceptions=True)

        chain_results: List[ChainResult] = []
        for chain_id, result in enumerate(results):
            if isinstance(result, Exception):
                logger.error(f"Chain {chain_id} failed: {result}")
                chain_results.append(ChainResult(
                    chain_id=chain_id, seed=seeds[chain_id], success=False, error_message=str(result)
                ))
            else:
                chain_results.append(result)
        return chain_results

    async def _run_one(
        self,
        loop: asyncio.AbstractEventLoop,
        pool: Executor,
        chain_id: int,
        seed: int
    ) -> ChainResult:
        """Run a single chain with timeout"""
        config = self.config.model_copy(update={"seed": seed})
        start = time.perf_counter()
        try:
            logger.info(f"Starting chain {chain_id} (seed={seed})")
            output = await asyncio.wait_for(
                loop.run_in_executor(pool, _run_chain, self.model, config, self.initial_graph, self.table),
                timeout=self.timeout
            )
            elapsed = time.perf_counter() - start
            logger.info(
                f"Chain {chain_id} completed in {elapsed:.2f}s, "
                f"acceptance rate {output.acceptance.acceptance_rate:.4f}"
            )
            return ChainResult(chain_id=chain_id, seed=seed, output=output, execution_time=elapsed)
        except asyncio.TimeoutError:
            logger.error(f"Chain {chain_id} timed out after {self.timeout}s")
            return ChainResult(
                chain_id=chain_id, seed=seed, success=False,
                error_message=f"timed out after {self.timeout}s",
                execution_time=time.perf_counter() - start
            )
        except Exception as e:
            logger.error(f"Chain {chain_id} failed: {e}", exc_info=True)
            return ChainResult(
                chain_id=chain_id, seed=seed, success=False, error_message=str(e),
                execution_time=time.perf_counter() - start
            )

    def run(self, chains: int) -> List[ChainResult]:
        """Blocking wrapper around run_chains"""
        return asyncio.run(self.run_chains(chains))
