"""
CCM Service - coordinates sampling, enumeration, diagnostics and posterior workflows
"""
import logging
import time
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from config import settings
from models import (
    ComparisonReport,
    DensityPosterior,
    EnumerationTable,
    EstimatorMode,
    Graph,
    ModelConfig,
    PlotKind,
    PosteriorRequest,
    PropertySpec,
    RunConfig,
    SampleOutput,
)
from repositories.run_repository import RunRepository
from repositories.table_repository import TableRepository
from services.cardinality import enumerate_classes
from services.chain_orchestrator import ChainOrchestrator, derive_chain_seeds
from services.diagnostics import (
    compare,
    emit_plot_data,
    format_comparison,
    format_summary,
    reference_overlays,
    summarize,
)
from services.distributions import ClassDistribution, DistributionFactory, sample_theoretical
from services.graph_codec import GraphCodec
from services.posterior import (
    PosteriorError,
    benchmark_bernoulli_edges,
    benchmark_gnm,
    beta_posterior,
    ensemble_recipe,
    normal_posterior,
    posterior_to_ccm,
)
from services.property_stats import PropertyStats
from services.sampler import CcmSampler, SamplerError

logger = logging.getLogger(__name__)


class CcmService:
    """Main service for running CCM workflows and writing their artefacts"""

    def __init__(
        self,
        output_dir: Optional[Union[str, Path]] = None,
        executor: Literal["process", "thread"] = "process"
    ):
        """
        Initialize CCM Service

        Args:
            output_dir: Output directory; falls back to the run config, then CCM_OUTPUT_DIR
            executor: Worker pool kind for multi-chain runs
        """
        self.output_dir = Path(output_dir) if output_dir is not None else None
        self.executor = executor
        self.codec = GraphCodec()
        self.tables = TableRepository()
        logger.info("CcmService initialized")

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def repository(self, config: Optional[RunConfig] = None) -> RunRepository:
        directory = self.output_dir
        if directory is None and config is not None:
            directory = config.outputs.directory
        return RunRepository(directory or settings.output_dir)

    @staticmethod
    def load_run_config(path: Union[str, Path]) -> RunConfig:
        """Parse and validate a run config file (raises pydantic ValidationError)"""
        return RunConfig.model_validate_json(Path(path).read_text(encoding="utf-8"))

    @staticmethod
    def load_posterior_request(path: Union[str, Path]) -> PosteriorRequest:
        return PosteriorRequest.model_validate_json(Path(path).read_text(encoding="utf-8"))

    def initial_graph(self, config: RunConfig) -> Optional[Graph]:
        """Starting graph from the sampler config (a Graph or a path to a graph file)"""
        source = config.sampler.initial_graph
        if source is None or isinstance(source, Graph):
            return source
        g = self.codec.read(source)
        if config.model.covariate is not None and g.covariate is None:
            g = Graph.from_edges(g.n, g.edges(), config.model.covariate)
        return g

    def load_table(self, model: ModelConfig) -> Optional[EnumerationTable]:
        """Enumeration table for oracle-table mode (read from table_path or enumerated now)"""
        if model.cardinality.mode != EstimatorMode.ORACLE_TABLE:
            return None
        if model.cardinality.table_path is not None:
            return self.tables.load(model.cardinality.table_path)
        logger.info("No enumeration table given; enumerating class sizes")
        return enumerate_classes(model.population, model.properties, model.covariate)

    @staticmethod
    def distributions(model: ModelConfig) -> Tuple[List[str], List[ClassDistribution]]:
        stats = PropertyStats(model.properties, model.population, model.covariate)
        dists = [DistributionFactory.create(spec, term) for spec, term in zip(model.distributions, stats.terms)]
        return stats.names, dists

    @staticmethod
    def manifest_config(config: RunConfig, seed: Optional[int] = None) -> Dict[str, Any]:
        """Run config as plain JSON data, with the effective seed filled in"""
        data = config.model_dump(mode="json", exclude={"sampler": {"initial_graph"}})
        data["sampler"] = config.sampler.manifest_dict()
        if seed is not None:
            data["sampler"]["seed"] = seed
        return data

    @staticmethod
    def _with_seed(config: RunConfig, seed: Optional[int]) -> RunConfig:
        if seed is None:
            return config
        return config.model_copy(update={"sampler": config.sampler.model_copy(update={"seed": seed})})

    # ------------------------------------------------------------------
    # Sampling
    # ------------------------------------------------------------------

    def sample(
        self,
        config: RunConfig,
        chains: int = 1,
        seed: Optional[int] = None,
        write: bool = True
    ) -> List[SampleOutput]:
        """
        Run one or more chains and write stats, manifests and ensembles

        Args:
            config: Validated run config
            chains: Number of independent chains (outputs suffixed _chain<i> when > 1)
            seed: Overrides config.sampler.seed

        Raises:
            SamplerError: If any chain fails
        """
        config = self._with_seed(config, seed)
        table = self.load_table(config.model)
        start_graph = self.initial_graph(config)
        logger.info(f"Sampling {chains} chain(s) for {[p.kind.value for p in config.model.properties]}")

        if chains == 1:
            outputs = [CcmSampler(config.model, table).run(config.sampler, start_graph)]
        else:
            orchestrator = ChainOrchestrator(
                config.model, config.sampler, table, start_graph, executor=self.executor
            )
            results = orchestrator.run(chains)
            failed = [r for r in results if not r.success]
            if failed:
                details = "; ".join(f"chain {r.chain_id}: {r.error_message}" for r in failed)
                raise SamplerError(f"{len(failed)} of {chains} chain(s) failed: {details}")
            outputs = [r.output for r in results]

        if write:
            repo = self.repository(config)
            for i, output in enumerate(outputs):
                suffix = f"_chain{i}" if chains > 1 else ""
                self._save_output(repo, config, output, suffix, {"chain": i} if chains > 1 else None)
        return outputs

    def _save_output(
        self,
        repo: RunRepository,
        config: RunConfig,
        output: SampleOutput,
        suffix: str,
        extra: Optional[Dict[str, Any]] = None
    ) -> Dict[str, str]:
        return repo.save_run(
            output,
            self.manifest_config(config, output.seed),
            stats_file=config.outputs.stats_file,
            manifest_file=config.outputs.manifest_file,
            ensemble_format=config.outputs.ensemble_format,
            write_final_state=config.outputs.write_final_state,
            suffix=suffix,
            extra=extra,
        )

    def run_two_stage(
        self,
        config: RunConfig,
        ensemble_size: int = 10,
        interval: Optional[int] = None,
        seed: Optional[int] = None,
        write: bool = True
    ) -> Tuple[SampleOutput, SampleOutput]:
        """
        Diagnostic run, then a short run from its final state that keeps every network

        Returns:
            (diagnostic output, ensemble output)
        """
        config = self._with_seed(config, seed)
        master = config.sampler.seed if config.sampler.seed is not None else int(
            np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0]
        )
        diag_seed, ens_seed = derive_chain_seeds(master, 2)
        diagnostic = config.sampler.model_copy(update={"seed": diag_seed})
        recipe = ensemble_recipe(diagnostic, ensemble_size, interval or config.sampler.interval)
        recipe.ensemble.seed = ens_seed

        table = self.load_table(config.model)
        sampler = CcmSampler(config.model, table)
        logger.info(f"Two-stage run: diagnostic chain, then an ensemble of {ensemble_size} networks")
        diag_output = sampler.run(recipe.diagnostic, self.initial_graph(config))
        ens_output = sampler.run(recipe.ensemble, diag_output.final_state)

        if write:
            repo = self.repository(config)
            diag_config = config.model_copy(update={"sampler": recipe.diagnostic})
            ens_config = config.model_copy(update={"sampler": recipe.ensemble})
            self._save_output(repo, diag_config, diag_output, "_diagnostic", {"stage": "diagnostic"})
            self._save_output(repo, ens_config, ens_output, "", {"stage": "ensemble", "master_seed": master})
        return diag_output, ens_output

    def describe_output(self, config: RunConfig, output: SampleOutput) -> str:
        """Short text description of a run"""
        model = config.model
        rows, cols = output.stats.shape
        lines = [
            "CCM sample",
            f"Network statistics: {', '.join(p.kind.value for p in model.properties)}",
            f"Probability distributions: {', '.join(d.kind for d in model.distributions)}",
            f"Population: {model.population}",
            f"MCMC samples: {rows} rows x {cols} cols",
            f"Acceptance rate: {output.acceptance.acceptance_rate:.4f} "
            f"({output.acceptance.auto_rejected} out-of-support proposals)",
        ]
        if output.ensemble:
            lines.append(f"Ensemble: {len(output.ensemble)} networks")
        return "\n".join(lines)

    # ------------------------------------------------------------------
    # Theoretical draws and enumeration
    # ------------------------------------------------------------------

    def theoretical(
        self,
        config: RunConfig,
        count: Optional[int] = None,
        seed: Optional[int] = None,
        write: bool = True
    ) -> pd.DataFrame:
        """Direct draws from each property's class distribution"""
        count = count or config.diagnostics.theoretical_draws
        seed = seed if seed is not None else config.sampler.seed
        names, dists = self.distributions(config.model)
        draws = sample_theoretical(dists, names, count, np.random.default_rng(seed))
        if write:
            self.repository(config).save_table(draws, "theoretical.csv")
        return draws

    def enumerate(
        self,
        n: int,
        specs: Sequence[PropertySpec],
        covariate: Optional[Sequence[int]] = None,
        workers: int = 1,
        path: Optional[Union[str, Path]] = None
    ) -> EnumerationTable:
        """Exact class sizes, written as a JSON table"""
        start = time.perf_counter()
        table = enumerate_classes(n, specs, covariate, workers)
        logger.info(f"Enumeration finished in {time.perf_counter() - start:.2f}s")
        if path is None:
            path = (self.output_dir or settings.output_dir) / f"table_n{n}.json"
        self.tables.save(table, path)
        return table

    # ------------------------------------------------------------------
    # Diagnostics
    # ------------------------------------------------------------------

    def diagnose(
        self,
        config: RunConfig,
        stats: Union[pd.DataFrame, str, Path],
        theoretical: Optional[Union[pd.DataFrame, str, Path]] = None,
        seed: Optional[int] = None,
        kinds: Optional[Sequence[PlotKind]] = None,
        write: bool = True
    ) -> Tuple[str, ComparisonReport]:
        """
        Summaries, MCMC-vs-theoretical comparison and plot data for a stats table

        Returns:
            (summary text, comparison report)
        """
        if not isinstance(stats, pd.DataFrame):
            stats = RunRepository.load_table(stats)
        if theoretical is None:
            theoretical = self.theoretical(config, seed=seed, write=False)
        elif not isinstance(theoretical, pd.DataFrame):
            theoretical = RunRepository.load_table(theoretical)

        names, dists = self.distributions(config.model)
        summary_text = format_summary(summarize(stats))
        report = compare(stats, theoretical, reference_overlays(dists, names))

        if write:
            repo = self.repository(config)
            repo.save_text(summary_text, "summary.txt")
            repo.save_text(format_comparison(report), "comparison.txt")
            repo.save_json(
                {
                    "metadata": report.metadata,
                    "comparisons": [c.model_dump() for c in report.comparisons],
                },
                "comparison.json",
            )
            for kind in kinds or config.diagnostics.plots:
                kind = PlotKind(kind)
                repo.save_table(emit_plot_data(report, kind), f"plot_{kind.value}.csv")
        return summary_text, report

    # ------------------------------------------------------------------
    # Posterior workflows
    # ------------------------------------------------------------------

    @staticmethod
    def fit_posterior(request: PosteriorRequest) -> DensityPosterior:
        if request.design == "whole-network":
            densities = [obs.density for obs in request.networks]
            return normal_posterior(densities, request.prior_mean, request.prior_var, request.sigma)
        return beta_posterior(
            request.observed_edges,
            request.observed_dyads,
            request.a0,
            request.b0,
            request.population_dyads,
        )

    def posterior(self, request: PosteriorRequest, write: bool = True) -> Tuple[DensityPosterior, RunConfig]:
        """Posterior over density and a ready-to-run density CCM config"""
        post = self.fit_posterior(request)
        run_config = posterior_to_ccm(post, request.population, request.sampler)
        if write:
            repo = self.repository(run_config)
            repo.save_json(post.model_dump(), "posterior.json")
            repo.save_json(self.manifest_config(run_config), "ccm_config.json")
        return post, run_config

    def compare(
        self,
        request: PosteriorRequest,
        seed: Optional[int] = None,
        write: bool = True
    ) -> pd.DataFrame:
        """
        Density samples from the posterior CCM and the two benchmark models

        The edges-only Bernoulli model uses p = posterior mean; G(n, m) uses
        m = round(posterior mean * C(n, 2)).

        Returns:
            DataFrame with columns ccm, bernoulli, gnm (one row per sample)
        """
        post, run_config = self.posterior(request, write=write)
        run_config = self._with_seed(run_config, seed)
        n = request.population
        M = n * (n - 1) // 2
        p = post.mean
        if not 0 < p < 1:
            raise PosteriorError(f"Posterior mean {p} is not a usable edge probability")

        output = self.sample(run_config, write=write)[0]
        count = output.sample_size
        rng = np.random.default_rng(derive_chain_seeds(output.seed, 2)[1])
        frame = pd.DataFrame({
            "ccm": output.stats["density"].to_numpy(dtype=float),
            "bernoulli": benchmark_bernoulli_edges(n, p, count, rng),
            "gnm": benchmark_gnm(n, int(round(p * M)), count),
        })
        sd = frame.std(ddof=1)
        logger.info(
            f"Density sd: ccm={sd['ccm']:.6g}, bernoulli={sd['bernoulli']:.6g}, gnm={sd['gnm']:.6g} "
            f"(posterior sd {post.sd:.6g})"
        )
        if write:
            repo = self.repository(run_config)
            repo.save_table(frame, "compare.csv")
            repo.save_text(format_summary(summarize(frame), digits=5), "compare_summary.txt")
        return frame


__all__ = ["CcmService"]
