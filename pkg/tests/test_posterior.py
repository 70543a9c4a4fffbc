"""
Tests for density posteriors, benchmark models and posterior predictive CCMs
"""
import logging
import math

import numpy as np
import pytest

from config import engine_defaults
from models import DensityPosterior, Graph, PosteriorRequest, SamplerConfig
from services.ccm_service import CcmService
from services.posterior import (
    PosteriorError,
    benchmark_bernoulli_edges,
    benchmark_gnm,
    beta_posterior,
    ensemble_recipe,
    induced_sample_counts,
    normal_posterior,
    posterior_to_ccm,
    synthetic_graph,
)
from services.sampler import sample


class TestNormalPosterior:
    def test_single_observation(self):
        post = normal_posterior([1.0], prior_mean=0.0, prior_var=1.0, sigma=1.0)
        assert post.mean == pytest.approx(0.5)
        assert post.variance == pytest.approx(0.5)

    def test_school_networks(self, config_dir):
        request = PosteriorRequest.model_validate_json((config_dir / "school_summary.json").read_text())
        post = CcmService.fit_posterior(request)
        assert post.family == "normal"
        assert post.mean == pytest.approx(0.03192, abs=1e-4)
        assert post.sd == pytest.approx(0.01726, abs=1e-4)
        assert post.provenance["sigma"] == pytest.approx(0.03452, abs=1e-4)

    def test_sigma_needed_for_one_network(self):
        with pytest.raises(PosteriorError):
            normal_posterior([0.1])

    def test_no_data(self):
        with pytest.raises(PosteriorError):
            normal_posterior([], sigma=1.0)


class TestBetaPosterior:
    def test_conjugate_update(self):
        post = beta_posterior(5, 10)
        assert (post.a, post.b) == (6, 6)
        assert post.mean == 0.5
        assert post.variance == pytest.approx(36 / (144 * 13))

    def test_finite_population_correction(self, config_dir):
        request = PosteriorRequest.model_validate_json((config_dir / "dixon_within.json").read_text())
        post = CcmService.fit_posterior(request)
        plain = beta_posterior(12, 300)
        factor = 1 - 300 / 30628
        assert post.provenance["fpc_factor"] == pytest.approx(0.9902, abs=1e-4)
        assert post.mean == pytest.approx(13 / 302)
        assert post.variance == pytest.approx(plain.variance * factor)
        # moment-matched shapes reproduce the corrected mean and variance
        a, b = post.a, post.b
        assert a / (a + b) == pytest.approx(post.mean)
        assert a * b / ((a + b) ** 2 * (a + b + 1)) == pytest.approx(post.variance)

    def test_full_coverage_is_clamped(self, caplog):
        with caplog.at_level(logging.WARNING):
            post = beta_posterior(10, 45, population_dyads=45)
        assert post.provenance["fpc_factor"] == 1e-6
        assert "clamped" in caplog.text

    @pytest.mark.parametrize("edges,dyads", [(-1, 10), (11, 10)])
    def test_invalid_counts(self, edges, dyads):
        with pytest.raises(PosteriorError):
            beta_posterior(edges, dyads)


class TestBenchmarks:
    def test_gnm_is_constant(self):
        values = benchmark_gnm(100, 158, 20)
        assert np.all(values == 158 / 4950)

    @pytest.mark.parametrize("m", [-1, 4951])
    def test_gnm_rejects_impossible_edge_count(self, m):
        with pytest.raises(PosteriorError):
            benchmark_gnm(100, m, 5)

    def test_bernoulli_spread(self, rng):
        values = benchmark_bernoulli_edges(100, 0.0319, 4000, rng)
        assert values.mean() == pytest.approx(0.0319, abs=5e-4)
        assert values.std() == pytest.approx(math.sqrt(0.0319 * 0.9681 / 4950), rel=0.1)

    def test_bernoulli_rejects_degenerate_p(self, rng):
        with pytest.raises(PosteriorError):
            benchmark_bernoulli_edges(10, 0.0, 5, rng)


class TestPosteriorToCcm:
    def test_normal_family(self):
        post = DensityPosterior(family="normal", mean=0.03, variance=0.0003)
        run = posterior_to_ccm(post, 100)
        assert run.model.population == 100
        assert run.model.properties[0].kind.value == "density"
        assert run.model.distributions[0].kind == "normal"
        assert run.model.distributions[0].var == 0.0003

    def test_beta_family(self):
        post = beta_posterior(5, 10)
        run = posterior_to_ccm(post, 20, SamplerConfig(seed=4))
        assert run.model.distributions[0].kind == "beta"
        assert run.sampler.seed == 4

    def test_ensemble_recipe(self):
        recipe = ensemble_recipe(SamplerConfig(seed=3), ensemble_size=10, interval=500)
        assert recipe.ensemble.burnin == engine_defaults.ensemble_burnin == 1
        assert recipe.ensemble.seed == 3
        assert recipe.ensemble.use_initial
        assert not recipe.ensemble.stats_only
        assert recipe.ensemble.sample_size == 10


class TestSubsampling:
    def test_all_nodes_observe_every_edge(self, rng):
        g = synthetic_graph(30, 40, rng)
        assert g.m == 40
        assert induced_sample_counts(g, 30, rng) == (40, 435)

    def test_subsample_bounds(self, rng):
        with pytest.raises(PosteriorError):
            induced_sample_counts(Graph(5), 1, rng)


@pytest.mark.slow
class TestPosteriorPredictive:
    def test_normal_density_ccm(self):
        post = DensityPosterior(family="normal", mean=0.1, variance=0.02 ** 2)
        run = posterior_to_ccm(post, 30, SamplerConfig(burnin=5000, interval=100, sample_size=600, seed=12))
        density = sample(run.model, run.sampler).stats["density"]
        assert density.mean() == pytest.approx(0.1, abs=0.01)
        assert density.std() == pytest.approx(0.02, rel=0.3)

    def test_beta_density_ccm(self):
        post = beta_posterior(12, 300)
        run = posterior_to_ccm(post, 30, SamplerConfig(burnin=5000, interval=100, sample_size=600, seed=13))
        density = sample(run.model, run.sampler).stats["density"]
        assert density.mean() == pytest.approx(post.mean, abs=0.01)

    def test_subsample_recovers_density(self):
        # a 248-node network at the Dixon density, observed through 25 random nodes
        rng = np.random.default_rng(6)
        g = synthetic_graph(248, 1197, rng)
        means = []
        for _ in range(200):
            edges, dyads = induced_sample_counts(g, 25, rng)
            means.append(beta_posterior(edges, dyads, population_dyads=g.max_edges).mean)
        assert np.mean(means) == pytest.approx(1197 / 30628, abs=0.008)

    def test_school_spread_ordering(self, config_dir):
        request = PosteriorRequest.model_validate_json((config_dir / "school_summary.json").read_text())
        post = CcmService.fit_posterior(request)
        n = 40
        M = n * (n - 1) // 2
        run = posterior_to_ccm(post, n, SamplerConfig(burnin=5000, interval=50, sample_size=16000, seed=19))
        ccm = sample(run.model, run.sampler).stats["density"]

        # the CCM target is the posterior normal on the grid k / M, cut off at density 0
        grid = np.arange(M + 1) / M
        weights = np.exp(-0.5 * (grid - post.mean) ** 2 / post.variance)
        weights /= weights.sum()
        target_mean = float((weights * grid).sum())
        target_sd = math.sqrt(float((weights * (grid - target_mean) ** 2).sum()))
        assert target_sd == pytest.approx(post.sd, rel=0.1)
        assert ccm.std() == pytest.approx(target_sd, rel=0.1)

        rng = np.random.default_rng(20)
        bernoulli = benchmark_bernoulli_edges(n, post.mean, 16000, rng)
        assert bernoulli.std(ddof=1) == pytest.approx(math.sqrt(post.mean * (1 - post.mean) / M), rel=0.1)
        gnm = benchmark_gnm(n, int(round(post.mean * M)), 16000)
        assert gnm.std() == 0.0
        assert ccm.std() > bernoulli.std(ddof=1) > gnm.std()

    def test_larger_samples_narrow_the_posterior(self):
        rng = np.random.default_rng(7)
        g = synthetic_graph(248, 1197, rng)
        # toggles per sample size, longer where the posterior is wider
        budgets = {25: 10000, 75: 10000, 125: 4000, 175: 2000, 225: 2000}
        posterior_sd = []
        ensemble_sd = []
        for k, size in budgets.items():
            edges, dyads = induced_sample_counts(g, k, rng)
            post = beta_posterior(edges, dyads, population_dyads=g.max_edges)
            run = posterior_to_ccm(post, 248, SamplerConfig(burnin=2000, interval=100, sample_size=size, seed=k))
            posterior_sd.append(post.sd)
            ensemble_sd.append(sample(run.model, run.sampler).stats["density"].std())
        assert all(a > b for a, b in zip(posterior_sd, posterior_sd[1:]))
        assert all(a > b for a, b in zip(ensemble_sd, ensemble_sd[1:]))
