"""
Tests for the command-line entry point
"""
import json

import pytest

from cli import build_parser, format_location, main


def write_config(path, model, **sections):
    path.write_text(json.dumps({"model": model, **sections}), encoding="utf-8")
    return path


SMALL_SAMPLER = {"burnin": 200, "interval": 5, "sample_size": 30}
POISSON_MODEL = {"population": 12, "properties": ["edges"], "distributions": [{"kind": "poisson", "lambda": 15}]}


class TestParser:
    def test_requires_subcommand(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    @pytest.mark.parametrize("argv", [[], ["--bogus"], ["enumerate", "--n", "x", "--property", "edges"],
                                      ["enumerate", "--n", "4", "--property", "cliques"]])
    def test_usage_errors_are_invalid_input(self, argv, capsys):
        assert main(argv) == 1
        assert "usage:" in capsys.readouterr().err

    def test_help_exits_cleanly(self, capsys):
        assert main(["--help"]) == 0
        assert "usage:" in capsys.readouterr().out

    def test_enumerate_accepts_repeated_properties(self):
        args = build_parser().parse_args(["enumerate", "--n", "4", "--property", "edges", "--property", "triangles"])
        assert args.property == ["edges", "triangles"]

    @pytest.mark.parametrize("loc,expected", [
        (("model", "distributions", 0, "poisson", "lambda"), "model.distributions[0].lambda"),
        (("model", "properties", 1, "max_degree"), "model.properties[1].max_degree"),
        (("sampler", "interval"), "sampler.interval"),
    ])
    def test_format_location(self, loc, expected):
        assert format_location(loc) == expected


class TestEnumerate:
    def test_edges_table(self, tmp_path, capsys):
        code = main(["--out", str(tmp_path), "enumerate", "--n", "4", "--property", "edges"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "Classes for n=4: edges"
        assert lines[1:8] == ["0\t1", "1\t6", "2\t15", "3\t20", "4\t15", "5\t6", "6\t1"]
        assert lines[-1] == "total\t64"
        assert (tmp_path / "table_n4.json").exists()

    def test_degree_cap_reports_outside(self, tmp_path, capsys):
        code = main(["--out", str(tmp_path), "enumerate", "--n", "4", "--property", "degreedist", "--max-degree", "2"])
        assert code == 0
        out = capsys.readouterr().out
        assert "outside support\t" in out

    def test_refused_for_large_n(self, tmp_path, capsys):
        code = main(["--out", str(tmp_path), "enumerate", "--n", "8", "--property", "edges"])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_mixing_needs_covariate(self, tmp_path, capsys):
        code = main(["--out", str(tmp_path), "enumerate", "--n", "4", "--property", "mixing"])
        assert code == 1
        assert "covariate" in capsys.readouterr().err

    def test_labels_beyond_groups(self, tmp_path, capsys):
        code = main(["--out", str(tmp_path), "enumerate", "--n", "4", "--property", "mixing",
                     "--covariate", "0,1,2,2", "--groups", "2"])
        assert code == 1
        assert "labels [2] outside 0..1" in capsys.readouterr().err


class TestSample:
    def test_same_seed_same_stats(self, tmp_path, capsys):
        config = write_config(tmp_path / "run.json", POISSON_MODEL, sampler=SMALL_SAMPLER)
        for out in ("a", "b"):
            assert main(["--out", str(tmp_path / out), "sample", "--config", str(config), "--seed", "5"]) == 0
        first = (tmp_path / "a" / "stats.csv").read_bytes()
        assert first == (tmp_path / "b" / "stats.csv").read_bytes()
        assert first.startswith(b"edges\n")
        assert "MCMC samples: 30 rows x 1 cols" in capsys.readouterr().out

    def test_two_stage(self, tmp_path, capsys):
        config = write_config(tmp_path / "run.json", POISSON_MODEL, sampler={**SMALL_SAMPLER, "seed": 2})
        code = main(["--out", str(tmp_path / "out"), "sample", "--config", str(config),
                     "--two-stage", "--ensemble-size", "4"])
        assert code == 0
        assert "Ensemble: 4 networks" in capsys.readouterr().out
        assert len((tmp_path / "out" / "ensemble.jsonl").read_text().splitlines()) == 4

    def test_oracle_table_override(self, tmp_path):
        assert main(["--out", str(tmp_path), "enumerate", "--n", "4", "--property", "edges"]) == 0
        model = {"population": 4, "properties": ["edges"], "distributions": [{"kind": "uniform"}]}
        config = write_config(tmp_path / "run.json", model, sampler={**SMALL_SAMPLER, "seed": 3})
        code = main(["--out", str(tmp_path), "sample", "--config", str(config),
                     "--table", str(tmp_path / "table_n4.json")])
        assert code == 0
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["config"]["model"]["cardinality"]["mode"] == "oracle-table"

    def test_invalid_parameter_exit_code(self, tmp_path, capsys):
        model = {**POISSON_MODEL, "distributions": [{"kind": "poisson", "lambda": -1}]}
        config = write_config(tmp_path / "run.json", model)
        code = main(["--out", str(tmp_path), "sample", "--config", str(config)])
        assert code == 1
        assert "error: model.distributions[0].lambda" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path):
        assert main(["--out", str(tmp_path), "sample", "--config", str(tmp_path / "none.json")]) == 1

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{not json", encoding="utf-8")
        assert main(["--out", str(tmp_path), "sample", "--config", str(path)]) == 1

    def test_undecodable_initial_graph(self, tmp_path, capsys):
        graph = tmp_path / "start.txt"
        graph.write_bytes(b"n 12\n0 1\xff\n")
        sampler = {**SMALL_SAMPLER, "initial_graph": str(graph), "use_initial": True}
        config = write_config(tmp_path / "run.json", POISSON_MODEL, sampler=sampler)
        code = main(["--out", str(tmp_path), "sample", "--config", str(config)])
        assert code == 1
        assert "line 2" in capsys.readouterr().err

    def test_runtime_failure_exit_code(self, tmp_path, capsys):
        config = write_config(tmp_path / "run.json", POISSON_MODEL, sampler={**SMALL_SAMPLER, "use_initial": True})
        code = main(["--out", str(tmp_path), "sample", "--config", str(config)])
        assert code == 2
        assert "SamplerError" in capsys.readouterr().err


class TestDiagnoseAndPosterior:
    def test_theoretical_then_diagnose(self, tmp_path, capsys):
        config = write_config(tmp_path / "run.json", POISSON_MODEL, sampler={**SMALL_SAMPLER, "seed": 9})
        out = str(tmp_path / "out")
        assert main(["--out", out, "sample", "--config", str(config)]) == 0
        assert main(["--out", out, "theoretical", "--config", str(config), "--count", "200"]) == 0
        code = main(["--out", out, "diagnose", "--config", str(config),
                     "--stats", f"{out}/stats.csv", "--theoretical", f"{out}/theoretical.csv", "--kind", "trace"])
        assert code == 0
        text = capsys.readouterr().out
        assert "Statistic: edges" in text
        assert "edges: KS=" in text
        assert (tmp_path / "out" / "plot_trace.csv").exists()

    def test_posterior_prints_json(self, tmp_path, capsys, config_dir):
        code = main(["--out", str(tmp_path), "posterior", "--input", str(config_dir / "school_summary.json")])
        assert code == 0
        result = json.loads(capsys.readouterr().out)
        assert result["family"] == "normal"
        assert result["mean"] == pytest.approx(0.03192, abs=1e-4)
        assert (tmp_path / "ccm_config.json").exists()
