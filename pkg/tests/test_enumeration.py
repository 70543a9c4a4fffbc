"""
Tests for the exhaustive enumeration oracle and table persistence
"""
import math

import pytest

from models import PropertySpec
from repositories import TableFormatError, TableRepository
from services.cardinality import EnumerationRefused, enumerate_classes


EDGES = [PropertySpec(kind="edges")]


class TestEnumerate:
    def test_edges_n4_gives_binomials(self):
        table = enumerate_classes(4, EDGES)
        assert table.entries == {(k,): math.comb(6, k) for k in range(7)}
        assert table.outside == 0
        assert table.total == 64

    def test_edges_n3(self):
        table = enumerate_classes(3, EDGES)
        assert [table.size((k,)) for k in range(4)] == [1, 3, 3, 1]

    def test_triangles_partition_all_graphs(self):
        table = enumerate_classes(4, [PropertySpec(kind="edges"), PropertySpec(kind="triangles")])
        assert table.names == ("edges", "triangles")
        assert table.total == 64
        # the complete graph on 4 nodes holds 4 triangles
        assert table.size((6, 4)) == 1
        # every 3-edge graph is a triangle, a star or a path
        assert table.size((3, 1)) == 4
        assert table.size((3, 0)) == 16

    def test_degree_cap_counts_outside(self):
        table = enumerate_classes(4, [PropertySpec(kind="degreedist", max_degree=2)])
        assert table.outside > 0
        assert table.total == 64
        assert table.size((4, 0, 0)) == 1

    def test_mixing_matches_binomial_products(self):
        covariate = [0, 0, 1, 1]
        table = enumerate_classes(4, [PropertySpec(kind="mixing")], covariate)
        # blocks (0,0), (0,1), (1,1) hold 1, 4 and 1 dyads
        for (a, b, c), size in table.entries.items():
            assert size == math.comb(1, a) * math.comb(4, b) * math.comb(1, c)

    def test_refused_above_limit(self):
        with pytest.raises(EnumerationRefused):
            enumerate_classes(8, EDGES)

    def test_parallel_walk_matches_serial(self):
        specs = [PropertySpec(kind="edges"), PropertySpec(kind="triangles")]
        serial = enumerate_classes(6, specs)
        parallel = enumerate_classes(6, specs, workers=2)
        assert parallel.entries == serial.entries
        assert parallel.total == 2 ** 15


class TestCcmProbabilities:
    """Per-graph probabilities P(phi(g)) / |c(phi(g))| on n=4 with the edge count"""

    @pytest.fixture
    def table(self):
        return enumerate_classes(4, EDGES)

    def per_graph(self, table, class_probs):
        return [class_probs[k] / table.size((k,)) for k in range(7)]

    def test_uniform_ccm(self, table):
        probs = self.per_graph(table, [1 / 7] * 7)
        assert [round(p, 4) for p in probs[:4]] == [0.1429, 0.0238, 0.0095, 0.0071]

    def test_binomial_ccm_is_uniform_on_graphs(self, table):
        class_probs = [math.comb(6, k) / 64 for k in range(7)]
        for p in self.per_graph(table, class_probs):
            assert p == pytest.approx(1 / 64)

    def test_non_parametric_ccm(self, table):
        class_probs = [0.05, 0.2, 0.1, 0.35, 0.15, 0.1, 0.05]
        probs = self.per_graph(table, class_probs)
        assert [round(p, 4) for p in probs] == [0.05, 0.0333, 0.0067, 0.0175, 0.01, 0.0167, 0.05]
        # total mass over all 64 graphs
        assert sum(p * table.size((k,)) for k, p in enumerate(probs)) == pytest.approx(1.0)


class TestTableRepository:
    def test_round_trip(self, tmp_path):
        table = enumerate_classes(4, [PropertySpec(kind="density"), PropertySpec(kind="triangles")])
        repo = TableRepository()
        path = repo.save(table, tmp_path / "tables" / "t.json")
        loaded = repo.load(path)
        assert loaded.names == table.names
        assert loaded.entries == table.entries
        assert loaded.total == 64

    def test_sizes_stored_as_strings(self):
        text = TableRepository.to_json(enumerate_classes(3, EDGES))
        assert '"0": "1"' in text

    def test_wrong_total(self):
        text = '{"n": 3, "names": ["edges"], "classes": {"0": "1", "1": "3"}}'
        with pytest.raises(TableFormatError):
            TableRepository.from_json(text)

    def test_missing_classes(self):
        with pytest.raises(TableFormatError):
            TableRepository.from_json('{"n": 3, "names": ["edges"]}')

    def test_key_length_mismatch(self):
        text = '{"n": 2, "names": ["edges"], "classes": {"0,0": "1", "1,0": "1"}}'
        with pytest.raises(TableFormatError):
            TableRepository.from_json(text)

    def test_not_json(self):
        with pytest.raises(TableFormatError):
            TableRepository.from_json("n 3")
