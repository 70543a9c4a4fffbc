"""
Tests for edge-list and JSON graph serialization
"""
import json

import pytest

from models import Graph
from services.graph_codec import GraphCodec, GraphFormat, GraphParseError


@pytest.fixture
def codec() -> GraphCodec:
    return GraphCodec()


class TestEdgeList:
    def test_serialize_layout(self, codec, path_graph):
        assert codec.serialize(path_graph) == "n 4\n0 1\n1 2\n2 3\n"

    def test_serialize_with_covariate(self, codec):
        g = Graph.from_edges(3, [(2, 0)], covariate=[0, 1, 1])
        assert codec.serialize(g) == "n 3\ncovariate 0 1 1\n0 2\n"

    def test_parse_ignores_comments_and_blanks(self, codec):
        text = "# generated\nn 4\n\n1 0\n# tail\n3 2\n"
        g = codec.deserialize(text)
        assert g.edges() == [(0, 1), (2, 3)]

    def test_parse_covariate(self, codec):
        g = codec.deserialize("n 3\ncovariate 0 0 1\n0 1\n")
        assert g.covariate == (0, 0, 1)
        assert g.has_edge(0, 1)

    def test_empty_graph(self, codec):
        g = codec.deserialize("n 5\n")
        assert g.n == 5 and g.m == 0

    def test_missing_header(self, codec):
        with pytest.raises(GraphParseError) as exc:
            codec.deserialize("0 1\n")
        assert exc.value.line == 1

    def test_duplicate_edge_reports_line(self, codec):
        with pytest.raises(GraphParseError) as exc:
            codec.deserialize("n 3\n0 1\n1 0\n")
        assert exc.value.line == 3
        assert exc.value.offset == len("n 3\n0 1\n")

    def test_self_loop(self, codec):
        with pytest.raises(GraphParseError) as exc:
            codec.deserialize("n 3\n1 1\n")
        assert exc.value.line == 2

    def test_out_of_range(self, codec):
        with pytest.raises(GraphParseError):
            codec.deserialize("n 3\n0 3\n")

    def test_garbage_line(self, codec):
        with pytest.raises(GraphParseError) as exc:
            codec.deserialize("n 3\n0 x\n")
        assert "Expected 'u v'" in exc.value.message

    def test_empty_input(self, codec):
        with pytest.raises(GraphParseError):
            codec.deserialize("")

    def test_invalid_utf8_reports_line(self, codec):
        with pytest.raises(GraphParseError) as exc:
            codec.deserialize(b"n 3\n0 1\xff\n")
        assert exc.value.line == 2
        assert exc.value.offset == len(b"n 3\n")

    def test_invalid_utf8_header(self, codec):
        with pytest.raises(GraphParseError) as exc:
            codec.deserialize(b"\xff")
        assert exc.value.line == 1

    @pytest.mark.parametrize("token", ["²", "٣", "+1", "1.0", "--1"])
    def test_non_ascii_digit_tokens(self, codec, token):
        with pytest.raises(GraphParseError) as exc:
            codec.deserialize(f"n 3\n0 {token}\n")
        assert exc.value.line == 2

    def test_non_ascii_digit_header(self, codec):
        with pytest.raises(GraphParseError) as exc:
            codec.deserialize("n ³\n")
        assert exc.value.line == 1


class TestJson:
    def test_round_trip(self, codec, triangle_plus_tail):
        text = codec.serialize(triangle_plus_tail, GraphFormat.JSON)
        assert json.loads(text)["n"] == 5
        assert codec.deserialize(text, GraphFormat.JSON) == triangle_plus_tail

    def test_invalid_json(self, codec):
        with pytest.raises(GraphParseError) as exc:
            codec.deserialize('{"n": 3,', GraphFormat.JSON)
        assert exc.value.line == 1

    def test_unknown_key(self, codec):
        with pytest.raises(GraphParseError):
            codec.deserialize('{"n": 3, "edges": [], "weights": []}', GraphFormat.JSON)

    def test_self_loop(self, codec):
        with pytest.raises(GraphParseError):
            codec.deserialize('{"n": 3, "edges": [[1, 1]]}', GraphFormat.JSON)


class TestFiles:
    def test_format_from_extension(self, codec, tmp_path, path_graph):
        codec.write(path_graph, tmp_path / "g.json")
        codec.write(path_graph, tmp_path / "g.txt")
        assert (tmp_path / "g.json").read_text().startswith("{")
        assert (tmp_path / "g.txt").read_text().startswith("n 4")
        assert codec.read(tmp_path / "g.json") == codec.read(tmp_path / "g.txt") == path_graph

    def test_read_invalid_utf8_file(self, codec, tmp_path):
        path = tmp_path / "g.txt"
        path.write_bytes(b"n 2\n\xfe 1\n")
        with pytest.raises(GraphParseError) as exc:
            codec.read(path)
        assert exc.value.line == 2
