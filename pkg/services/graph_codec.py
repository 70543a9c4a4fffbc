"""
Graph codec for edge-list text and JSON graph documents
"""
import json
import logging
import re
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from models import Graph, GraphUsageError

logger = logging.getLogger(__name__)


class GraphParseError(Exception):
    """Malformed graph input; carries the line (1-based) and character offset when known"""

    def __init__(self, message: str, line: Optional[int] = None, offset: Optional[int] = None):
        self.message = message
        self.line = line
        self.offset = offset
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", offset {offset}" if offset is not None else "") + ")"
        super().__init__(message + where)


class GraphFormat(str, Enum):
    EDGELIST = "edgelist"
    JSON = "json"


class GraphDocument(BaseModel):
    """JSON form: {"n": ..., "edges": [[u, v], ...], "covariate": [...] | null}"""

    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=1)
    edges: List[Tuple[int, int]] = Field(default_factory=list)
    covariate: Optional[List[int]] = None


class GraphCodec:
    """Serialize and parse graphs"""

    @staticmethod
    def format_for(path: Union[str, Path]) -> GraphFormat:
        """Pick the format from a file extension (.json or anything else)"""
        return GraphFormat.JSON if str(path).lower().endswith(".json") else GraphFormat.EDGELIST

    def serialize(self, g: Graph, fmt: GraphFormat = GraphFormat.EDGELIST) -> str:
        """
        Serialize a graph

        Edge-list text is a header line "n <count>", an optional
        "covariate <labels...>" line, then one "u v" pair per edge, sorted.
        """
        if fmt == GraphFormat.JSON:
            doc = GraphDocument(
                n=g.n,
                edges=[(d.u, d.v) for d in g.edges()],
                covariate=list(g.covariate) if g.covariate is not None else None,
            )
            return doc.model_dump_json()

        lines = [f"n {g.n}"]
        if g.covariate is not None:
            lines.append("covariate " + " ".join(str(c) for c in g.covariate))
        lines.extend(f"{d.u} {d.v}" for d in g.edges())
        return "\n".join(lines) + "\n"

    def deserialize(self, data: Union[str, bytes], fmt: GraphFormat = GraphFormat.EDGELIST) -> Graph:
        """
        Parse a graph

        Raises:
            GraphParseError: On malformed input, out-of-range nodes, self-loops or duplicates
        """
        text = _decode(data) if isinstance(data, bytes) else data
        if fmt == GraphFormat.JSON:
            return self._parse_json(text)
        return self._parse_edgelist(text)

    def _parse_json(self, text: str) -> Graph:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise GraphParseError(f"Invalid JSON: {e.msg}", line=e.lineno, offset=e.colno)
        try:
            doc = GraphDocument.model_validate(raw)
        except ValidationError as e:
            first = e.errors()[0]
            path = ".".join(str(p) for p in first["loc"])
            raise GraphParseError(f"Invalid graph document at '{path}': {first['msg']}")
        try:
            return Graph.from_edges(doc.n, doc.edges, doc.covariate)
        except GraphUsageError as e:
            raise GraphParseError(str(e))

    def _parse_edgelist(self, text: str) -> Graph:
        lines = text.splitlines()
        header_line = None
        g: Optional[Graph] = None
        offset = 0
        for lineno, line in enumerate(lines, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                offset += len(line) + 1
                continue
            tokens = stripped.split()
            if g is None:
                if tokens[0] != "n" or len(tokens) != 2 or not _is_int(tokens[1]):
                    raise GraphParseError("Expected header 'n <count>'", line=lineno, offset=offset)
                n = int(tokens[1])
                if n < 1:
                    raise GraphParseError(f"Node count must be >= 1, got {n}", line=lineno, offset=offset)
                g = Graph(n)
                header_line = lineno
            elif tokens[0] == "covariate" and lineno == _next_content_line(lines, header_line):
                if not all(_is_int(t) for t in tokens[1:]):
                    raise GraphParseError("Covariate labels must be integers", line=lineno, offset=offset)
                try:
                    g = Graph(g.n, [int(t) for t in tokens[1:]])
                except GraphUsageError as e:
                    raise GraphParseError(str(e), line=lineno, offset=offset)
            else:
                if len(tokens) != 2 or not all(_is_int(t) for t in tokens):
                    raise GraphParseError(f"Expected 'u v', got '{stripped}'", line=lineno, offset=offset)
                a, b = int(tokens[0]), int(tokens[1])
                try:
                    d = g.dyad(a, b)
                except GraphUsageError as e:
                    raise GraphParseError(str(e), line=lineno, offset=offset)
                if g.has_edge(d.u, d.v):
                    raise GraphParseError(f"Duplicate edge ({d.u}, {d.v})", line=lineno, offset=offset)
                g.toggle(d.u, d.v)
            offset += len(line) + 1
        if g is None:
            raise GraphParseError("Empty graph input: missing 'n <count>' header", line=1, offset=0)
        return g

    def read(self, path: Union[str, Path], fmt: Optional[GraphFormat] = None) -> Graph:
        path = Path(path)
        logger.debug(f"Reading graph from {path}")
        return self.deserialize(path.read_bytes(), fmt or self.format_for(path))

    def write(self, g: Graph, path: Union[str, Path], fmt: Optional[GraphFormat] = None) -> None:
        path = Path(path)
        path.write_text(self.serialize(g, fmt or self.format_for(path)), encoding="utf-8")


_INT_TOKEN = re.compile(r"-?[0-9]+")


def _is_int(token: str) -> bool:
    return _INT_TOKEN.fullmatch(token) is not None


def _decode(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        line_start = data.rfind(b"\n", 0, e.start) + 1
        raise GraphParseError(
            f"Input is not valid UTF-8: {e.reason}",
            line=data.count(b"\n", 0, e.start) + 1,
            offset=line_start,
        )


def _next_content_line(lines: List[str], after: Optional[int]) -> Optional[int]:
    """1-based number of the first non-blank, non-comment line after line `after`"""
    if after is None:
        return None
    for lineno in range(after + 1, len(lines) + 1):
        stripped = lines[lineno - 1].strip()
        if stripped and not stripped.startswith("#"):
            return lineno
    return None
