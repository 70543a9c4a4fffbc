"""
Enumeration table persistence (JSON map of class key to decimal size string)
"""
import json
import logging
from pathlib import Path
from typing import Tuple, Union

from models import EnumerationTable

logger = logging.getLogger(__name__)


class TableFormatError(Exception):
    """Enumeration table file is malformed"""
    pass


def _key_to_text(key: Tuple) -> str:
    return ",".join(repr(x) if isinstance(x, float) else str(x) for x in key)


def _text_to_key(text: str) -> Tuple:
    parts = []
    for token in text.split(","):
        token = token.strip()
        if token.lstrip("-").isdigit():
            parts.append(int(token))
        else:
            parts.append(float(token))
    return tuple(parts)


class TableRepository:
    """Reads and writes enumeration tables"""

    @staticmethod
    def to_json(table: EnumerationTable) -> str:
        # sizes can exceed 2^53, so they are stored as decimal strings
        doc = {
            "n": table.n,
            "names": list(table.names),
            "outside": str(table.outside),
            "total": str(table.total),
            "classes": {_key_to_text(k): str(v) for k, v in sorted(table.entries.items())},
        }
        return json.dumps(doc, indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> EnumerationTable:
        try:
            doc = json.loads(text)
            entries = {_text_to_key(k): int(v) for k, v in doc["classes"].items()}
            table = EnumerationTable(
                n=int(doc["n"]),
                names=tuple(doc["names"]),
                entries=entries,
                outside=int(doc.get("outside", "0")),
            )
        except (KeyError, ValueError, TypeError, json.JSONDecodeError) as e:
            raise TableFormatError(f"Malformed enumeration table: {e}")
        expected = 2 ** (table.n * (table.n - 1) // 2)
        if table.total != expected:
            raise TableFormatError(f"Table sizes sum to {table.total}, expected 2^C(n,2) = {expected}")
        for key in entries:
            if len(key) != len(table.names):
                raise TableFormatError(f"Class key {key} does not match names {list(table.names)}")
        return table

    def save(self, table: EnumerationTable, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(table), encoding="utf-8")
        logger.info(f"Wrote enumeration table with {len(table.entries)} classes to {path}")
        return path

    def load(self, path: Union[str, Path]) -> EnumerationTable:
        path = Path(path)
        logger.debug(f"Loading enumeration table from {path}")
        return self.from_json(path.read_text(encoding="utf-8"))
