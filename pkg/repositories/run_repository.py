"""
Run Repository for persisting sampler outputs, theoretical draws and plot data
"""
import hashlib
import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import pandas as pd

from models import EnsembleFormat, Graph, SampleOutput
from services.graph_codec import GraphCodec, GraphFormat

logger = logging.getLogger(__name__)

PACKAGE_VERSION = "0.1.0"


def config_hash(config: Dict[str, Any]) -> str:
    """SHA-256 of the canonical JSON form of a config"""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class RunRepository:
    """Repository for run artefacts under one output directory"""

    def __init__(self, directory: Union[str, Path]):
        """
        Initialize Run Repository

        Args:
            directory: Output directory (created on first write)
        """
        self.directory = Path(directory)
        self.codec = GraphCodec()
        logger.debug(f"RunRepository initialized at {self.directory}")

    def _path(self, name: str) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        return self.directory / name

    @staticmethod
    def suffixed(name: str, suffix: str) -> str:
        """'stats.csv' + '_chain1' -> 'stats_chain1.csv'"""
        if not suffix:
            return name
        p = Path(name)
        return f"{p.stem}{suffix}{p.suffix}"

    # ------------------------------------------------------------------
    # Tables
    # ------------------------------------------------------------------

    def save_table(self, frame: pd.DataFrame, name: str) -> Path:
        path = self._path(name)
        frame.to_csv(path, index=False)
        logger.info(f"Wrote {len(frame)} rows to {path}")
        return path

    @staticmethod
    def load_table(path: Union[str, Path]) -> pd.DataFrame:
        return pd.read_csv(path)

    def save_text(self, text: str, name: str) -> Path:
        path = self._path(name)
        path.write_text(text, encoding="utf-8")
        return path

    def save_json(self, data: Any, name: str) -> Path:
        path = self._path(name)
        path.write_text(json.dumps(data, indent=2, default=str) + "\n", encoding="utf-8")
        return path

    # ------------------------------------------------------------------
    # Graphs
    # ------------------------------------------------------------------

    def save_graph(self, g: Graph, name: str) -> Path:
        path = self._path(name)
        self.codec.write(g, path)
        return path

    def save_ensemble(self, graphs: Sequence[Graph], fmt: EnsembleFormat, stem: str = "ensemble") -> Path:
        """
        Write an ensemble as a directory of edge-list files or as JSON lines

        Returns:
            The directory or file written
        """
        if fmt == EnsembleFormat.EDGELIST_DIR:
            target = self._path(stem)
            target.mkdir(parents=True, exist_ok=True)
            width = max(len(str(len(graphs))), 4)
            for i, g in enumerate(graphs, start=1):
                (target / f"graph_{i:0{width}d}.txt").write_text(
                    self.codec.serialize(g, GraphFormat.EDGELIST), encoding="utf-8"
                )
        else:
            target = self._path(f"{stem}.jsonl")
            with target.open("w", encoding="utf-8") as fh:
                for g in graphs:
                    fh.write(self.codec.serialize(g, GraphFormat.JSON) + "\n")
        logger.info(f"Wrote ensemble of {len(graphs)} graphs to {target}")
        return target

    def load_ensemble(self, path: Union[str, Path]) -> List[Graph]:
        path = Path(path)
        if path.is_dir():
            return [self.codec.read(p, GraphFormat.EDGELIST) for p in sorted(path.glob("graph_*.txt"))]
        lines = path.read_text(encoding="utf-8").splitlines()
        return [self.codec.deserialize(line, GraphFormat.JSON) for line in lines if line.strip()]

    # ------------------------------------------------------------------
    # Sampler runs
    # ------------------------------------------------------------------

    def save_run(
        self,
        output: SampleOutput,
        config: Dict[str, Any],
        stats_file: str = "stats.csv",
        manifest_file: str = "manifest.json",
        ensemble_format: EnsembleFormat = EnsembleFormat.JSONL,
        write_final_state: bool = True,
        suffix: str = "",
        extra: Optional[Dict[str, Any]] = None
    ) -> Dict[str, str]:
        """
        Persist one sampler run: stats CSV, manifest and (if present) the ensemble

        Args:
            output: Sampler result
            config: Full run configuration as plain JSON data
            suffix: Appended to every file name (e.g. '_chain0')
            extra: Additional manifest fields

        Returns:
            Mapping of artefact kind to written path
        """
        written: Dict[str, str] = {}
        written["stats"] = str(self.save_table(output.stats, self.suffixed(stats_file, suffix)))
        if output.ensemble:
            written["ensemble"] = str(self.save_ensemble(output.ensemble, ensemble_format, f"ensemble{suffix}"))
        if write_final_state:
            written["final_state"] = str(self.save_graph(output.final_state, f"final_state{suffix}.txt"))

        manifest = {
            "version": PACKAGE_VERSION,
            "created": datetime.now(timezone.utc).isoformat(),
            "config": config,
            "config_sha256": config_hash(config),
            "seed": output.seed,
            "statistics": output.names,
            "acceptance": output.acceptance.model_dump(),
            "acceptance_rate": output.acceptance.acceptance_rate,
            "execution_time": output.execution_time,
            "files": dict(written),
        }
        if extra:
            manifest.update(extra)
        written["manifest"] = str(self.save_json(manifest, self.suffixed(manifest_file, suffix)))
        return written
