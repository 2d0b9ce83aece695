"""
Artifact storage for experiment runs.

Every artifact is written to a temporary file in the output directory and
moved into place with an atomic rename, so an interrupted run never leaves a
partial file behind. The store remembers the sha256 of each artifact and
writes them to manifest.json together with the config digest and the seed.
Nothing time-dependent is recorded, so identical runs give identical bytes.
"""

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from ..constants import MANIFEST_FILE
from ..core.codec import format_shortest

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and tuples into plain JSON types."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def dumps_json(data: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(to_jsonable(data), indent=2, sort_keys=True, allow_nan=False) + "\n"


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """
    Provenance of one experiment run.

    Attributes:
        config_digest: sha256 of the canonical experiment config
        seed: Base seed of the run
        tool_version: Package version that produced the artifacts
        artifacts: Name and sha256 of every artifact, sorted by name
    """
    config_digest: str
    seed: int
    tool_version: str
    artifacts: List[Dict[str, str]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config_digest": self.config_digest,
            "seed": self.seed,
            "tool_version": self.tool_version,
            "artifacts": sorted(self.artifacts, key=lambda a: a["name"]),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunManifest":
        return cls(data["config_digest"], data["seed"], data["tool_version"],
                   list(data.get("artifacts", [])))


class ArtifactStore:
    """
    Writes the artifacts of one run into an output directory.

    Provides atomic writes and hash bookkeeping for reproducible runs.
    """

    def __init__(self, output_dir: str):
        """
        Initialize the store.

        Args:
            output_dir: Directory for the run's artifacts (created if missing)
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.hashes: Dict[str, str] = {}

    def _write_atomic(self, name: str, payload: bytes) -> Path:
        target = self.output_dir / name
        fd, tmp_name = tempfile.mkstemp(dir=self.output_dir, prefix=f".{name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, 'wb') as f:
                f.write(payload)
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp_name, target)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
        self.hashes[name] = hashlib.sha256(payload).hexdigest()
        logger.debug(f"Wrote {target} ({len(payload)} bytes)")
        return target

    def write_text(self, name: str, text: str) -> Path:
        return self._write_atomic(name, text.encode('utf-8'))

    def write_json(self, name: str, data: Any) -> Path:
        return self.write_text(name, dumps_json(data))

    def write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        """CSV with shortest round-trip floats and '\\n' line endings."""
        text = frame.to_csv(index=False, float_format=format_shortest, lineterminator="\n")
        return self.write_text(name, text)

    def artifact_path(self, name: str) -> Path:
        return self.output_dir / name

    def write_manifest(self, config_digest: str, seed: int, tool_version: str) -> RunManifest:
        """Write manifest.json listing every artifact written so far."""
        manifest = RunManifest(
            config_digest=config_digest,
            seed=seed,
            tool_version=tool_version,
            artifacts=[{"name": n, "sha256": h} for n, h in self.hashes.items()],
        )
        self.write_json(MANIFEST_FILE, manifest.to_dict())
        # the manifest does not list itself
        self.hashes.pop(MANIFEST_FILE, None)
        return manifest


def load_manifest(output_dir: str) -> Optional[RunManifest]:
    """Load manifest.json from a run directory, or None if there is none."""
    path = Path(output_dir) / MANIFEST_FILE
    if not path.exists():
        return None
    with open(path, 'r') as f:
        return RunManifest.from_dict(json.load(f))


def verify_manifest(output_dir: str) -> List[str]:
    """Names of artifacts whose on-disk hash differs from the manifest (or that are missing)."""
    manifest = load_manifest(output_dir)
    if manifest is None:
        return [MANIFEST_FILE]
    bad = []
    for entry in manifest.artifacts:
        path = Path(output_dir) / entry["name"]
        if not path.exists() or sha256_file(path) != entry["sha256"]:
            bad.append(entry["name"])
    return bad
