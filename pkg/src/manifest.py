"""
manifest.py - Run Metadata Sidecars

Every data file written by the command line gets a ``<file>.meta.json``
sidecar recording the run id, package version, wall-clock timestamp,
arguments and summary numbers (normalization, error maxima). Data files
themselves never carry timestamps, so identical arguments produce
byte-identical data files.
"""

from __future__ import annotations

import json
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from .__version__ import __version__
from .logger import current_run_id

SIDECAR_SUFFIX = ".meta.json"


class RunManifest:
    """
    Collects metadata for one command run and writes it next to the outputs.

    Usage:
        manifest = RunManifest("spectrum", vars(args))
        manifest.record("rows", 4)
        manifest.save("spectrum.csv")
    """

    def __init__(self, command: str, arguments: dict[str, Any]) -> None:
        self._start_time = time.time()
        self._command = command
        self._arguments = {k: _jsonable(v) for k, v in arguments.items() if not callable(v)}
        self._summary: dict[str, Any] = {}

    def record(self, key: str, value: Any) -> None:
        """Attach a summary number (or any JSON-serializable value)."""
        self._summary[key] = _jsonable(value)

    def as_dict(self) -> dict[str, Any]:
        return {
            "command": self._command,
            "run_id": current_run_id(),
            "version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "duration_seconds": round(time.time() - self._start_time, 3),
            "arguments": self._arguments,
            "summary": self._summary,
        }

    def save(self, data_path: Path | str) -> Path:
        """
        Write ``<data_path>.meta.json``.

        Returns:
        - Path: Path to the written sidecar.
        """
        sidecar = sidecar_path(data_path)
        sidecar.parent.mkdir(parents=True, exist_ok=True)
        with open(sidecar, "w", encoding="utf-8") as f:
            json.dump(self.as_dict(), f, indent=2, sort_keys=True)
        return sidecar


def sidecar_path(data_path: Path | str) -> Path:
    data_path = Path(data_path)
    return data_path.with_name(data_path.name + SIDECAR_SUFFIX)


def load_manifest(data_path: Path | str) -> dict[str, Any] | None:
    """Sidecar contents for ``data_path``, or None when there is none."""
    sidecar = sidecar_path(data_path)
    if not sidecar.exists():
        return None
    with open(sidecar, encoding="utf-8") as f:
        return json.load(f)


def _jsonable(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, range)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):
        return value.item()
    return str(value)
