"""On-disk cache of walk and polygon counts, one JSON record per key."""
from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

from . import __version__

ENV_VAR = "LOOPON_CACHE"
DEFAULT_DIR = ".loopon-cache"


class CountCache:
    """Content-addressed count store keyed by (lattice, d, kind, N, w, pattern_id, tool_version)."""

    def __init__(self, directory: str | os.PathLike | None = None, enabled: bool = True):
        self.directory = Path(directory or os.environ.get(ENV_VAR) or DEFAULT_DIR)
        self.enabled = enabled
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(lattice, kind: str, N: int, w, pattern_id) -> dict:
        return {
            "lattice": lattice.kind,
            "d": lattice.d,
            "kind": kind,
            "N": int(N),
            "w": w,
            "pattern_id": pattern_id,
            "tool_version": __version__,
        }

    def _path(self, key: dict) -> Path:
        digest = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()
        return self.directory / f"{digest}.json"

    def get(self, lattice, kind: str, N: int, w=None, pattern_id=None) -> int | None:
        if not self.enabled:
            return None
        key = self.key(lattice, kind, N, w, pattern_id)
        path = self._path(key)
        if not path.exists():
            self.misses += 1
            return None
        record = json.loads(path.read_text(encoding="utf-8"))
        if any(record.get(k) != v for k, v in key.items()):
            self.misses += 1
            return None
        self.hits += 1
        return int(record["count"])

    def put(self, lattice, kind: str, N: int, count: int, w=None, pattern_id=None) -> None:
        if not self.enabled:
            return
        key = self.key(lattice, kind, N, w, pattern_id)
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self._path(key)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps({**key, "count": int(count)}, sort_keys=True), encoding="utf-8")
        tmp.replace(path)
