"""Content-addressed score cache: append-only JSON Lines record log.

Lookups are exact-match only; the first writer for a key wins and later
writes for the same key are ignored.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path

from ..backends.base import canonical_key
from ..backends.types import BackendDescriptor, GenerationParams


def score_cache_key(image_checksum: str, truncated_caption: str,
                    t2i: BackendDescriptor, embedder: BackendDescriptor,
                    params: GenerationParams, template_version: str) -> str:
    """Collision-resistant digest over everything that determines a score."""
    payload = canonical_key({
        "image": image_checksum,
        "caption": truncated_caption,
        "t2i": list(t2i.triple),
        "embedder": list(embedder.triple),
        "params": params.as_dict(),
        "template_version": template_version,
    })
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ScoreCache:
    def __init__(self, root: str | Path | None = None):
        self._index: dict[str, dict] = {}
        self._lock = threading.Lock()
        self._log_path: Path | None = None
        if root is not None:
            root = Path(root)
            root.mkdir(parents=True, exist_ok=True)
            self._log_path = root / "records.jsonl"
            if self._log_path.exists():
                with open(self._log_path, encoding="utf-8") as fh:
                    for line in fh:
                        line = line.strip()
                        if line:
                            obj = json.loads(line)
                            self._index.setdefault(obj["key"], obj["record"])

    def get(self, key: str) -> dict | None:
        with self._lock:
            return self._index.get(key)

    def put(self, key: str, record: dict) -> dict:
        """Insert unless present; returns the canonical (first) record."""
        with self._lock:
            if key in self._index:
                return self._index[key]
            self._index[key] = record
            if self._log_path is not None:
                with open(self._log_path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps({"key": key, "record": record},
                                        sort_keys=True, ensure_ascii=False) + "\n")
            return record

    def __len__(self) -> int:
        with self._lock:
            return len(self._index)
