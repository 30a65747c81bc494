"""Content-addressed blob store: a directory of checksum-named files."""

from __future__ import annotations

import hashlib
from pathlib import Path


class BlobStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def put(self, data: bytes) -> str:
        """Store bytes once; returns the sha256 checksum key."""
        checksum = hashlib.sha256(data).hexdigest()
        path = self.root / checksum
        if not path.exists():
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(data)
            tmp.replace(path)
        return checksum

    def get(self, checksum: str) -> bytes:
        return (self.root / checksum).read_bytes()

    def path(self, checksum: str) -> Path:
        return self.root / checksum

    def has(self, checksum: str) -> bool:
        return (self.root / checksum).exists()
