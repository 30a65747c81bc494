"""Append-only call ledger enabling byte-exact experiment replay.

Every backend invocation is recorded as (role, key, result payload, cache
status, duration). The serialized ledger omits durations so reruns with
identical inputs are byte-identical; timings can be written to a separate
file when wanted.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class LedgerEntry:
    role: str
    key: str
    result: dict
    cache_status: str = "miss"  # miss | hit | replay
    duration_ms: float = 0.0

    def to_json_obj(self) -> dict:
        return {
            "role": self.role,
            "key": self.key,
            "result": self.result,
            "cache_status": self.cache_status,
        }


class CallLedger:
    def __init__(self):
        self._entries: list[LedgerEntry] = []
        self._lock = threading.Lock()

    def record(self, entry: LedgerEntry) -> None:
        with self._lock:
            self._entries.append(entry)

    @property
    def entries(self) -> list[LedgerEntry]:
        with self._lock:
            return list(self._entries)

    def write(self, path: str | Path) -> None:
        lines = [
            json.dumps(e.to_json_obj(), sort_keys=True, ensure_ascii=False)
            for e in self.entries
        ]
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""),
                              encoding="utf-8")

    def write_timings(self, path: str | Path) -> None:
        lines = [
            json.dumps({"role": e.role, "key": e.key,
                        "duration_ms": e.duration_ms}, sort_keys=True)
            for e in self.entries
        ]
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""),
                              encoding="utf-8")

    @classmethod
    def read(cls, path: str | Path) -> "CallLedger":
        ledger = cls()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                ledger.record(LedgerEntry(
                    role=obj["role"], key=obj["key"], result=obj["result"],
                    cache_status=obj.get("cache_status", "miss")))
        return ledger

    def index(self) -> dict[tuple[str, str], dict]:
        """(role, key) -> result payload, first observation wins."""
        idx: dict[tuple[str, str], dict] = {}
        for e in self.entries:
            idx.setdefault((e.role, e.key), e.result)
        return idx
