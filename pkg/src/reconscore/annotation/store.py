"""Event-sourced persistence for double-blind preference ranking.

Each session is an append-only JSON Lines event log; replaying the log
reconstructs identical session state. Model identities stay server-side:
client-facing task payloads carry caption texts only, in a per-task
randomized display order whose permutation is stored with the session.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ReconScoreError

RUBRIC = (
    "Rank the candidate captions from best to worst by: "
    "(1) object completeness and factual accuracy; "
    "(2) fine-grained attribute richness; "
    "(3) spatial relationship fidelity."
)


class AnnotationError(ReconScoreError):
    code = "annotation"


@dataclass(frozen=True)
class AnnotationTask:
    """One instance to rank: image payload plus K candidates with model
    provenance (never serialized to clients)."""

    task_id: str
    image_checksum: str
    candidates: tuple[dict, ...]  # {"model": str, "text": str}


@dataclass
class AnnotationSession:
    session_id: str
    annotator_id: str
    shuffle_seed: int
    task_order: list[str]
    completed: dict = field(default_factory=dict)  # task_id -> submission dict
    created_at: float = 0.0
    updated_at: float = 0.0


def _seeded_permutation(n: int, *key_parts) -> list[int]:
    key = "|".join(str(p) for p in key_parts)
    seed = int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big")
    import numpy as np
    perm = np.random.default_rng(seed).permutation(n)
    return [int(i) for i in perm]


def deblind(display_permutation: list[int], display_ranking: list[int]) -> list[int]:
    """Compose the display ranking with the display permutation.

    ``display_permutation[i]`` is the original index of the candidate shown
    at display slot i; ``display_ranking[i]`` is the rank the annotator gave
    that slot. Returns ranks in original candidate order.
    """
    original = [0] * len(display_permutation)
    for slot, rank in enumerate(display_ranking):
        original[display_permutation[slot]] = rank
    return original


def load_annotation_tasks(path: str | Path, store) -> list[AnnotationTask]:
    """JSONL of {"image_id", "image": path, "candidates": [{model, text}]}.

    Image bytes go into the blob store; tasks reference them by checksum.
    """
    tasks = []
    base = Path(path).parent
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            image_path = base / obj["image"]
            checksum = store.put(image_path.read_bytes())
            tasks.append(AnnotationTask(
                task_id=str(obj["image_id"]),
                image_checksum=checksum,
                candidates=tuple(obj["candidates"])))
    k = {len(t.candidates) for t in tasks}
    if any(v < 2 for v in k):
        raise AnnotationError("every task needs at least 2 candidates",
                              code="nothing-to-rank")
    return tasks


class AnnotationStore:
    """Sessions over one task set, persisted per session as an event log."""

    def __init__(self, tasks: list[AnnotationTask], root: str | Path):
        if not tasks:
            raise AnnotationError("empty dataset", code="empty-dataset")
        self.tasks = {t.task_id: t for t in tasks}
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[str, AnnotationSession] = {}
        for log in sorted(self.root.glob("session-*.jsonl")):
            self._replay_log(log)

    # -- persistence ------------------------------------------------------

    def _log_path(self, session_id: str) -> Path:
        return self.root / f"session-{session_id}.jsonl"

    def _append(self, session_id: str, event: dict) -> None:
        with open(self._log_path(session_id), "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True, ensure_ascii=False) + "\n")

    def _replay_log(self, path: Path) -> None:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    self._apply(json.loads(line), persist=False)

    def _apply(self, event: dict, persist: bool = True) -> None:
        kind = event["type"]
        if kind == "session-created":
            session = AnnotationSession(
                session_id=event["session_id"],
                annotator_id=event["annotator_id"],
                shuffle_seed=event["shuffle_seed"],
                task_order=list(event["task_order"]),
                created_at=event["ts"], updated_at=event["ts"])
            self.sessions[session.session_id] = session
        elif kind == "ranking-submitted":
            session = self.sessions[event["session_id"]]
            session.completed[event["task_id"]] = {
                "ranking": list(event["original_ranking"]),
                "display_permutation": list(event["display_permutation"]),
                "display_ranking": list(event["display_ranking"]),
                "adjudicated": False,
            }
            session.updated_at = event["ts"]
        elif kind == "adjudicated":
            session = self.sessions[event["session_id"]]
            session.completed[event["task_id"]] = {
                "ranking": list(event["ranking"]),
                "display_permutation": session.completed[event["task_id"]]["display_permutation"],
                "display_ranking": session.completed[event["task_id"]]["display_ranking"],
                "adjudicated": True,
            }
            session.updated_at = event["ts"]
        else:
            raise AnnotationError(f"unknown event type {kind!r}")
        if persist:
            self._append(event["session_id"], event)

    # -- operations -------------------------------------------------------

    def create_session(self, annotator_id: str, shuffle_seed: int) -> AnnotationSession:
        session_id = hashlib.sha256(
            f"{annotator_id}|{shuffle_seed}|{len(self.sessions)}".encode()
        ).hexdigest()[:12]
        order_perm = _seeded_permutation(len(self.tasks), "session", shuffle_seed)
        task_ids = sorted(self.tasks)
        self._apply({
            "type": "session-created",
            "session_id": session_id,
            "annotator_id": annotator_id,
            "shuffle_seed": shuffle_seed,
            "task_order": [task_ids[i] for i in order_perm],
            "ts": time.time(),
        })
        return self.sessions[session_id]

    def get_session(self, session_id: str) -> AnnotationSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise AnnotationError(f"unknown session {session_id!r}",
                                  code="unknown-session")
        return session

    def display_permutation(self, session_id: str, task_id: str) -> list[int]:
        k = len(self.tasks[task_id].candidates)
        return _seeded_permutation(k, "display", session_id, task_id)

    def next_task(self, session_id: str) -> dict | None:
        """Client view of the first uncompleted task, or None when done.

        Idempotent until submission: the display permutation is seeded by
        (session, task). The payload never includes model identities.
        """
        session = self.get_session(session_id)
        for task_id in session.task_order:
            if task_id in session.completed:
                continue
            task = self.tasks[task_id]
            perm = self.display_permutation(session_id, task_id)
            return {
                "task_id": task_id,
                "image_checksum": task.image_checksum,
                "candidates": [task.candidates[i]["text"] for i in perm],
                "rubric": RUBRIC,
                "progress": {"done": len(session.completed),
                             "total": len(session.task_order)},
            }
        return None

    def submit_ranking(self, session_id: str, task_id: str,
                       display_ranking: list[int]) -> dict:
        session = self.get_session(session_id)
        if task_id not in self.tasks or task_id not in session.task_order:
            raise AnnotationError(f"unknown task {task_id!r}", code="unknown-task")
        if task_id in session.completed:
            raise AnnotationError(f"task {task_id!r} already completed",
                                  code="already-completed")
        k = len(self.tasks[task_id].candidates)
        if sorted(display_ranking) != list(range(1, k + 1)):
            raise AnnotationError(
                f"ranking must be a permutation of 1..{k}",
                code="not-a-permutation")
        perm = self.display_permutation(session_id, task_id)
        self._apply({
            "type": "ranking-submitted",
            "session_id": session_id,
            "task_id": task_id,
            "display_permutation": perm,
            "display_ranking": list(display_ranking),
            "original_ranking": deblind(perm, list(display_ranking)),
            "ts": time.time(),
        })
        return {"ok": True, "task_id": task_id}

    def adjudicate(self, session_id: str, task_id: str, ranking: list[int]) -> dict:
        """Consensus override of a completed task's original-order ranking."""
        session = self.get_session(session_id)
        if task_id not in session.completed:
            raise AnnotationError("only completed tasks can be adjudicated",
                                  code="not-completed")
        k = len(self.tasks[task_id].candidates)
        if sorted(ranking) != list(range(1, k + 1)):
            raise AnnotationError(f"ranking must be a permutation of 1..{k}",
                                  code="not-a-permutation")
        self._apply({
            "type": "adjudicated",
            "session_id": session_id,
            "task_id": task_id,
            "ranking": list(ranking),
            "ts": time.time(),
        })
        return {"ok": True, "task_id": task_id, "adjudicated": True}

    def export_preferences(self) -> list[dict]:
        """Preference-dataset records, one per (annotator, completed task)."""
        records = []
        for session_id in sorted(self.sessions):
            session = self.sessions[session_id]
            for task_id in session.task_order:
                sub = session.completed.get(task_id)
                if sub is None:
                    continue
                task = self.tasks[task_id]
                record = {
                    "image_id": task_id,
                    "candidates": [dict(c) for c in task.candidates],
                    "ranking": sub["ranking"],
                    "annotator_id": session.annotator_id,
                }
                if sub["adjudicated"]:
                    record["adjudicated"] = True
                records.append(record)
        if not records:
            raise AnnotationError("nothing completed", code="nothing-completed")
        return records
