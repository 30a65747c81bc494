"""Carrier types for reference-based caption metrics."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import MetricInputError
from .tokenizer import TokenSequence, tokenize


@dataclass(frozen=True)
class MetricScore:
    """One metric value on the x100 table scale.

    BLEU/METEOR/ROUGE lie in [0, 100]; CIDEr-D may exceed 100.
    """

    metric_name: str
    value: float
    per_instance: tuple[float, ...] | None = None


@dataclass(frozen=True)
class EvalInstance:
    """One candidate caption with its reference set."""

    candidate: TokenSequence
    references: tuple[TokenSequence, ...]
    instance_id: str = ""

    def __post_init__(self):
        if not self.references:
            raise MetricInputError(
                f"instance {self.instance_id!r} has no references")


def make_instance(candidate: str, references: list[str], instance_id: str = "") -> EvalInstance:
    return EvalInstance(
        candidate=tokenize(candidate),
        references=tuple(tokenize(r) for r in references),
        instance_id=instance_id,
    )


def load_corpus(path: str | Path) -> list[EvalInstance]:
    """Read a JSON Lines corpus: {"id", "candidate", "references"} per line."""
    instances = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            iid = str(obj.get("id", lineno))
            if iid in seen:
                raise MetricInputError(f"duplicate instance id {iid!r}")
            seen.add(iid)
            instances.append(make_instance(obj["candidate"], obj["references"], iid))
    return instances
