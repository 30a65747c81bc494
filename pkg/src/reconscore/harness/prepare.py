"""Offline preparation of experiment inputs (paraphrases, perturbations,
length variants) via the text side of the caption backend.

The runners consume prepared files only, so experiments stay hermetic;
this step is the one place an LLM rewrites text, with the instructions
kept here verbatim for the record.
"""

from __future__ import annotations

import json
from pathlib import Path

from .datasets import DatasetManifest

PARAPHRASE_INSTRUCTION = (
    "Rewrite the following remote sensing image caption with different "
    "vocabulary and syntax while strictly preserving every visual fact "
    "(objects, counts, attributes, spatial relations). Output only the "
    "rewritten caption.\n\nCaption: {caption}"
)

PERTURB_INSTRUCTION = (
    "Rewrite the following remote sensing image caption keeping the wording "
    "as close to the original as possible, but introduce exactly one "
    "fine-grained factual error (change one object class, count, color, or "
    "spatial relation). Output only the rewritten caption.\n\nCaption: {caption}"
)

LENGTH_INSTRUCTION = (
    "Here are semantic triplets extracted from a remote sensing image "
    "annotation: {triplets}. Write a {length_hint} caption that expresses "
    "exactly these facts, nothing more. Output only the caption.\n"
)

LENGTH_HINTS = {
    "S": "short (about 18 words)",
    "M": "medium-length (about 55 words)",
    "L": "long and detailed (about 170 words)",
}


def prepare_perturbation_file(manifest: DatasetManifest, caption_backend,
                              out_path: str | Path) -> int:
    """One JSONL record per image with paraphrased and perturbed variants
    of the first ground-truth reference."""
    n = 0
    with open(out_path, "w", encoding="utf-8") as fh:
        for entry in manifest.entries:
            if not entry.references:
                continue
            gt = entry.references[0]
            record = {
                "image_id": entry.image_id,
                "references": list(entry.references),
                "variants": {
                    "paraphrased": caption_backend.complete_text(
                        PARAPHRASE_INSTRUCTION.format(caption=gt)),
                    "perturbed": caption_backend.complete_text(
                        PERTURB_INSTRUCTION.format(caption=gt)),
                },
            }
            fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
            n += 1
    return n


def prepare_length_file(manifest: DatasetManifest, caption_backend,
                        out_path: str | Path) -> int:
    """One JSONL record per image with S/M/L same-semantics variants,
    generated from the ground-truth annotation's content."""
    n = 0
    with open(out_path, "w", encoding="utf-8") as fh:
        for entry in manifest.entries:
            if not entry.references:
                continue
            triplets = entry.references[0]
            variants = {
                tag: caption_backend.complete_text(
                    LENGTH_INSTRUCTION.format(triplets=triplets,
                                              length_hint=hint))
                for tag, hint in LENGTH_HINTS.items()
            }
            record = {
                "image_id": entry.image_id,
                "references": list(entry.references),
                "variants": variants,
            }
            fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
            n += 1
    return n
