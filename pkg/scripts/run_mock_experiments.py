#!/usr/bin/env python3
"""Run all five experiment runners against the bundled toy dataset with mock
backends and print the resulting markdown tables.

Usage: python3 scripts/run_mock_experiments.py [--out runs/]
"""

import argparse
from pathlib import Path

from reconscore.backends import BlobStore, mock_backends
from reconscore.harness import (HarnessContext, emit_report, load_dataset,
                                render_markdown, run_candidate_ablation,
                                run_encoder_ablation, run_length_robustness,
                                run_perturbation_study,
                                run_preference_correlation)
from reconscore.harness.datasets import PreferenceRecord, VariantRecord
from reconscore.scoring.cache import ScoreCache

ROOT = Path(__file__).resolve().parent.parent


def synth_preferences(manifest):
    """Candidates of decreasing reference overlap, ranked accordingly."""
    prefs = []
    for entry in manifest.entries:
        ref = entry.references[0]
        prefs.append(PreferenceRecord(
            image_id=entry.image_id,
            candidates=(
                {"model": "verbatim", "text": ref},
                {"model": "truncated", "text": " ".join(ref.split()[:4])},
                {"model": "offtopic", "text": "unrelated description entirely"},
            ),
            ranking=(1, 2, 3)))
    return prefs


def synth_variants(manifest):
    records = []
    for entry in manifest.entries:
        ref = entry.references[0]
        words = ref.split()
        records.append(VariantRecord(
            entry.image_id, entry.references,
            {"paraphrased": " ".join(reversed(words)),
             "perturbed": "gray towers beside a frozen lake",
             "S": " ".join(words[:3]),
             "M": ref,
             "L": ref + " with additional surrounding context visible in frame"}))
    return records


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="runs/mock-demo")
    args = parser.parse_args()

    out = Path(args.out)
    store = BlobStore(out / "blobs")
    backends = mock_backends(store)
    hctx = HarnessContext(backends=backends, store=store,
                          cache=ScoreCache(out / "cache"))
    manifest = load_dataset(ROOT / "data/toy/manifest.json")

    sources = {
        "model-a": {e.image_id: e.references[0] for e in manifest.entries},
        "model-b": {e.image_id: " ".join(e.references[0].split()[:4])
                    for e in manifest.entries},
    }
    reports = [
        run_preference_correlation(synth_preferences(manifest), manifest, hctx),
        run_perturbation_study(synth_variants(manifest), hctx, manifest=manifest),
        run_length_robustness(synth_variants(manifest), hctx, manifest=manifest),
        run_candidate_ablation([manifest], [1, 2, 4, 6, 8, 10], hctx),
        run_encoder_ablation(manifest, sources, hctx),
    ]
    for report in reports:
        emit_report(report, out / "reports")
        print(render_markdown(report))


if __name__ == "__main__":
    main()
