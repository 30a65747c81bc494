"""Dataset loading, experiment runners, and deterministic reports."""

from .datasets import (DatasetManifest, ManifestEntry, PreferenceRecord,
                       VariantRecord, load_caption_file, load_dataset,
                       load_image, load_preferences, load_variants)
from .prepare import prepare_length_file, prepare_perturbation_file
from .reports import ExperimentReport, emit_report, render_markdown
from .runners import (DEFAULT_METRICS, REFERENCE_BASED, REFERENCE_FREE,
                      HarnessContext, population_sigma,
                      run_candidate_ablation, run_encoder_ablation,
                      run_length_robustness, run_perturbation_study,
                      run_preference_correlation, score_items)

__all__ = [
    "DatasetManifest", "ManifestEntry", "PreferenceRecord", "VariantRecord",
    "load_caption_file", "load_dataset", "load_image", "load_preferences",
    "load_variants", "prepare_length_file", "prepare_perturbation_file",
    "ExperimentReport", "emit_report", "render_markdown", "DEFAULT_METRICS",
    "REFERENCE_BASED", "REFERENCE_FREE", "HarnessContext", "population_sigma",
    "run_candidate_ablation", "run_encoder_ablation", "run_length_robustness",
    "run_perturbation_study", "run_preference_correlation", "score_items",
]
