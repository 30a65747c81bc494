"""Reference-free remote-sensing caption evaluation and best-of-N captioning.

Core pieces: reconstruction-based scoring (``scoring``), a training-free
best-of-N captioner (``describer``), from-scratch reference metrics
(``textmetrics``), rank statistics (``rankstats``), pluggable model
backends (``backends``), experiment runners (``harness``), and a
double-blind annotation service (``annotation``).
"""

from .describer import DescriberConfig, describe, sample_candidates, select_best
from .errors import ReconScoreError
from .scoring.recon import (EvalContext, ReconScoreResult, batch_recon_score,
                            clip_style_score, recon_score)

__all__ = [
    "ReconScoreError", "EvalContext", "ReconScoreResult", "recon_score",
    "batch_recon_score", "clip_style_score", "DescriberConfig", "describe",
    "sample_candidates", "select_best",
]

__version__ = "0.1.0"
