"""ReconScore proper: prompt wrapping, reconstruction, cosine, cache."""

from .cache import ScoreCache, score_cache_key
from .prompts import (PERSPECTIVE_PREFIX, PERSPECTIVE_SUFFIX,
                      PROMPT_TEMPLATE_VERSION, task_prompt, truncate_caption,
                      wrap_perspective_prompt)
from .recon import (BatchError, EvalContext, ReconScoreResult,
                    batch_recon_score, clip_style_score, cosine_similarity,
                    recon_score)

__all__ = [
    "ScoreCache", "score_cache_key", "PERSPECTIVE_PREFIX", "PERSPECTIVE_SUFFIX",
    "PROMPT_TEMPLATE_VERSION", "task_prompt", "truncate_caption",
    "wrap_perspective_prompt", "BatchError", "EvalContext", "ReconScoreResult",
    "batch_recon_score", "clip_style_score", "cosine_similarity", "recon_score",
]
