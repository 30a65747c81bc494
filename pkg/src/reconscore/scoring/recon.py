"""Reconstruction-similarity scoring.

A caption is wrapped in the perspective-constraint template, rendered back
into an image by the T2I backend, and both images are embedded; the score
is the cosine similarity mapped onto [0, 1] via (cos + 1) / 2.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..backends.types import (EmbeddingVector, GenerationParams, ImageRecord,
                              count_tokens)
from ..errors import NotNormalizedError, ReconScoreError
from .cache import ScoreCache, score_cache_key
from .prompts import (PROMPT_TEMPLATE_VERSION, truncate_caption,
                      wrap_perspective_prompt)

COSINE_TOL = 1e-6


@dataclass
class EvalContext:
    """Backends and knobs for one evaluation run."""

    t2i: object
    embedder: object
    params: GenerationParams = field(default_factory=GenerationParams)
    cache: ScoreCache = field(default_factory=ScoreCache)
    token_counter: object = count_tokens
    parallelism: int = 1
    dump_reconstructions: object = None  # optional callable(ImageRecord)


@dataclass(frozen=True)
class ReconScoreResult:
    score: float
    cosine: float
    wrapped_prompt: str
    reconstructed_image: str  # blob checksum
    params: GenerationParams
    backends: tuple[str, str]  # (t2i ident, embedder ident)
    cache_hit: bool

    def to_json_obj(self) -> dict:
        return {
            "score": self.score,
            "cosine": self.cosine,
            "wrapped_prompt": self.wrapped_prompt,
            "reconstructed_image": self.reconstructed_image,
            "params": self.params.as_dict(),
            "backends": list(self.backends),
            "cache_hit": self.cache_hit,
        }


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Double-precision cosine with defensive renormalization."""
    va, vb = a.as_array(), b.as_array()
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if abs(na - 1.0) > COSINE_TOL or abs(nb - 1.0) > COSINE_TOL:
        raise NotNormalizedError("embedding vector is not unit length")
    cos = float(np.dot(va / na, vb / nb))
    if cos > 1.0 + COSINE_TOL or cos < -1.0 - COSINE_TOL:
        raise NotNormalizedError(f"cosine {cos} outside [-1, 1]")
    return min(1.0, max(-1.0, cos))


def recon_score(image: ImageRecord, caption: str, ctx: EvalContext) -> ReconScoreResult:
    truncated = truncate_caption(caption, ctx.params.max_prompt_tokens,
                                 ctx.token_counter)
    key = score_cache_key(image.checksum, truncated,
                          ctx.t2i.descriptor, ctx.embedder.descriptor,
                          ctx.params, PROMPT_TEMPLATE_VERSION)
    cached = ctx.cache.get(key)
    if cached is not None:
        return ReconScoreResult(
            score=cached["score"], cosine=cached["cosine"],
            wrapped_prompt=cached["wrapped_prompt"],
            reconstructed_image=cached["reconstructed_image"],
            params=ctx.params,
            backends=(ctx.t2i.descriptor.ident, ctx.embedder.descriptor.ident),
            cache_hit=True)

    wrapped = wrap_perspective_prompt(caption, ctx.params.max_prompt_tokens,
                                      ctx.token_counter)
    recon = ctx.t2i.generate_image(wrapped, ctx.params, aspect=image.aspect)
    if ctx.dump_reconstructions is not None:
        ctx.dump_reconstructions(recon)
    cos = cosine_similarity(ctx.embedder.embed_image(image),
                            ctx.embedder.embed_image(recon))
    score = (cos + 1.0) / 2.0
    record = ctx.cache.put(key, {
        "score": score, "cosine": cos, "wrapped_prompt": wrapped,
        "reconstructed_image": recon.checksum,
    })
    return ReconScoreResult(
        score=record["score"], cosine=record["cosine"],
        wrapped_prompt=record["wrapped_prompt"],
        reconstructed_image=record["reconstructed_image"],
        params=ctx.params,
        backends=(ctx.t2i.descriptor.ident, ctx.embedder.descriptor.ident),
        cache_hit=False)


@dataclass(frozen=True)
class BatchError:
    """Per-pair failure record; the batch itself never aborts."""

    index: int
    code: str
    message: str


def batch_recon_score(pairs: list[tuple[ImageRecord, str]], ctx: EvalContext):
    """Score pairs with bounded fan-out; results come back in input order."""

    def one(idx_pair):
        idx, (image, caption) = idx_pair
        try:
            return recon_score(image, caption, ctx)
        except ReconScoreError as exc:
            return BatchError(index=idx, code=exc.code, message=str(exc))

    if not pairs:
        return []
    if ctx.parallelism <= 1:
        return [one(p) for p in enumerate(pairs)]
    with ThreadPoolExecutor(max_workers=ctx.parallelism) as pool:
        return list(pool.map(one, enumerate(pairs)))


def clip_style_score(image: ImageRecord, caption: str, crossmodal) -> float:
    """CLIP-style reference-free score: 2.5 * max(cos(image, text), 0).

    Raw value in [0, 2.5]; the harness reports it x100 next to the other
    metrics. Captions over the backend token limit raise ``token-limit``
    with the limit echoed.
    """
    cos = cosine_similarity(crossmodal.embed_image(image),
                            crossmodal.embed_text(caption))
    return 2.5 * max(cos, 0.0)
