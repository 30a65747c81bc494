"""Training-free best-of-N captioning with reconstruction-score selection.

Sample N candidates at temperature tau from the caption backend, score each
by reconstruction similarity, and keep the argmax (ties toward the earliest
sample).
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .backends.types import CaptionCandidate, ImageRecord
from .errors import EmptyGenerationError, NoCandidatesError, ReconScoreError
from .scoring.prompts import task_prompt
from .scoring.recon import EvalContext, recon_score

log = logging.getLogger(__name__)

DEFAULT_N = 10
DEFAULT_TEMPERATURE = 0.8


@dataclass(frozen=True)
class CandidateSet:
    """Candidates for one image, indices contiguous from 1. Failed slots
    (empty generations after one retry) are recorded separately."""

    image_id: str
    candidates: tuple[CaptionCandidate, ...]
    temperature: float
    n_requested: int
    failed_nonces: tuple[int, ...] = ()

    @property
    def n(self) -> int:
        return len(self.candidates)


@dataclass(frozen=True)
class SelectionResult:
    best_index: int  # 1-based into the candidate set
    best_caption: str
    scores: tuple[float, ...]
    tie_broken: bool
    failed_indices: tuple[int, ...] = ()  # candidates whose scoring failed


def sample_candidates(image: ImageRecord, caption_backend, n: int = DEFAULT_N,
                      temperature: float = DEFAULT_TEMPERATURE) -> CandidateSet:
    """n generation calls with nonces 1..n; empty generations are retried
    once, then dropped (the effective pool shrinks)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    prompt = task_prompt()
    candidates = []
    failed = []
    for nonce in range(1, n + 1):
        try:
            candidates.append(caption_backend.generate_caption(
                image, prompt, temperature, nonce))
        except EmptyGenerationError:
            try:
                candidates.append(caption_backend.generate_caption(
                    image, prompt, temperature, nonce))
            except EmptyGenerationError:
                log.warning("candidate %d for image %s empty twice, dropped",
                            nonce, image.image_id)
                failed.append(nonce)
    if not candidates:
        raise NoCandidatesError(f"all {n} candidate slots failed for {image.image_id!r}")
    return CandidateSet(image_id=image.image_id, candidates=tuple(candidates),
                        temperature=temperature, n_requested=n,
                        failed_nonces=tuple(failed))


def select_best(image: ImageRecord, candidate_set: CandidateSet,
                ctx: EvalContext) -> SelectionResult:
    """Score every candidate and take the argmax; scoring may fan out, but
    the reduction is deterministic and ties break toward the smallest index."""
    if candidate_set.n == 0:
        raise NoCandidatesError("empty candidate set")

    def score_one(candidate: CaptionCandidate):
        try:
            return recon_score(image, candidate.text, ctx).score
        except ReconScoreError as exc:
            log.warning("scoring failed for candidate of %s: %s",
                        image.image_id, exc)
            return None

    if ctx.parallelism <= 1:
        raw = [score_one(c) for c in candidate_set.candidates]
    else:
        with ThreadPoolExecutor(max_workers=ctx.parallelism) as pool:
            raw = list(pool.map(score_one, candidate_set.candidates))

    failed = tuple(i + 1 for i, s in enumerate(raw) if s is None)
    scored = [(s, i) for i, s in enumerate(raw) if s is not None]
    if not scored:
        raise NoCandidatesError("every candidate failed to score")
    best_score = max(s for s, _ in scored)
    best_i = min(i for s, i in scored if s == best_score)
    tie = sum(1 for s, _ in scored if s == best_score) > 1
    return SelectionResult(
        best_index=best_i + 1,
        best_caption=candidate_set.candidates[best_i].text,
        scores=tuple(s if s is not None else float("nan") for s in raw),
        tie_broken=tie,
        failed_indices=failed)


@dataclass
class DescriberConfig:
    n: int = DEFAULT_N
    temperature: float = DEFAULT_TEMPERATURE


def describe(image: ImageRecord, caption_backend, ctx: EvalContext,
             config: DescriberConfig | None = None
             ) -> tuple[str, SelectionResult, CandidateSet]:
    """Full sample-then-select pipeline; returns the caption with complete
    provenance (all candidates, all scores)."""
    config = config or DescriberConfig()
    candidate_set = sample_candidates(image, caption_backend,
                                      n=config.n, temperature=config.temperature)
    selection = select_best(image, candidate_set, ctx)
    return selection.best_caption, selection, candidate_set
