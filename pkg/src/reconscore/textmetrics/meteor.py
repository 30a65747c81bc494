"""Unigram alignment metric with exact and stem match stages.

The synonym stage of the original is deliberately omitted to keep the
build hermetic (no lexical database); exact + stem matching only.
"""

from __future__ import annotations

from ..errors import MetricInputError
from .stemmer import stem
from .types import EvalInstance, MetricScore


def _align(cand: tuple[str, ...], ref: tuple[str, ...]) -> list[tuple[int, int]]:
    """Greedy two-stage alignment: exact matches first, then stem matches.

    Each stage walks candidate positions in order and takes the first
    unmatched reference position that matches. Returns (cand_idx, ref_idx)
    pairs sorted by candidate position.
    """
    cand_free = [True] * len(cand)
    ref_free = [True] * len(ref)
    matches: list[tuple[int, int]] = []

    for key_fn in (lambda w: w, stem):
        ref_keys = [key_fn(w) for w in ref]
        for ci, cw in enumerate(cand):
            if not cand_free[ci]:
                continue
            ck = key_fn(cw)
            for ri, rk in enumerate(ref_keys):
                if ref_free[ri] and ck == rk:
                    cand_free[ci] = False
                    ref_free[ri] = False
                    matches.append((ci, ri))
                    break

    matches.sort()
    return matches


def _chunks(matches: list[tuple[int, int]]) -> int:
    """Contiguous runs that are adjacent in both candidate and reference."""
    if not matches:
        return 0
    chunks = 1
    for (pc, pr), (cc, cr) in zip(matches, matches[1:]):
        if cc != pc + 1 or cr != pr + 1:
            chunks += 1
    return chunks


def _score_one(cand: tuple[str, ...], ref: tuple[str, ...]) -> float:
    matches = _align(cand, ref)
    m = len(matches)
    if m == 0:
        return 0.0
    p = m / len(cand)
    r = m / len(ref)
    f_mean = 10.0 * p * r / (r + 9.0 * p)
    penalty = 0.5 * (_chunks(matches) / m) ** 3
    return f_mean * (1.0 - penalty)


def meteor(instance: EvalInstance) -> MetricScore:
    """Best alignment score over the references, x100."""
    if len(instance.candidate) == 0:
        raise MetricInputError("empty candidate")
    for ref in instance.references:
        if len(ref) == 0:
            raise MetricInputError("empty reference")
    best = max(_score_one(instance.candidate.tokens, ref.tokens)
               for ref in instance.references)
    return MetricScore("meteor", best * 100.0)


def meteor_corpus(instances: list[EvalInstance]) -> MetricScore:
    if not instances:
        raise MetricInputError("empty corpus")
    per = tuple(meteor(i).value for i in instances)
    return MetricScore("meteor", sum(per) / len(per), per)
