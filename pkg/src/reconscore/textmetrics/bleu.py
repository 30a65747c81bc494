"""BLEU with modified n-gram precision and brevity penalty."""

from __future__ import annotations

import math
from collections import Counter

from ..errors import MetricInputError
from .ngrams import ngram_counts
from .types import EvalInstance, MetricScore

SMOOTH_EPS = 1e-9


def _closest_ref_length(cand_len: int, ref_lens: list[int]) -> int:
    # ties broken toward the shorter reference
    return min(ref_lens, key=lambda r: (abs(r - cand_len), r))


def _clipped_counts(instance: EvalInstance, n: int) -> tuple[int, int]:
    """(clipped match count, total candidate n-grams) at order n."""
    cand = ngram_counts(instance.candidate.tokens, n)
    total = sum(cand.values())
    if total == 0:
        return 0, 0
    max_ref: Counter = Counter()
    for ref in instance.references:
        for gram, cnt in ngram_counts(ref.tokens, n).items():
            if cnt > max_ref[gram]:
                max_ref[gram] = cnt
    matched = sum(min(cnt, max_ref[gram]) for gram, cnt in cand.items())
    return matched, total


def _geo_mean_precision(matches: list[int], totals: list[int], smooth: bool) -> float:
    logs = []
    for m, t in zip(matches, totals):
        if t == 0:
            return 0.0
        if m == 0:
            if not smooth:
                return 0.0
            m = SMOOTH_EPS
        logs.append(math.log(m / t))
    return math.exp(sum(logs) / len(logs))


def _brevity_penalty(c: int, r: int) -> float:
    if c == 0:
        return 0.0
    return 1.0 if c > r else math.exp(1.0 - r / c)


def bleu(instances: list[EvalInstance], max_n: int = 4,
         level: str = "corpus", smooth: bool = False) -> MetricScore:
    """BLEU-``max_n`` on the x100 scale.

    ``corpus`` pools clipped counts and lengths over all instances;
    ``sentence`` scores each instance and averages. Sentence-level zero
    counts give 0 unless ``smooth`` (add-epsilon) is set.
    """
    if max_n < 1:
        raise MetricInputError("max_n must be >= 1")
    if not instances:
        raise MetricInputError("empty corpus")
    name = f"bleu-{max_n}"

    if level == "sentence":
        per = []
        for inst in instances:
            if len(inst.candidate) == 0:
                raise MetricInputError(
                    f"sentence-level BLEU needs a non-empty candidate ({inst.instance_id!r})")
            matches, totals = [], []
            for n in range(1, max_n + 1):
                m, t = _clipped_counts(inst, n)
                matches.append(m)
                totals.append(t)
            c = len(inst.candidate)
            r = _closest_ref_length(c, [len(ref) for ref in inst.references])
            per.append(_brevity_penalty(c, r) * _geo_mean_precision(matches, totals, smooth) * 100.0)
        return MetricScore(name, sum(per) / len(per), tuple(per))

    if level != "corpus":
        raise MetricInputError(f"unknown BLEU level {level!r}")

    matches = [0] * max_n
    totals = [0] * max_n
    c_total = 0
    r_total = 0
    for inst in instances:
        for n in range(1, max_n + 1):
            m, t = _clipped_counts(inst, n)
            matches[n - 1] += m
            totals[n - 1] += t
        c = len(inst.candidate)
        c_total += c
        r_total += _closest_ref_length(c, [len(ref) for ref in inst.references])
    value = _brevity_penalty(c_total, r_total) * _geo_mean_precision(matches, totals, smooth) * 100.0
    return MetricScore(name, value)
