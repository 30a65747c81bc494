"""CIDEr-D: TF-IDF n-gram consensus with count clipping and length penalty."""

from __future__ import annotations

import math
from collections import Counter, defaultdict

from ..errors import IdfDegenerateError, MetricInputError
from .ngrams import multi_ngram_counts
from .types import EvalInstance, MetricScore

MAX_N = 4
SIGMA = 6.0


def _document_frequencies(instances: list[EvalInstance], max_n: int) -> dict:
    """df per n-gram over the reference corpus; one document = one instance's
    reference set (an n-gram counts once per instance however often it occurs)."""
    df: dict[tuple, int] = defaultdict(int)
    for inst in instances:
        seen = set()
        for ref in inst.references:
            for counts in multi_ngram_counts(ref.tokens, max_n).values():
                seen.update(counts.keys())
        for gram in seen:
            df[gram] += 1
    return df


def _tfidf(counts: dict[int, Counter], idf: dict, max_n: int):
    """Per-order TF-IDF vectors, their norms, and the unigram length."""
    vecs = []
    norms = []
    for n in range(1, max_n + 1):
        vec = {gram: cnt * idf.get(gram, 0.0) for gram, cnt in counts[n].items()}
        vecs.append(vec)
        norms.append(math.sqrt(sum(v * v for v in vec.values())))
    length = sum(counts[1].values())
    return vecs, norms, length


def _clipped_cosine(vh, nh, vr, nr) -> float:
    if nh == 0.0 or nr == 0.0:
        return 0.0
    num = 0.0
    for gram, hv in vh.items():
        rv = vr.get(gram)
        if rv is not None:
            num += min(hv, rv) * rv
    return num / (nh * nr)


def cider_d(instances: list[EvalInstance], max_n: int = MAX_N,
            sigma: float = SIGMA) -> MetricScore:
    """Corpus CIDEr-D on the x100-compatible scale (perfect match -> 100).

    IDF is computed over the reference sets of the given corpus, so the
    corpus must contain at least two instances.
    """
    if len(instances) < 2:
        raise IdfDegenerateError("CIDEr-D IDF needs a corpus of >= 2 instances")
    for inst in instances:
        if not inst.references:
            raise MetricInputError("instance without references")

    n_docs = len(instances)
    df = _document_frequencies(instances, max_n)
    idf = {gram: math.log(n_docs / max(1.0, d)) for gram, d in df.items()}

    per_instance = []
    for inst in instances:
        hv, hn, hl = _tfidf(multi_ngram_counts(inst.candidate.tokens, max_n), idf, max_n)
        per_n = [0.0] * max_n
        for ref in inst.references:
            rv, rn, rl = _tfidf(multi_ngram_counts(ref.tokens, max_n), idf, max_n)
            penalty = math.exp(-((hl - rl) ** 2) / (2.0 * sigma * sigma))
            for n in range(max_n):
                per_n[n] += penalty * _clipped_cosine(hv[n], hn[n], rv[n], rn[n])
        m = len(inst.references)
        per_n = [10.0 / m * v for v in per_n]
        # reported x10 on top of the x10 inside per-n: identical pair -> 100
        per_instance.append(sum(per_n) / max_n * 10.0)

    value = sum(per_instance) / len(per_instance)
    return MetricScore("cider-d", value, tuple(per_instance))
