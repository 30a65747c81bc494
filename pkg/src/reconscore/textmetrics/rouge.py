"""ROUGE-L: longest-common-subsequence F-measure."""

from __future__ import annotations

from ..errors import MetricInputError
from .types import EvalInstance, MetricScore

BETA = 1.2


def lcs_length(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    """Classic O(|a||b|) LCS table, one rolling row."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0] * (len(b) + 1)
        for j, y in enumerate(b, 1):
            cur[j] = prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def rouge_l(instance: EvalInstance) -> MetricScore:
    """Max F over references with beta = 1.2, x100."""
    if len(instance.candidate) == 0:
        raise MetricInputError("empty candidate")
    best = 0.0
    b2 = BETA * BETA
    for ref in instance.references:
        lcs = lcs_length(instance.candidate.tokens, ref.tokens)
        if lcs == 0 or len(ref) == 0:
            continue
        r = lcs / len(ref)
        p = lcs / len(instance.candidate)
        f = (1.0 + b2) * r * p / (r + b2 * p)
        best = max(best, f)
    return MetricScore("rouge-l", best * 100.0)


def rouge_l_corpus(instances: list[EvalInstance]) -> MetricScore:
    if not instances:
        raise MetricInputError("empty corpus")
    per = tuple(rouge_l(i).value for i in instances)
    return MetricScore("rouge-l", sum(per) / len(per), per)
