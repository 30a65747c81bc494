"""Randomized small-corpus generator shared by the metric oracle suites."""

from __future__ import annotations

import random

from reconscore.textmetrics import make_instance

VOCAB = ["river", "field", "harbor", "boat", "plane", "road", "tree",
         "house", "roof", "green", "white", "two", "the", "a", "near"]


def random_corpus(rng: random.Random, max_instances: int = 8,
                  max_tokens: int = 15, allow_empty_candidate: bool = False):
    """Returns (instances, token_pairs) over a small vocabulary.

    token_pairs mirror the tokenized instances for the dict-based oracles.
    """
    n = rng.randint(2, max_instances)
    instances = []
    pairs = []
    for i in range(n):
        lo = 0 if allow_empty_candidate else 1
        cand = [rng.choice(VOCAB) for _ in range(rng.randint(lo, max_tokens))]
        refs = [[rng.choice(VOCAB) for _ in range(rng.randint(1, max_tokens))]
                for _ in range(rng.randint(1, 3))]
        instances.append(make_instance(" ".join(cand),
                                       [" ".join(r) for r in refs], f"i{i}"))
        pairs.append((cand, refs))
    return instances, pairs
