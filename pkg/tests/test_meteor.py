import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reconscore.errors import ReconScoreError
from reconscore.textmetrics import make_instance, meteor, meteor_corpus, stem

from corpora import VOCAB, random_corpus
from oracles import meteor_oracle


def test_identity_fixture():
    # 3 matches in 1 chunk: F = 1, penalty = 0.5 * (1/3)^3
    value = meteor(make_instance("a b c", ["a b c"])).value
    assert value == pytest.approx((1 - 0.5 * (1 / 3) ** 3) * 100, abs=1e-9)
    assert abs(value - 98.15) < 0.01


def test_zero_matches():
    assert meteor(make_instance("x y z", ["p q r"])).value == 0.0


def test_stem_stage_matches():
    # "cats" vs "cat": only the stem stage aligns them; m = 1, chunks = 1,
    # penalty = 0.5, F = 1
    assert meteor(make_instance("cats", ["cat"])).value == pytest.approx(50.0)


def test_best_reference_wins():
    inst = make_instance("a b c", ["x y z", "a b c"])
    assert meteor(inst).value == pytest.approx(98.1481481481, abs=1e-6)


def test_chunk_penalty_orders_fragmentation():
    contiguous = meteor(make_instance("a b c d", ["a b c d x"])).value
    fragmented = meteor(make_instance("a x b y", ["a p b q"])).value
    assert contiguous > fragmented


def test_empty_candidate_rejected():
    with pytest.raises(ReconScoreError):
        meteor(make_instance("", ["a b"]))


def test_matches_oracle_randomized():
    rng = random.Random(99)
    for _ in range(200):
        instances, pairs = random_corpus(rng)
        for inst, (cand, refs) in zip(instances, pairs):
            assert meteor(inst).value == pytest.approx(
                meteor_oracle(cand, refs, stem), abs=1e-9)


def test_corpus_is_mean_of_instances():
    insts = [make_instance("a b c", ["a b c"]),
             make_instance("x", ["p"])]
    score = meteor_corpus(insts)
    assert score.value == pytest.approx(sum(score.per_instance) / 2)


@given(st.lists(st.sampled_from(VOCAB), min_size=1, max_size=10),
       st.lists(st.sampled_from(VOCAB), min_size=1, max_size=10))
def test_bounds_and_symmetric_identity(cand, ref):
    value = meteor(make_instance(" ".join(cand), [" ".join(ref)])).value
    assert 0.0 <= value <= 100.0
