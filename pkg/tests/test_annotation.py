import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reconscore.annotation import (RUBRIC, AnnotationError, AnnotationStore,
                                   deblind, load_annotation_tasks)
from reconscore.backends import BlobStore

from conftest import make_png


@pytest.fixture
def tasks_path(tmp_path):
    images = tmp_path / "images"
    images.mkdir()
    path = tmp_path / "tasks.jsonl"
    with open(path, "w") as fh:
        for i in range(5):
            (images / f"t{i}.png").write_bytes(make_png(100 + i))
            fh.write(json.dumps({
                "image_id": f"t{i}",
                "image": f"images/t{i}.png",
                "candidates": [{"model": f"model-{j}", "text": f"caption {j} of {i}"}
                               for j in range(3)]}) + "\n")
    return path


@pytest.fixture
def blobs(tmp_path):
    return BlobStore(tmp_path / "blobs")


@pytest.fixture
def tasks(tasks_path, blobs):
    return load_annotation_tasks(tasks_path, blobs)


def test_deblind_identity():
    assert deblind([0, 1, 2], [1, 2, 3]) == [1, 2, 3]


def test_deblind_example():
    # candidate 2 shown first and ranked 1 -> original index 2 has rank 1
    assert deblind([2, 0, 1], [1, 2, 3]) == [2, 3, 1]


def test_deblind_inverts_any_permutation_1000():
    rng = random.Random(0)
    for _ in range(1000):
        k = rng.randint(2, 8)
        perm = list(range(k))
        rng.shuffle(perm)
        original_ranking = list(range(1, k + 1))
        rng.shuffle(original_ranking)
        # what the annotator sees and submits, given the display permutation
        display_ranking = [original_ranking[perm[slot]] for slot in range(k)]
        assert deblind(perm, display_ranking) == original_ranking


@given(st.permutations(list(range(5))), st.permutations([1, 2, 3, 4, 5]))
def test_deblind_is_a_permutation_action(perm, display_ranking):
    out = deblind(list(perm), list(display_ranking))
    assert sorted(out) == [1, 2, 3, 4, 5]


def test_task_loading_requires_two_candidates(tmp_path, blobs):
    (tmp_path / "one.png").write_bytes(make_png(1))
    path = tmp_path / "tasks.jsonl"
    path.write_text(json.dumps({"image_id": "a", "image": "one.png",
                                "candidates": [{"model": "m", "text": "only"}]}) + "\n")
    with pytest.raises(AnnotationError) as err:
        load_annotation_tasks(path, blobs)
    assert err.value.code == "nothing-to-rank"


def test_session_flow_and_blinding(tasks, tmp_path):
    store = AnnotationStore(tasks, tmp_path / "state")
    session = store.create_session("alice", shuffle_seed=3)
    seen = []
    while True:
        view = store.next_task(session.session_id)
        if view is None:
            break
        # the client payload carries caption texts and rubric only
        assert set(view) == {"task_id", "image_checksum", "candidates",
                             "rubric", "progress"}
        assert view["rubric"] == RUBRIC
        assert "model" not in json.dumps(view)
        seen.append(view["task_id"])
        store.submit_ranking(session.session_id, view["task_id"], [1, 2, 3])
    assert sorted(seen) == [t.task_id for t in tasks]
    assert len(store.get_session(session.session_id).completed) == 5


def test_display_permutation_is_stable_until_submission(tasks, tmp_path):
    store = AnnotationStore(tasks, tmp_path / "state")
    session = store.create_session("a", 0)
    first = store.next_task(session.session_id)
    second = store.next_task(session.session_id)
    assert first == second  # idempotent client view


def test_submitted_ranking_is_deblinded(tasks, tmp_path):
    store = AnnotationStore(tasks, tmp_path / "state")
    session = store.create_session("a", 0)
    view = store.next_task(session.session_id)
    task_id = view["task_id"]
    perm = store.display_permutation(session.session_id, task_id)
    store.submit_ranking(session.session_id, task_id, [1, 2, 3])
    stored = store.get_session(session.session_id).completed[task_id]["ranking"]
    assert stored == deblind(perm, [1, 2, 3])


def test_invalid_ranking_and_double_submit(tasks, tmp_path):
    store = AnnotationStore(tasks, tmp_path / "state")
    session = store.create_session("a", 0)
    task_id = store.next_task(session.session_id)["task_id"]
    with pytest.raises(AnnotationError) as err:
        store.submit_ranking(session.session_id, task_id, [1, 1, 2])
    assert err.value.code == "not-a-permutation"
    store.submit_ranking(session.session_id, task_id, [3, 1, 2])
    with pytest.raises(AnnotationError) as err:
        store.submit_ranking(session.session_id, task_id, [1, 2, 3])
    assert err.value.code == "already-completed"


def test_event_log_replay_reconstructs_state(tasks, tmp_path):
    state = tmp_path / "state"
    store = AnnotationStore(tasks, state)
    session = store.create_session("bob", 7)
    task_id = store.next_task(session.session_id)["task_id"]
    store.submit_ranking(session.session_id, task_id, [2, 3, 1])
    store.adjudicate(session.session_id, task_id, [1, 2, 3])

    reloaded = AnnotationStore(tasks, state)
    a = store.get_session(session.session_id)
    b = reloaded.get_session(session.session_id)
    assert a.task_order == b.task_order
    assert a.completed == b.completed
    assert b.completed[task_id]["adjudicated"]


def test_adjudication_rules(tasks, tmp_path):
    store = AnnotationStore(tasks, tmp_path / "state")
    session = store.create_session("a", 0)
    task_id = store.next_task(session.session_id)["task_id"]
    with pytest.raises(AnnotationError) as err:
        store.adjudicate(session.session_id, task_id, [1, 2, 3])
    assert err.value.code == "not-completed"
    store.submit_ranking(session.session_id, task_id, [1, 2, 3])
    store.adjudicate(session.session_id, task_id, [3, 2, 1])
    assert store.get_session(session.session_id).completed[task_id]["ranking"] == [3, 2, 1]


def test_export_shape_and_adjudicated_flag(tasks, tmp_path):
    store = AnnotationStore(tasks, tmp_path / "state")
    session = store.create_session("carol", 1)
    first = store.next_task(session.session_id)["task_id"]
    store.submit_ranking(session.session_id, first, [1, 3, 2])
    store.adjudicate(session.session_id, first, [2, 1, 3])
    records = store.export_preferences()
    assert len(records) == 1
    rec = records[0]
    assert rec["annotator_id"] == "carol"
    assert rec["ranking"] == [2, 1, 3]
    assert rec["adjudicated"] is True
    assert {c["model"] for c in rec["candidates"]} == {"model-0", "model-1", "model-2"}


def test_export_empty_raises(tasks, tmp_path):
    store = AnnotationStore(tasks, tmp_path / "state")
    with pytest.raises(AnnotationError) as err:
        store.export_preferences()
    assert err.value.code == "nothing-completed"
