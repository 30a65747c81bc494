import json

import pytest

from reconscore.errors import ReconScoreError
from reconscore.harness import (load_caption_file, load_dataset, load_image,
                                load_preferences, load_variants)

from conftest import TOY_MANIFEST, make_png


def write_manifest(tmp_path, entries, name="tmpset"):
    for e in entries:
        path = tmp_path / e["image"]
        if e.pop("_write", True):
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(make_png(hash(e["image_id"]) % 1000))
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({"name": name, "entries": entries}))
    return manifest


def test_repo_toy_manifest_loads():
    manifest = load_dataset(TOY_MANIFEST)
    assert len(manifest.entries) == 3
    assert all(e.references for e in manifest.entries)


def test_duplicate_id_rejected(tmp_path):
    manifest = write_manifest(tmp_path, [
        {"image_id": "a", "image": "a.png", "references": ["x"]},
        {"image_id": "a", "image": "b.png", "references": ["y"]},
    ])
    with pytest.raises(ReconScoreError) as err:
        load_dataset(manifest)
    assert err.value.code == "duplicate-id"
    assert "a" in str(err.value)


def test_missing_image_enumerated(tmp_path):
    manifest = write_manifest(tmp_path, [
        {"image_id": "a", "image": "a.png", "references": ["x"]},
        {"image_id": "b", "image": "gone.png", "references": ["y"], "_write": False},
    ])
    with pytest.raises(ReconScoreError) as err:
        load_dataset(manifest)
    assert err.value.code == "missing-image"
    assert "gone.png" in str(err.value)


def test_unreadable_manifest(tmp_path):
    bad = tmp_path / "manifest.json"
    bad.write_text("{not json")
    with pytest.raises(ReconScoreError) as err:
        load_dataset(bad)
    assert err.value.code == "unreadable-manifest"


def test_undecodable_image(tmp_path):
    (tmp_path / "a.png").write_bytes(b"not an image at all")
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({"name": "x", "entries": [
        {"image_id": "a", "image": "a.png", "references": ["x"]}]}))
    with pytest.raises(ReconScoreError) as err:
        load_dataset(manifest)
    assert err.value.code == "missing-image"


def test_load_image_populates_store(store):
    manifest = load_dataset(TOY_MANIFEST)
    record = load_image(manifest.entries[0], store)
    assert store.has(record.checksum)
    assert record.width > 0 and record.height > 0


def test_load_preferences(tmp_path):
    path = tmp_path / "prefs.jsonl"
    path.write_text(json.dumps({
        "image_id": "a",
        "candidates": [{"model": "m1", "text": "one"},
                       {"model": "m2", "text": "two"}],
        "ranking": [2, 1], "annotator_id": "ann"}) + "\n")
    records = load_preferences(path)
    assert len(records) == 1
    inst = records[0].to_instance()
    assert inst.candidates == ("one", "two")
    assert inst.ranking == (2, 1)


def test_load_variants_and_captions(tmp_path):
    vpath = tmp_path / "variants.jsonl"
    vpath.write_text(json.dumps({
        "image_id": "a", "references": ["ref text"],
        "variants": {"S": "s", "M": "m", "L": "l"}}) + "\n")
    records = load_variants(vpath)
    assert records[0].variants["M"] == "m"

    cpath = tmp_path / "caps.jsonl"
    cpath.write_text(json.dumps({"image_id": "a", "caption": "hello"}) + "\n")
    assert load_caption_file(cpath) == {"a": "hello"}
