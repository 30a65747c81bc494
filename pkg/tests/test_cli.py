import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from reconscore.cli import main

from conftest import TOY_MANIFEST, make_png


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _toy_args():
    return ["--manifest", str(TOY_MANIFEST)]


def test_score_mock_outputs_bounded_json(runner, workdir):
    image = workdir / "img.png"
    image.write_bytes(make_png(0))
    result = runner.invoke(main, ["score", "--image", str(image),
                                  "--caption", "A harbor.", "--backends", "mock"])
    assert result.exit_code == 0, result.output
    obj = json.loads(result.output)
    assert 0.0 <= obj["score"] <= 1.0
    assert obj["score"] == (obj["cosine"] + 1.0) / 2.0
    assert obj["params"]["seed"] == 0 and obj["params"]["steps"] == 28


def test_eval_identity_fixture_rows(runner, workdir):
    corpus = workdir / "toy.jsonl"
    text = "a river crosses green farmland near the road"
    lines = [json.dumps({"id": f"c{i}", "candidate": text + f" {i}",
                         "references": [text + f" {i}"]}) for i in range(2)]
    corpus.write_text("\n".join(lines) + "\n")
    result = runner.invoke(main, ["eval", "--corpus", str(corpus),
                                  "--metrics", "bleu,rouge,cider-d"])
    assert result.exit_code == 0, result.output
    obj = json.loads(result.output)
    assert obj["bleu-4"] == pytest.approx(100.0)
    assert obj["rouge-l"] == pytest.approx(100.0)
    assert obj["cider-d"] == pytest.approx(100.0)


def test_eval_error_is_machine_readable(runner, workdir):
    corpus = workdir / "toy.jsonl"
    corpus.write_text(json.dumps({"id": "a", "candidate": "x",
                                  "references": ["x"]}) + "\n")
    result = runner.invoke(main, ["eval", "--corpus", str(corpus),
                                  "--metrics", "nonsense"])
    assert result.exit_code == 1
    err = json.loads(result.stderr)
    assert err["error"]["code"] == "unknown-metric"


def test_unknown_subcommand_exits_2(runner):
    result = runner.invoke(main, ["frobnicate"])
    assert result.exit_code == 2
    assert "Usage" in result.stderr or "Usage" in result.output


def test_describe_defaults_and_invariants(runner, workdir):
    image = workdir / "img.png"
    image.write_bytes(make_png(5))
    result = runner.invoke(main, ["describe", "--image", str(image), "--n", "4"])
    assert result.exit_code == 0, result.output
    obj = json.loads(result.output)
    assert obj["temperature"] == 0.8
    assert len(obj["candidates"]) == 4
    best = obj["scores"][obj["best_index"] - 1]
    assert best == max(obj["scores"])
    assert obj["caption"] == obj["candidates"][obj["best_index"] - 1]


def test_candidate_ablation_determinism_and_replay(runner, workdir):
    base = ["experiment", "candidate-ablation", "--manifests",
            str(TOY_MANIFEST), "--n", "1,2,4"]
    r1 = runner.invoke(main, base + ["--out", "run1", "--blobs", "blobs"])
    assert r1.exit_code == 0, r1.output
    r2 = runner.invoke(main, base + ["--out", "run2", "--blobs", "blobs"])
    assert r2.exit_code == 0, r2.output

    def tree(root):
        return {p.relative_to(root): p.read_bytes()
                for p in sorted(Path(root).rglob("*")) if p.is_file()}

    assert tree("run1") == tree("run2")  # byte-identical run directories

    totals = [row["total"]
              for row in json.loads(r1.output)["aggregates"]]
    assert totals == sorted(totals)

    r3 = runner.invoke(main, base + ["--out", "run3", "--replay", "run1",
                                     "--blobs", "fresh-blobs"])
    assert r3.exit_code == 0, r3.output
    assert tree("run1/reports") == tree("run3/reports")


def test_run_directory_contents(runner, workdir):
    result = runner.invoke(main, [
        "experiment", "candidate-ablation", "--manifests", str(TOY_MANIFEST),
        "--n", "1,2", "--out", "run", "--blobs", "blobs"])
    assert result.exit_code == 0, result.output
    run = Path("run")
    config = json.loads((run / "config.json").read_text())
    assert config["params"] == {"seed": 0, "steps": 28,
                                "max_prompt_tokens": 512, "max_dim_px": 1024}
    assert {d["role"] for d in config["descriptors"]} >= {
        "caption", "t2i", "image-embed", "crossmodal-embed"}
    assert (run / "ledger.jsonl").exists()
    assert (run / "reports" / "candidate-ablation.json").exists()
    assert (run / "reports" / "candidate-ablation.md").exists()
    ledger_line = json.loads((run / "ledger.jsonl").read_text().splitlines()[0])
    assert "duration_ms" not in ledger_line


def test_experiment_error_exit(runner, workdir):
    result = runner.invoke(main, [
        "experiment", "candidate-ablation", "--manifests", "missing.json",
        "--n", "1", "--out", "run"])
    assert result.exit_code == 1
    assert json.loads(result.stderr)["error"]["code"] == "unreadable-manifest"


def test_prepare_commands_emit_variant_files(runner, workdir):
    for kind, tags in (("perturbation", {"paraphrased", "perturbed"}),
                       ("length", {"S", "M", "L"})):
        result = runner.invoke(main, [
            "prepare", kind, "--manifest", str(TOY_MANIFEST),
            "--out", f"{kind}.jsonl", "--blobs", "blobs"])
        assert result.exit_code == 0, result.output
        lines = Path(f"{kind}.jsonl").read_text().strip().splitlines()
        assert len(lines) == 3
        assert set(json.loads(lines[0])["variants"]) == tags


def test_preference_experiment_via_cli(runner, workdir):
    manifest = json.loads(TOY_MANIFEST.read_text())
    prefs = workdir / "prefs.jsonl"
    with open(prefs, "w") as fh:
        for entry in manifest["entries"]:
            fh.write(json.dumps({
                "image_id": entry["image_id"],
                "candidates": [{"model": "m1", "text": entry["references"][0]},
                               {"model": "m2", "text": entry["references"][1]},
                               {"model": "m3", "text": "unrelated text here"}],
                "ranking": [1, 2, 3]}) + "\n")
    result = runner.invoke(main, [
        "experiment", "preference-correlation", "--prefs", str(prefs),
        "--manifest", str(TOY_MANIFEST), "--out", "run", "--blobs", "blobs"])
    assert result.exit_code == 0, result.output
    aggregates = json.loads(result.output)["aggregates"]
    metrics = [row["metric"] for row in aggregates]
    assert metrics.index("cider-d") < metrics.index("clipscore")
