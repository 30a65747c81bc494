"""Single command-line entry point.

Subcommands: score, describe, eval, experiment <name>, prepare, annotate.
Precedence: flags > backend config file > built-in defaults (seed 0,
steps 28, 512 prompt tokens, 1024 px, N=10, temperature 0.8).
Results go to stdout; machine-readable errors go to stderr as JSON.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .backends.blobstore import BlobStore
from .backends.config import BackendSet, load_backends
from .backends.ledger import CallLedger
from .backends.replay import replay_backend
from .backends.types import BackendDescriptor, GenerationParams, image_record_from_bytes
from .describer import DescriberConfig, describe
from .errors import ReconScoreError
from .harness import (DEFAULT_METRICS, HarnessContext, emit_report,
                      load_caption_file, load_dataset, load_preferences,
                      load_variants, prepare_length_file,
                      prepare_perturbation_file, run_candidate_ablation,
                      run_encoder_ablation, run_length_robustness,
                      run_perturbation_study, run_preference_correlation)
from .scoring.cache import ScoreCache
from .scoring.recon import EvalContext, recon_score
from .textmetrics import bleu, cider_d, load_corpus, meteor_corpus, rouge_l_corpus


def _fail(exc: ReconScoreError) -> None:
    click.echo(json.dumps({"error": {"code": exc.code, "message": str(exc)}}),
               err=True)
    sys.exit(1)


def _params(seed, steps, max_prompt_tokens, max_dim) -> GenerationParams:
    return GenerationParams(seed=seed, steps=steps,
                            max_prompt_tokens=max_prompt_tokens,
                            max_dim_px=max_dim)


def _descriptor_snapshot(backends: BackendSet) -> list[dict]:
    out = []
    seen = set()
    for b in [backends.caption, backends.t2i, backends.crossmodal,
              *backends.image_embedders]:
        d = b.descriptor
        if d.ident in seen:
            continue
        seen.add(d.ident)
        entry = {"role": d.role, "model_id": d.model_id,
                 "version_tag": d.version_tag, "endpoint": d.endpoint}
        if d.role == "crossmodal-embed":
            entry["max_text_tokens"] = b.max_text_tokens
        out.append(entry)
    return out


def _replay_backends(run_dir: Path, ledger: CallLedger) -> BackendSet:
    config = json.loads((run_dir / "config.json").read_text(encoding="utf-8"))
    recorded = CallLedger.read(run_dir / "ledger.jsonl")
    by_role: dict[str, list] = {}
    for entry in config["descriptors"]:
        descriptor = BackendDescriptor(
            role=entry["role"], model_id=entry["model_id"],
            version_tag=entry["version_tag"], endpoint=entry.get("endpoint", ""))
        backend = replay_backend(descriptor, recorded, record_to=ledger)
        if descriptor.role == "crossmodal-embed":
            backend.max_text_tokens = int(entry.get("max_text_tokens", 77))
        by_role.setdefault(descriptor.role, []).append(backend)
    return BackendSet(
        caption=by_role["caption"][0],
        t2i=by_role["t2i"][0],
        image_embedder=by_role["image-embed"][0],
        crossmodal=by_role["crossmodal-embed"][0],
        image_embedders=by_role["image-embed"])


class _Run:
    """One run directory: config snapshot, deterministic ledger, reports,
    and a run-local score cache (blobs are shared and content-addressed)."""

    def __init__(self, out: str, backends_arg: str, params: GenerationParams,
                 parallelism: int, blobs: str | None, replay: str | None,
                 extra_config: dict):
        self.out = Path(out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.ledger = CallLedger()
        blobs_dir = Path(blobs) if blobs else self.out.parent / "blobs"
        self.store = BlobStore(blobs_dir)
        if replay:
            self.backends = _replay_backends(Path(replay), self.ledger)
        else:
            self.backends = load_backends(backends_arg, self.store, self.ledger)
        self.hctx = HarnessContext(
            backends=self.backends, store=self.store, params=params,
            cache=ScoreCache(self.out / "cache"), parallelism=parallelism)
        self.config = {
            "backends": backends_arg,
            "replay_of": replay,
            "descriptors": _descriptor_snapshot(self.backends),
            "params": params.as_dict(),
            "parallelism": parallelism,
            **extra_config,
        }

    def finish(self, report=None, timings: str | None = None):
        (self.out / "config.json").write_text(
            json.dumps(self.config, sort_keys=True, indent=2) + "\n",
            encoding="utf-8")
        self.ledger.write(self.out / "ledger.jsonl")
        if timings:
            self.ledger.write_timings(timings)
        if report is not None:
            emit_report(report, self.out / "reports")


def _common_options(fn):
    fn = click.option("--backends", "backends_arg", default="mock",
                      show_default=True,
                      help="Backend config JSON path, or 'mock'.")(fn)
    fn = click.option("--seed", default=0, show_default=True, type=int)(fn)
    fn = click.option("--steps", default=28, show_default=True, type=int)(fn)
    fn = click.option("--max-prompt-tokens", default=512, show_default=True,
                      type=int)(fn)
    fn = click.option("--max-dim", default=1024, show_default=True, type=int)(fn)
    fn = click.option("--parallelism", default=1, show_default=True, type=int)(fn)
    fn = click.option("--blobs", default=None, help="Blob store directory.")(fn)
    return fn


@click.group()
def main():
    """Reference-free caption evaluation and training-free captioning."""


@main.command()
@click.option("--image", "image_path", required=True, type=click.Path(exists=True))
@click.option("--caption", required=True)
@click.option("--out", default=None, help="Optional run directory.")
@click.option("--dump-reconstruction", is_flag=True,
              help="Print the reconstructed image blob path.")
@_common_options
def score(image_path, caption, out, dump_reconstruction, backends_arg, seed,
          steps, max_prompt_tokens, max_dim, parallelism, blobs):
    """ReconScore for one (image, caption) pair."""
    try:
        params = _params(seed, steps, max_prompt_tokens, max_dim)
        store = BlobStore(blobs or (Path(out) / "blobs" if out else "blobs"))
        ledger = CallLedger()
        backends = load_backends(backends_arg, store, ledger)
        data = Path(image_path).read_bytes()
        store.put(data)
        image = image_record_from_bytes(Path(image_path).stem, data)
        cache = ScoreCache(Path(out) / "cache") if out else ScoreCache()
        ctx = EvalContext(t2i=backends.t2i, embedder=backends.image_embedder,
                          params=params, cache=cache, parallelism=parallelism)
        result = recon_score(image, caption, ctx)
        payload = result.to_json_obj()
        payload["image_id"] = image.image_id
        if dump_reconstruction:
            payload["reconstructed_path"] = str(store.path(result.reconstructed_image))
        click.echo(json.dumps(payload, sort_keys=True))
        if out:
            Path(out).mkdir(parents=True, exist_ok=True)
            ledger.write(Path(out) / "ledger.jsonl")
    except ReconScoreError as exc:
        _fail(exc)


@main.command("describe")
@click.option("--image", "image_path", type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", type=click.Path(exists=True))
@click.option("--n", default=10, show_default=True, type=int)
@click.option("--temperature", default=0.8, show_default=True, type=float)
@click.option("--out", default=None)
@_common_options
def describe_cmd(image_path, manifest_path, n, temperature, out, backends_arg,
                 seed, steps, max_prompt_tokens, max_dim, parallelism, blobs):
    """Best-of-N captioning with self-correction selection."""
    if not image_path and not manifest_path:
        raise click.UsageError("provide --image or --manifest")
    try:
        params = _params(seed, steps, max_prompt_tokens, max_dim)
        store = BlobStore(blobs or "blobs")
        ledger = CallLedger()
        backends = load_backends(backends_arg, store, ledger)
        cache = ScoreCache(Path(out) / "cache") if out else ScoreCache()
        ctx = EvalContext(t2i=backends.t2i, embedder=backends.image_embedder,
                          params=params, cache=cache, parallelism=parallelism)
        config = DescriberConfig(n=n, temperature=temperature)

        images = []
        if image_path:
            data = Path(image_path).read_bytes()
            store.put(data)
            images.append(image_record_from_bytes(Path(image_path).stem, data))
        else:
            from .harness import load_image
            manifest = load_dataset(manifest_path)
            images.extend(load_image(e, store) for e in manifest.entries)

        outputs = []
        for image in images:
            caption, selection, cset = describe(image, backends.caption, ctx, config)
            outputs.append({
                "image_id": image.image_id,
                "caption": caption,
                "best_index": selection.best_index,
                "tie_broken": selection.tie_broken,
                "scores": list(selection.scores),
                "candidates": [c.text for c in cset.candidates],
                "temperature": cset.temperature,
                "n": cset.n_requested,
            })
        click.echo(json.dumps(outputs if manifest_path else outputs[0],
                              sort_keys=True))
        if out:
            Path(out).mkdir(parents=True, exist_ok=True)
            ledger.write(Path(out) / "ledger.jsonl")
    except ReconScoreError as exc:
        _fail(exc)


@main.command("eval")
@click.option("--corpus", required=True, type=click.Path(exists=True),
              help="JSONL: {id, candidate, references}.")
@click.option("--metrics", default="bleu-1,bleu-2,bleu-3,bleu-4,meteor,rouge-l,cider-d",
              show_default=True)
@click.option("--bleu-level", default="corpus", show_default=True,
              type=click.Choice(["corpus", "sentence"]))
def eval_cmd(corpus, metrics, bleu_level):
    """Reference-based metrics over a corpus file."""
    try:
        instances = load_corpus(corpus)
        results = {}
        aliases = {"bleu": "bleu-4", "rouge": "rouge-l", "cider": "cider-d"}
        for metric in metrics.split(","):
            metric = aliases.get(metric.strip(), metric.strip())
            if metric.startswith("bleu-"):
                results[metric] = bleu(instances, int(metric.split("-")[1]),
                                       level=bleu_level).value
            elif metric == "meteor":
                results[metric] = meteor_corpus(instances).value
            elif metric == "rouge-l":
                results[metric] = rouge_l_corpus(instances).value
            elif metric == "cider-d":
                results[metric] = cider_d(instances).value
            elif metric == "spice":
                results[metric] = None  # out of scope, reported as absent
            else:
                raise ReconScoreError(f"unknown metric {metric!r}",
                                      code="unknown-metric")
        click.echo(json.dumps(results, sort_keys=True))
    except ReconScoreError as exc:
        _fail(exc)


@main.group()
def experiment():
    """The experiment runners (deterministic run directories)."""


def _experiment_options(fn):
    fn = click.option("--out", required=True, help="Run directory.")(fn)
    fn = click.option("--replay", default=None,
                      help="Prior run directory to replay from its ledger.")(fn)
    fn = click.option("--timings", default=None,
                      help="Optional path for call timings (kept outside the "
                           "deterministic run directory contract).")(fn)
    return _common_options(fn)


@experiment.command("preference-correlation")
@click.option("--prefs", required=True, type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--metrics", default=",".join(DEFAULT_METRICS), show_default=True)
@_experiment_options
def exp_pref(prefs, manifest_path, metrics, out, replay, timings, backends_arg,
             seed, steps, max_prompt_tokens, max_dim, parallelism, blobs):
    try:
        run = _Run(out, backends_arg, _params(seed, steps, max_prompt_tokens, max_dim),
                   parallelism, blobs, replay,
                   {"experiment": "preference-correlation",
                    "prefs": prefs, "manifest": manifest_path,
                    "metrics": metrics.split(",")})
        report = run_preference_correlation(
            load_preferences(prefs), load_dataset(manifest_path), run.hctx,
            metrics=tuple(metrics.split(",")))
        run.finish(report, timings)
        click.echo(json.dumps({"out": out, "aggregates": report.aggregates},
                              sort_keys=True))
    except ReconScoreError as exc:
        _fail(exc)


@experiment.command("perturbation")
@click.option("--variants", required=True, type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", default=None, type=click.Path(exists=True))
@click.option("--metrics", default=",".join(DEFAULT_METRICS), show_default=True)
@_experiment_options
def exp_perturb(variants, manifest_path, metrics, out, replay, timings,
                backends_arg, seed, steps, max_prompt_tokens, max_dim,
                parallelism, blobs):
    try:
        run = _Run(out, backends_arg, _params(seed, steps, max_prompt_tokens, max_dim),
                   parallelism, blobs, replay,
                   {"experiment": "perturbation", "variants": variants,
                    "manifest": manifest_path, "metrics": metrics.split(",")})
        manifest = load_dataset(manifest_path) if manifest_path else None
        report = run_perturbation_study(load_variants(variants), run.hctx,
                                        metrics=tuple(metrics.split(",")),
                                        manifest=manifest)
        run.finish(report, timings)
        click.echo(json.dumps({"out": out, "aggregates": report.aggregates},
                              sort_keys=True))
    except ReconScoreError as exc:
        _fail(exc)


@experiment.command("length-robustness")
@click.option("--variants", required=True, type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", default=None, type=click.Path(exists=True))
@click.option("--metrics", default=",".join(DEFAULT_METRICS), show_default=True)
@_experiment_options
def exp_length(variants, manifest_path, metrics, out, replay, timings,
               backends_arg, seed, steps, max_prompt_tokens, max_dim,
               parallelism, blobs):
    try:
        run = _Run(out, backends_arg, _params(seed, steps, max_prompt_tokens, max_dim),
                   parallelism, blobs, replay,
                   {"experiment": "length-robustness", "variants": variants,
                    "manifest": manifest_path, "metrics": metrics.split(",")})
        manifest = load_dataset(manifest_path) if manifest_path else None
        report = run_length_robustness(load_variants(variants), run.hctx,
                                       metrics=tuple(metrics.split(",")),
                                       manifest=manifest)
        run.finish(report, timings)
        click.echo(json.dumps({"out": out, "aggregates": report.aggregates},
                              sort_keys=True))
    except ReconScoreError as exc:
        _fail(exc)


@experiment.command("candidate-ablation")
@click.option("--manifests", required=True,
              help="Comma-separated manifest paths.")
@click.option("--n", "n_list", default="1,2,4,6,8,10", show_default=True)
@click.option("--temperature", default=0.8, show_default=True, type=float)
@_experiment_options
def exp_candidates(manifests, n_list, temperature, out, replay, timings,
                   backends_arg, seed, steps, max_prompt_tokens, max_dim,
                   parallelism, blobs):
    try:
        run = _Run(out, backends_arg, _params(seed, steps, max_prompt_tokens, max_dim),
                   parallelism, blobs, replay,
                   {"experiment": "candidate-ablation",
                    "manifests": manifests.split(","),
                    "n_list": [int(x) for x in n_list.split(",")],
                    "temperature": temperature})
        loaded = [load_dataset(p) for p in manifests.split(",")]
        report = run_candidate_ablation(
            loaded, [int(x) for x in n_list.split(",")], run.hctx,
            temperature=temperature)
        run.finish(report, timings)
        click.echo(json.dumps({"out": out, "aggregates": report.aggregates},
                              sort_keys=True))
    except ReconScoreError as exc:
        _fail(exc)


@experiment.command("encoder-ablation")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--captions", required=True,
              help="Comma-separated source=path pairs of caption JSONL files.")
@_experiment_options
def exp_encoders(manifest_path, captions, out, replay, timings, backends_arg,
                 seed, steps, max_prompt_tokens, max_dim, parallelism, blobs):
    try:
        run = _Run(out, backends_arg, _params(seed, steps, max_prompt_tokens, max_dim),
                   parallelism, blobs, replay,
                   {"experiment": "encoder-ablation", "manifest": manifest_path,
                    "captions": captions})
        sources = {}
        for pair in captions.split(","):
            name, path = pair.split("=", 1)
            sources[name] = load_caption_file(path)
        report = run_encoder_ablation(load_dataset(manifest_path), sources,
                                      run.hctx)
        run.finish(report, timings)
        click.echo(json.dumps({"out": out, "aggregates": report.aggregates},
                              sort_keys=True))
    except ReconScoreError as exc:
        _fail(exc)


@main.group()
def prepare():
    """Offline generation of experiment input files."""


@prepare.command("perturbation")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True)
@_common_options
def prep_perturb(manifest_path, out, backends_arg, seed, steps,
                 max_prompt_tokens, max_dim, parallelism, blobs):
    try:
        store = BlobStore(blobs or "blobs")
        backends = load_backends(backends_arg, store)
        n = prepare_perturbation_file(load_dataset(manifest_path),
                                      backends.caption, out)
        click.echo(json.dumps({"out": out, "records": n}))
    except ReconScoreError as exc:
        _fail(exc)


@prepare.command("length")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True)
@_common_options
def prep_length(manifest_path, out, backends_arg, seed, steps,
                max_prompt_tokens, max_dim, parallelism, blobs):
    try:
        store = BlobStore(blobs or "blobs")
        backends = load_backends(backends_arg, store)
        n = prepare_length_file(load_dataset(manifest_path),
                                backends.caption, out)
        click.echo(json.dumps({"out": out, "records": n}))
    except ReconScoreError as exc:
        _fail(exc)


@main.group()
def annotate():
    """Double-blind preference annotation."""


@annotate.command("serve")
@click.option("--tasks", required=True, type=click.Path(exists=True),
              help="JSONL: {image_id, image, candidates:[{model,text}]}.")
@click.option("--state", required=True, help="Session event-log directory.")
@click.option("--blobs", default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8800, show_default=True, type=int)
@click.option("--ui", "ui_dir", default=None,
              help="Static asset directory for the browser client.")
def annotate_serve(tasks, state, blobs, host, port, ui_dir):
    try:
        import uvicorn

        from .annotation import AnnotationStore, create_app, load_annotation_tasks
        store = BlobStore(blobs or (Path(state) / "blobs"))
        task_list = load_annotation_tasks(tasks, store)
        app = create_app(AnnotationStore(task_list, state), store, ui_dir)
        uvicorn.run(app, host=host, port=port)
    except ReconScoreError as exc:
        _fail(exc)


@annotate.command("export")
@click.option("--tasks", required=True, type=click.Path(exists=True))
@click.option("--state", required=True)
@click.option("--blobs", default=None)
@click.option("--out", required=True)
def annotate_export(tasks, state, blobs, out):
    try:
        from .annotation import AnnotationStore, load_annotation_tasks
        store = BlobStore(blobs or (Path(state) / "blobs"))
        annotation_store = AnnotationStore(load_annotation_tasks(tasks, store), state)
        records = annotation_store.export_preferences()
        Path(out).write_text(
            "\n".join(json.dumps(r, sort_keys=True, ensure_ascii=False)
                      for r in records) + "\n", encoding="utf-8")
        click.echo(json.dumps({"out": out, "records": len(records)}))
    except ReconScoreError as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
