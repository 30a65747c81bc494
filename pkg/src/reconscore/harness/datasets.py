"""Dataset manifests and experiment input files.

Datasets are never bundled; manifests point at user-local image copies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from PIL import Image, UnidentifiedImageError

from ..backends.blobstore import BlobStore
from ..backends.types import ImageRecord, image_record_from_bytes
from ..errors import DatasetError
from ..rankstats import PreferenceInstance


@dataclass(frozen=True)
class ManifestEntry:
    image_id: str
    image_path: Path
    references: tuple[str, ...]
    tags: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    root: Path
    entries: tuple[ManifestEntry, ...]

    def by_id(self) -> dict[str, ManifestEntry]:
        return {e.image_id: e for e in self.entries}


def load_dataset(manifest_path: str | Path) -> DatasetManifest:
    """Read and validate a manifest JSON file.

    Schema: {"name": str, "root": str (optional, relative to the manifest),
    "entries": [{"image_id", "image", "references": [...], "tags": {...}}]}.
    Every image must exist and decode; ids must be unique.
    """
    manifest_path = Path(manifest_path)
    try:
        obj = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DatasetError(f"unreadable manifest {manifest_path}: {exc}",
                           code="unreadable-manifest") from exc

    root = manifest_path.parent / obj.get("root", ".")
    entries = []
    seen = set()
    missing = []
    for raw in obj.get("entries", []):
        image_id = str(raw["image_id"])
        if image_id in seen:
            raise DatasetError(f"duplicate image id {image_id!r}",
                               code="duplicate-id")
        seen.add(image_id)
        path = root / raw["image"]
        if not path.exists():
            missing.append(str(path))
            continue
        try:
            with Image.open(path) as img:
                img.verify()
        except (UnidentifiedImageError, OSError) as exc:
            raise DatasetError(f"image {path} does not decode: {exc}",
                               code="missing-image") from exc
        entries.append(ManifestEntry(
            image_id=image_id, image_path=path,
            references=tuple(raw.get("references", [])),
            tags=dict(raw.get("tags", {}))))
    if missing:
        raise DatasetError(f"missing images: {missing}", code="missing-image")
    return DatasetManifest(name=str(obj.get("name", manifest_path.stem)),
                           root=root, entries=tuple(entries))


def load_image(entry: ManifestEntry, store: BlobStore) -> ImageRecord:
    data = entry.image_path.read_bytes()
    store.put(data)
    return image_record_from_bytes(entry.image_id, data)


@dataclass(frozen=True)
class PreferenceRecord:
    """One preference-dataset line: K candidates with model provenance and
    a human ranking (ranking[i] = rank of candidates[i], 1 = best)."""

    image_id: str
    candidates: tuple[dict, ...]  # {"model": str, "text": str}
    ranking: tuple[int, ...]
    annotator_id: str = ""
    adjudicated: bool = False

    def to_instance(self) -> PreferenceInstance:
        return PreferenceInstance(
            instance_id=self.image_id,
            candidates=tuple(c["text"] for c in self.candidates),
            ranking=self.ranking)


def load_preferences(path: str | Path) -> list[PreferenceRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            records.append(PreferenceRecord(
                image_id=str(obj["image_id"]),
                candidates=tuple(obj["candidates"]),
                ranking=tuple(int(r) for r in obj["ranking"]),
                annotator_id=str(obj.get("annotator_id", "")),
                adjudicated=bool(obj.get("adjudicated", False))))
    return records


@dataclass(frozen=True)
class VariantRecord:
    """Prepared caption variants for one image; used by the perturbation
    and length-robustness studies. ``variants`` maps a tag (e.g. paraphrased,
    perturbed, S, M, L) to a caption text."""

    image_id: str
    references: tuple[str, ...]
    variants: dict


def load_variants(path: str | Path) -> list[VariantRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            records.append(VariantRecord(
                image_id=str(obj["image_id"]),
                references=tuple(obj.get("references", [])),
                variants=dict(obj["variants"])))
    return records


def load_caption_file(path: str | Path) -> dict[str, str]:
    """JSON Lines of {"image_id", "caption"} -> mapping."""
    captions = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            captions[str(obj["image_id"])] = obj["caption"]
    return captions
