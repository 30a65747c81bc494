"""Backend configuration: JSON file of descriptors, or the built-in mocks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .blobstore import BlobStore
from .http import (HttpCaptionBackend, HttpCrossModalEmbedder,
                   HttpImageEmbedder, HttpT2IBackend)
from .ledger import CallLedger
from .mock import (MockCaptionBackend, MockCrossModalEmbedder,
                   MockImageEmbedder, MockT2IBackend,
                   RotatedMockImageEmbedder)
from .types import BackendDescriptor


@dataclass
class BackendSet:
    """One configured backend per role; extra image embedders feed the
    encoder ablation."""

    caption: object
    t2i: object
    image_embedder: object
    crossmodal: object
    image_embedders: list = field(default_factory=list)

    def __post_init__(self):
        if not self.image_embedders:
            self.image_embedders = [self.image_embedder]


def mock_backends(store: BlobStore, ledger: CallLedger | None = None) -> BackendSet:
    embedders = [MockImageEmbedder(ledger=ledger),
                 RotatedMockImageEmbedder(ledger=ledger)]
    return BackendSet(
        caption=MockCaptionBackend(ledger=ledger),
        t2i=MockT2IBackend(store, ledger=ledger),
        image_embedder=embedders[0],
        crossmodal=MockCrossModalEmbedder(ledger=ledger),
        image_embedders=embedders,
    )


def load_backends(config: str | Path, store: BlobStore,
                  ledger: CallLedger | None = None) -> BackendSet:
    """``config`` is either the literal string "mock" or a JSON file path.

    File schema: {"backends": [{role, model_id, version_tag, endpoint,
    credential_env?, max_text_tokens?}, ...]}. Credentials come only from
    the named environment variables, never from the file itself.
    """
    if str(config) == "mock":
        return mock_backends(store, ledger)

    obj = json.loads(Path(config).read_text(encoding="utf-8"))
    by_role: dict[str, list] = {}
    for entry in obj["backends"]:
        descriptor = BackendDescriptor(
            role=entry["role"], model_id=entry["model_id"],
            version_tag=str(entry.get("version_tag", "0")),
            endpoint=entry.get("endpoint", ""))
        cred = entry.get("credential_env")
        if descriptor.role == "caption":
            backend = HttpCaptionBackend(descriptor, store, cred, ledger)
        elif descriptor.role == "t2i":
            backend = HttpT2IBackend(descriptor, store, cred, ledger)
        elif descriptor.role == "image-embed":
            backend = HttpImageEmbedder(descriptor, store, cred, ledger)
        elif descriptor.role == "crossmodal-embed":
            backend = HttpCrossModalEmbedder(
                descriptor, store, cred,
                max_text_tokens=int(entry.get("max_text_tokens", 77)),
                ledger=ledger)
        else:
            raise ValueError(f"unknown backend role {entry['role']!r}")
        by_role.setdefault(descriptor.role, []).append(backend)

    missing = [r for r in ("caption", "t2i", "image-embed", "crossmodal-embed")
               if r not in by_role]
    if missing:
        raise ValueError(f"backend config missing roles: {missing}")
    return BackendSet(
        caption=by_role["caption"][0],
        t2i=by_role["t2i"][0],
        image_embedder=by_role["image-embed"][0],
        crossmodal=by_role["crossmodal-embed"][0],
        image_embedders=by_role["image-embed"],
    )
