import io
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings
from PIL import Image

from reconscore.backends import BlobStore, CallLedger, mock_backends
from reconscore.backends.types import image_record_from_bytes
from reconscore.scoring.cache import ScoreCache
from reconscore.scoring.recon import EvalContext

settings.register_profile("ci", deadline=None, max_examples=60)
settings.load_profile("ci")

REPO_ROOT = Path(__file__).resolve().parent.parent
TOY_MANIFEST = REPO_ROOT / "data" / "toy" / "manifest.json"


def make_png(seed: int, width: int = 24, height: int = 16) -> bytes:
    arr = np.random.default_rng(seed).integers(0, 255, (height, width, 3),
                                               dtype=np.uint8)
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


def make_image(seed: int, store: BlobStore | None = None, **kw):
    data = make_png(seed, **kw)
    if store is not None:
        store.put(data)
    return image_record_from_bytes(f"image-{seed}", data)


@pytest.fixture
def store(tmp_path):
    return BlobStore(tmp_path / "blobs")


@pytest.fixture
def ledger():
    return CallLedger()


@pytest.fixture
def backends(store, ledger):
    return mock_backends(store, ledger)


@pytest.fixture
def ctx(backends, tmp_path):
    return EvalContext(t2i=backends.t2i, embedder=backends.image_embedder,
                       cache=ScoreCache(tmp_path / "cache"))
