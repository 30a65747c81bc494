"""Deterministic mock backends for hermetic testing.

Every mock is a pure function of its declared key (hash-seeded, never the
process RNG), so two processes produce byte-identical outputs.
"""

from __future__ import annotations

import hashlib
import io

import numpy as np
from PIL import Image

from .base import CaptionBackend, CrossModalEmbedder, ImageEmbedder, T2IBackend
from .blobstore import BlobStore
from .types import BackendDescriptor, GenerationParams

_SCENES = ("harbor", "airport", "residential area", "farmland", "forest",
           "industrial park", "parking lot", "river delta", "stadium", "desert")
_OBJECTS = ("boats", "airplanes", "buildings", "fields", "trees", "warehouses",
            "cars", "channels", "stands", "dunes")
_COLORS = ("white", "gray", "green", "brown", "blue", "red")
_COUNTS = ("two", "three", "four", "several", "many", "a few")


def _rng(*parts) -> np.random.Generator:
    key = "|".join(str(p) for p in parts)
    seed = int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "big")
    return np.random.default_rng(seed)


def _mock_caption_text(rng: np.random.Generator) -> str:
    scene = rng.choice(_SCENES)
    parts = [f"An aerial view of a {scene}."]
    for _ in range(int(rng.integers(1, 4))):
        parts.append(
            f"There are {rng.choice(_COUNTS)} {rng.choice(_COLORS)} "
            f"{rng.choice(_OBJECTS)} in the scene.")
    return " ".join(parts)


class MockCaptionBackend(CaptionBackend):
    """Caption is a pure function of (image id, nonce); at temperature 0
    all nonces collapse to the greedy output."""

    def __init__(self, descriptor: BackendDescriptor | None = None, ledger=None):
        descriptor = descriptor or BackendDescriptor(
            role="caption", model_id="mock-captioner", version_tag="1")
        super().__init__(descriptor, ledger)

    def _raw_caption(self, image, system_prompt, temperature, nonce) -> dict:
        effective_nonce = nonce if temperature > 0 else 0
        rng = _rng("caption", image.image_id, effective_nonce)
        return {"text": _mock_caption_text(rng)}

    def _raw_text(self, prompt, temperature, nonce) -> dict:
        effective_nonce = nonce if temperature > 0 else 0
        rng = _rng("text", prompt, effective_nonce)
        # deterministic "rewrite": shuffle the prompt's payload words
        words = prompt.split()
        rng.shuffle(words)
        return {"text": " ".join(words[:64]) or "rewritten text"}


class MockT2IBackend(T2IBackend):
    """Seeded pseudorandom pixel field keyed by (prompt, params, aspect)."""

    def __init__(self, store: BlobStore,
                 descriptor: BackendDescriptor | None = None, ledger=None):
        descriptor = descriptor or BackendDescriptor(
            role="t2i", model_id="mock-t2i", version_tag="1")
        super().__init__(descriptor, ledger)
        self.store = store

    def _raw_generate(self, prompt, params: GenerationParams, aspect) -> dict:
        w, h = aspect
        longest = max(w, h)
        if longest > params.max_dim_px:
            scale = params.max_dim_px / longest
            w = max(1, round(w * scale))
            h = max(1, round(h * scale))
        rng = _rng("t2i", prompt, params.seed, params.steps, w, h)
        pixels = rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)
        buf = io.BytesIO()
        Image.fromarray(pixels, mode="RGB").save(buf, format="PNG")
        data = buf.getvalue()
        checksum = self.store.put(data)
        return {"checksum": checksum, "width": w, "height": h}


class MockImageEmbedder(ImageEmbedder):
    """Unit vector seeded by the image checksum and the backend identity."""

    def __init__(self, descriptor: BackendDescriptor | None = None,
                 dim: int = 64, ledger=None):
        descriptor = descriptor or BackendDescriptor(
            role="image-embed", model_id="mock-embedder", version_tag="1")
        super().__init__(descriptor, ledger)
        self.dim = dim

    def _base_vector(self, checksum: str) -> np.ndarray:
        # keyed on a shared tag, not the backend id, so rotated/negated
        # variants transform the same underlying vectors
        rng = _rng("embed", "mock-base", checksum, self.dim)
        v = rng.normal(size=self.dim)
        return v / np.linalg.norm(v)

    def _transform(self, v: np.ndarray) -> np.ndarray:
        return v

    def _raw_embed(self, image) -> dict:
        v = self._transform(self._base_vector(image.checksum))
        v = v / np.linalg.norm(v)
        return {"values": [float(x) for x in v]}


class RotatedMockImageEmbedder(MockImageEmbedder):
    """A fixed rotation of the base mock embedder's feature space; all
    pairwise cosines are preserved exactly."""

    def __init__(self, rotation_seed: int = 7, descriptor=None, dim: int = 64,
                 ledger=None):
        descriptor = descriptor or BackendDescriptor(
            role="image-embed", model_id=f"mock-embedder-rot{rotation_seed}",
            version_tag="1")
        super().__init__(descriptor, dim=dim, ledger=ledger)
        rng = np.random.default_rng(rotation_seed)
        q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
        self._q = q

    def _transform(self, v: np.ndarray) -> np.ndarray:
        return self._q @ v


class NegatedMockImageEmbedder(MockImageEmbedder):
    """Negation of the base mock embedder. Note cos(-x, -y) = cos(x, y):
    within-embedder similarities are unchanged; only comparisons that mix
    this embedder's vectors with the base embedder's flip sign."""

    def __init__(self, descriptor=None, dim: int = 64, ledger=None):
        descriptor = descriptor or BackendDescriptor(
            role="image-embed", model_id="mock-embedder-neg", version_tag="1")
        super().__init__(descriptor, dim=dim, ledger=ledger)

    def _transform(self, v: np.ndarray) -> np.ndarray:
        return -v


class SignSplitMockImageEmbedder(MockImageEmbedder):
    """Negates the base vector for roughly half the images (keyed by the
    image checksum), so cross-image cosines genuinely change sign; used to
    exercise ranking-disagreement detection."""

    def __init__(self, descriptor=None, dim: int = 64, ledger=None):
        descriptor = descriptor or BackendDescriptor(
            role="image-embed", model_id="mock-embedder-split", version_tag="1")
        super().__init__(descriptor, dim=dim, ledger=ledger)

    def _raw_embed(self, image) -> dict:
        v = self._base_vector(image.checksum)
        if int(image.checksum[0], 16) % 2:
            v = -v
        return {"values": [float(x) for x in v]}


class MockCrossModalEmbedder(CrossModalEmbedder):
    def __init__(self, descriptor: BackendDescriptor | None = None,
                 dim: int = 64, max_text_tokens: int = 77, ledger=None):
        descriptor = descriptor or BackendDescriptor(
            role="crossmodal-embed", model_id="mock-clip", version_tag="1")
        super().__init__(descriptor, ledger, max_text_tokens=max_text_tokens)
        self.dim = dim

    def _vector(self, *key_parts) -> dict:
        rng = _rng("crossmodal", *key_parts, self.dim)
        v = rng.normal(size=self.dim)
        v = v / np.linalg.norm(v)
        return {"values": [float(x) for x in v]}

    def _raw_embed_image(self, image) -> dict:
        return self._vector("image", image.checksum)

    def _raw_embed_text(self, text) -> dict:
        return self._vector("text", text)
