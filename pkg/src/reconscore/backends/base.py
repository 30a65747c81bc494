"""Role interfaces shared by wire clients, mocks, and replay backends.

Every call goes through ``_invoke``: a canonical key is built from the
inputs, the raw backend is called with bounded retry, the (key, result)
pair is recorded in the call ledger, and drift (same key, different result)
is resolved in favor of the first observation.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
import time
from abc import ABC, abstractmethod

from ..errors import (DimMismatchError, EmptyGenerationError, EmptyInputError,
                      TokenLimitError, TransportError)
from .ledger import CallLedger, LedgerEntry
from .types import (BackendDescriptor, CaptionCandidate, EmbeddingVector,
                    GenerationParams, ImageRecord, count_tokens)

log = logging.getLogger(__name__)

MAX_ATTEMPTS = 3
BACKOFF_BASE_S = 0.05


def canonical_key(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class BackendBase(ABC):
    def __init__(self, descriptor: BackendDescriptor,
                 ledger: CallLedger | None = None):
        self.descriptor = descriptor
        self.ledger = ledger
        self._observed: dict[str, dict] = {}
        self._lock = threading.Lock()

    def _invoke(self, key_obj: dict, raw_call) -> dict:
        key_obj = dict(key_obj, backend=self.descriptor.ident)
        key = canonical_key(key_obj)
        t0 = time.monotonic()
        result = self._with_retry(raw_call)
        duration_ms = (time.monotonic() - t0) * 1000.0
        with self._lock:
            first = self._observed.get(key)
            if first is None:
                self._observed[key] = result
            elif first != result:
                log.warning("backend drift on key %s: keeping first observation", key)
                result = first
        if self.ledger is not None:
            self.ledger.record(LedgerEntry(
                role=self.descriptor.role, key=key, result=result,
                duration_ms=duration_ms))
        return result

    @staticmethod
    def _with_retry(raw_call) -> dict:
        delay = BACKOFF_BASE_S
        for attempt in range(1, MAX_ATTEMPTS + 1):
            try:
                return raw_call()
            except TransportError:
                if attempt == MAX_ATTEMPTS:
                    raise
                time.sleep(delay)
                delay *= 2


class CaptionBackend(BackendBase):
    """Multimodal captioner: image + system prompt -> text."""

    def generate_caption(self, image: ImageRecord, system_prompt: str,
                         temperature: float, nonce: int) -> CaptionCandidate:
        if temperature < 0:
            raise ValueError("temperature must be >= 0")
        key_obj = {
            "op": "caption",
            "image": image.checksum,
            "prompt": digest(system_prompt),
            "temperature": temperature,
            "nonce": nonce,
        }
        result = self._invoke(key_obj, lambda: self._raw_caption(
            image, system_prompt, temperature, nonce))
        text = result.get("text", "")
        if not text.strip():
            raise EmptyGenerationError(
                f"backend returned empty caption for image {image.image_id!r}")
        return CaptionCandidate(text=text, temperature=temperature, nonce=nonce,
                                backend=self.descriptor.ident,
                                image_id=image.image_id)

    def complete_text(self, prompt: str, temperature: float = 0.0,
                      nonce: int = 0) -> str:
        """Pure-text completion, used by offline dataset preparation."""
        key_obj = {
            "op": "text",
            "prompt": digest(prompt),
            "temperature": temperature,
            "nonce": nonce,
        }
        result = self._invoke(key_obj, lambda: self._raw_text(
            prompt, temperature, nonce))
        text = result.get("text", "")
        if not text.strip():
            raise EmptyGenerationError("backend returned empty text")
        return text

    @abstractmethod
    def _raw_caption(self, image, system_prompt, temperature, nonce) -> dict: ...

    @abstractmethod
    def _raw_text(self, prompt, temperature, nonce) -> dict: ...


class T2IBackend(BackendBase):
    """Text-to-image generator treated as a fixed rendering engine."""

    def generate_image(self, prompt: str, params: GenerationParams,
                       aspect: tuple[int, int] = (1, 1)) -> ImageRecord:
        key_obj = {
            "op": "t2i",
            "prompt": prompt,
            "params": params.as_dict(),
            "aspect": list(aspect),
        }
        result = self._invoke(key_obj, lambda: self._raw_generate(
            prompt, params, aspect))
        return ImageRecord(
            image_id=result["checksum"][:16],
            checksum=result["checksum"],
            width=result["width"], height=result["height"])

    @abstractmethod
    def _raw_generate(self, prompt, params, aspect) -> dict: ...


class ImageEmbedder(BackendBase):
    """Perceptual image feature extractor; outputs unit vectors."""

    def __init__(self, descriptor, ledger=None):
        super().__init__(descriptor, ledger)
        self._dim: int | None = None

    def embed_image(self, image: ImageRecord) -> EmbeddingVector:
        key_obj = {"op": "embed-image", "image": image.checksum}
        result = self._invoke(key_obj, lambda: self._raw_embed(image))
        vec = EmbeddingVector(tuple(result["values"]), self.descriptor)
        with self._lock:
            if self._dim is None:
                self._dim = vec.dim
            elif vec.dim != self._dim:
                raise DimMismatchError(
                    f"{self.descriptor.ident} returned dim {vec.dim}, expected {self._dim}")
        return vec

    @abstractmethod
    def _raw_embed(self, image) -> dict: ...


class CrossModalEmbedder(BackendBase):
    """Joint image/text embedding space (CLIP-style), with a hard text
    token limit recorded per backend."""

    def __init__(self, descriptor, ledger=None, max_text_tokens: int = 77,
                 token_counter=count_tokens):
        super().__init__(descriptor, ledger)
        self.max_text_tokens = max_text_tokens
        self.token_counter = token_counter

    def embed_image(self, image: ImageRecord) -> EmbeddingVector:
        key_obj = {"op": "embed-image", "image": image.checksum}
        result = self._invoke(key_obj, lambda: self._raw_embed_image(image))
        return EmbeddingVector(tuple(result["values"]), self.descriptor)

    def embed_text(self, text: str) -> EmbeddingVector:
        if not text.strip():
            raise EmptyInputError("empty text")
        n = self.token_counter(text)
        if n > self.max_text_tokens:
            raise TokenLimitError(
                f"text of {n} tokens exceeds backend limit of {self.max_text_tokens}",
                limit=self.max_text_tokens)
        key_obj = {"op": "embed-text", "text": digest(text)}
        result = self._invoke(key_obj, lambda: self._raw_embed_text(text))
        return EmbeddingVector(tuple(result["values"]), self.descriptor)

    @abstractmethod
    def _raw_embed_image(self, image) -> dict: ...

    @abstractmethod
    def _raw_embed_text(self, text) -> dict: ...
