"""JSON-over-HTTP wire clients for the four model roles.

Three minimal request shapes:
  caption:   chat-completion style  {model, messages, temperature, seed}
  t2i:       {prompt, seed, steps, width, height} -> {"image_b64": ...}
  embedders: {"image_b64": ...} or {"text": ...}  -> {"embedding": [...]}

Transport failures raise ``TransportError`` and are retried with bounded
exponential backoff by the base class.
"""

from __future__ import annotations

import base64
import os

import requests

from ..errors import TransportError
from .base import CaptionBackend, CrossModalEmbedder, ImageEmbedder, T2IBackend
from .blobstore import BlobStore
from .types import BackendDescriptor, GenerationParams, ImageRecord

TIMEOUT_S = 120.0


class _HttpTransport:
    """Thin POST wrapper; ``session`` is injectable for tests."""

    def __init__(self, descriptor: BackendDescriptor,
                 credential_env: str | None = None, session=None):
        self.endpoint = descriptor.endpoint
        self.session = session or requests.Session()
        self.headers = {"Content-Type": "application/json"}
        if credential_env:
            token = os.environ.get(credential_env, "")
            if token:
                self.headers["Authorization"] = f"Bearer {token}"

    def post(self, payload: dict) -> dict:
        try:
            resp = self.session.post(self.endpoint, json=payload,
                                     headers=self.headers, timeout=TIMEOUT_S)
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        if resp.status_code >= 500:
            raise TransportError(f"server error {resp.status_code}")
        if resp.status_code != 200:
            raise TransportError(f"unexpected status {resp.status_code}",
                                 code="http-status")
        return resp.json()


class HttpCaptionBackend(CaptionBackend):
    def __init__(self, descriptor: BackendDescriptor, store: BlobStore,
                 credential_env: str | None = None, ledger=None, session=None):
        super().__init__(descriptor, ledger)
        self.store = store
        self.transport = _HttpTransport(descriptor, credential_env, session)

    def _raw_caption(self, image: ImageRecord, system_prompt, temperature, nonce) -> dict:
        image_b64 = base64.b64encode(self.store.get(image.checksum)).decode("ascii")
        payload = {
            "model": self.descriptor.model_id,
            "temperature": temperature,
            "seed": nonce,
            "messages": [
                {"role": "system", "content": system_prompt},
                {"role": "user", "content": [
                    {"type": "image", "image_b64": image_b64},
                ]},
            ],
        }
        data = self.transport.post(payload)
        return {"text": data["choices"][0]["message"]["content"]}

    def _raw_text(self, prompt, temperature, nonce) -> dict:
        payload = {
            "model": self.descriptor.model_id,
            "temperature": temperature,
            "seed": nonce,
            "messages": [{"role": "user", "content": prompt}],
        }
        data = self.transport.post(payload)
        return {"text": data["choices"][0]["message"]["content"]}


class HttpT2IBackend(T2IBackend):
    def __init__(self, descriptor: BackendDescriptor, store: BlobStore,
                 credential_env: str | None = None, ledger=None, session=None):
        super().__init__(descriptor, ledger)
        self.store = store
        self.transport = _HttpTransport(descriptor, credential_env, session)

    def _raw_generate(self, prompt, params: GenerationParams, aspect) -> dict:
        w, h = aspect
        longest = max(w, h)
        if longest > params.max_dim_px:
            scale = params.max_dim_px / longest
            w = max(1, round(w * scale))
            h = max(1, round(h * scale))
        payload = {
            "model": self.descriptor.model_id,
            "prompt": prompt,
            "seed": params.seed,
            "steps": params.steps,
            "width": w,
            "height": h,
        }
        data = self.transport.post(payload)
        image_bytes = base64.b64decode(data["image_b64"])
        checksum = self.store.put(image_bytes)
        return {"checksum": checksum,
                "width": int(data.get("width", w)),
                "height": int(data.get("height", h))}


class HttpImageEmbedder(ImageEmbedder):
    def __init__(self, descriptor: BackendDescriptor, store: BlobStore,
                 credential_env: str | None = None, ledger=None, session=None):
        super().__init__(descriptor, ledger)
        self.store = store
        self.transport = _HttpTransport(descriptor, credential_env, session)

    def _raw_embed(self, image: ImageRecord) -> dict:
        image_b64 = base64.b64encode(self.store.get(image.checksum)).decode("ascii")
        data = self.transport.post({"model": self.descriptor.model_id,
                                    "image_b64": image_b64})
        return {"values": [float(x) for x in data["embedding"]]}


class HttpCrossModalEmbedder(CrossModalEmbedder):
    def __init__(self, descriptor: BackendDescriptor, store: BlobStore,
                 credential_env: str | None = None, max_text_tokens: int = 77,
                 ledger=None, session=None):
        super().__init__(descriptor, ledger, max_text_tokens=max_text_tokens)
        self.store = store
        self.transport = _HttpTransport(descriptor, credential_env, session)

    def _raw_embed_image(self, image: ImageRecord) -> dict:
        image_b64 = base64.b64encode(self.store.get(image.checksum)).decode("ascii")
        data = self.transport.post({"model": self.descriptor.model_id,
                                    "image_b64": image_b64})
        return {"values": [float(x) for x in data["embedding"]]}

    def _raw_embed_text(self, text: str) -> dict:
        data = self.transport.post({"model": self.descriptor.model_id,
                                    "text": text})
        return {"values": [float(x) for x in data["embedding"]]}
