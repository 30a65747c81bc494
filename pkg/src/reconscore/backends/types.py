"""Shared datatypes for the four external model roles."""

from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from ..errors import NotNormalizedError

NORM_TOL = 1e-6

ROLE_CAPTION = "caption"
ROLE_T2I = "t2i"
ROLE_IMAGE_EMBED = "image-embed"
ROLE_CROSSMODAL_EMBED = "crossmodal-embed"

ROLES = (ROLE_CAPTION, ROLE_T2I, ROLE_IMAGE_EMBED, ROLE_CROSSMODAL_EMBED)


@dataclass(frozen=True)
class BackendDescriptor:
    """Opaque identity of one served model; the triple (role, model_id,
    version_tag) keys cached behavior."""

    role: str
    model_id: str
    version_tag: str = "0"
    endpoint: str = ""

    @property
    def triple(self) -> tuple[str, str, str]:
        return (self.role, self.model_id, self.version_tag)

    @property
    def ident(self) -> str:
        return f"{self.role}:{self.model_id}@{self.version_tag}"


@dataclass(frozen=True)
class GenerationParams:
    """Text-to-image generation controls; defaults follow the evaluation
    protocol (fixed seed, 28 denoising steps, 512-token prompt budget,
    1024 px maximum side)."""

    seed: int = 0
    steps: int = 28
    max_prompt_tokens: int = 512
    max_dim_px: int = 1024

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "steps": self.steps,
            "max_prompt_tokens": self.max_prompt_tokens,
            "max_dim_px": self.max_dim_px,
        }


@dataclass(frozen=True)
class ImageRecord:
    """An evaluated image: stable id, content checksum into the blob store,
    and pixel dimensions."""

    image_id: str
    checksum: str
    width: int
    height: int

    @property
    def aspect(self) -> tuple[int, int]:
        return (self.width, self.height)


@dataclass(frozen=True)
class CaptionCandidate:
    """One generated caption with its sampling provenance."""

    text: str
    temperature: float
    nonce: int
    backend: str
    image_id: str = ""


@dataclass(frozen=True)
class EmbeddingVector:
    """L2-normalized feature vector from one embedding backend."""

    values: tuple[float, ...]
    backend: BackendDescriptor

    @property
    def dim(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def __post_init__(self):
        norm = float(np.linalg.norm(np.asarray(self.values, dtype=np.float64)))
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalizedError(
                f"embedding norm {norm} outside [1-{NORM_TOL}, 1+{NORM_TOL}]")


def normalized(values: np.ndarray, backend: BackendDescriptor) -> EmbeddingVector:
    arr = np.asarray(values, dtype=np.float64)
    norm = np.linalg.norm(arr)
    if norm == 0.0:
        raise NotNormalizedError("zero vector cannot be normalized")
    return EmbeddingVector(tuple((arr / norm).tolist()), backend)


def image_checksum(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def image_record_from_bytes(image_id: str, data: bytes) -> ImageRecord:
    with Image.open(io.BytesIO(data)) as img:
        width, height = img.size
    return ImageRecord(image_id=image_id, checksum=image_checksum(data),
                       width=width, height=height)


def count_tokens(text: str) -> int:
    """Whitespace-token approximation; backends may plug an exact counter."""
    return len(text.split())
