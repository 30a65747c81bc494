"""Uniform clients for the four external model roles, plus mocks and replay."""

from .base import (BackendBase, CaptionBackend, CrossModalEmbedder,
                   ImageEmbedder, T2IBackend, canonical_key)
from .blobstore import BlobStore
from .config import BackendSet, load_backends, mock_backends
from .ledger import CallLedger, LedgerEntry
from .mock import (MockCaptionBackend, MockCrossModalEmbedder,
                   MockImageEmbedder, MockT2IBackend,
                   NegatedMockImageEmbedder, RotatedMockImageEmbedder)
from .replay import replay_backend
from .types import (BackendDescriptor, CaptionCandidate, EmbeddingVector,
                    GenerationParams, ImageRecord, count_tokens,
                    image_record_from_bytes, normalized)

__all__ = [
    "BackendBase", "CaptionBackend", "CrossModalEmbedder", "ImageEmbedder",
    "T2IBackend", "canonical_key", "BlobStore", "BackendSet", "load_backends",
    "mock_backends", "CallLedger", "LedgerEntry", "MockCaptionBackend",
    "MockCrossModalEmbedder", "MockImageEmbedder", "MockT2IBackend",
    "NegatedMockImageEmbedder", "RotatedMockImageEmbedder", "replay_backend",
    "BackendDescriptor", "CaptionCandidate", "EmbeddingVector",
    "GenerationParams", "ImageRecord", "count_tokens",
    "image_record_from_bytes", "normalized",
]
