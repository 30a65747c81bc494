"""Replay backends: serve recorded ledger results instead of live calls."""

from __future__ import annotations

from ..errors import ReconScoreError
from .base import CaptionBackend, CrossModalEmbedder, ImageEmbedder, T2IBackend, canonical_key
from .ledger import CallLedger, LedgerEntry
from .types import BackendDescriptor


class ReplayMissError(ReconScoreError):
    code = "replay-miss"


class _ReplayMixin:
    def _attach_index(self, index: dict[tuple[str, str], dict]):
        self._replay_index = index

    def _invoke(self, key_obj: dict, raw_call) -> dict:
        key_obj = dict(key_obj, backend=self.descriptor.ident)
        key = canonical_key(key_obj)
        result = self._replay_index.get((self.descriptor.role, key))
        if result is None:
            raise ReplayMissError(f"no recorded call for key {key}")
        if self.ledger is not None:
            self.ledger.record(LedgerEntry(
                role=self.descriptor.role, key=key, result=result,
                cache_status="replay"))
        return result


class ReplayCaptionBackend(_ReplayMixin, CaptionBackend):
    def _raw_caption(self, *a): raise AssertionError("replay only")
    def _raw_text(self, *a): raise AssertionError("replay only")


class ReplayT2IBackend(_ReplayMixin, T2IBackend):
    def _raw_generate(self, *a): raise AssertionError("replay only")


class ReplayImageEmbedder(_ReplayMixin, ImageEmbedder):
    def _raw_embed(self, *a): raise AssertionError("replay only")


class ReplayCrossModalEmbedder(_ReplayMixin, CrossModalEmbedder):
    def _raw_embed_image(self, *a): raise AssertionError("replay only")
    def _raw_embed_text(self, *a): raise AssertionError("replay only")


_ROLE_TO_CLASS = {
    "caption": ReplayCaptionBackend,
    "t2i": ReplayT2IBackend,
    "image-embed": ReplayImageEmbedder,
    "crossmodal-embed": ReplayCrossModalEmbedder,
}


def replay_backend(descriptor: BackendDescriptor, ledger: CallLedger,
                   record_to=None):
    """Build a replay stand-in matching ``descriptor`` from a recorded ledger."""
    cls = _ROLE_TO_CLASS[descriptor.role]
    backend = cls(descriptor, ledger=record_to)
    backend._attach_index(ledger.index())
    return backend
