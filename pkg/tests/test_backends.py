import json

import numpy as np
import pytest

from reconscore.backends import (BlobStore, CallLedger, MockCaptionBackend,
                                 MockCrossModalEmbedder, MockImageEmbedder,
                                 MockT2IBackend, NegatedMockImageEmbedder,
                                 RotatedMockImageEmbedder, load_backends,
                                 mock_backends, replay_backend)
from reconscore.backends.base import MAX_ATTEMPTS
from reconscore.backends.replay import ReplayMissError
from reconscore.backends.types import (BackendDescriptor, EmbeddingVector,
                                       GenerationParams, count_tokens)
from reconscore.errors import (DimMismatchError, EmptyGenerationError,
                               EmptyInputError, NotNormalizedError,
                               TokenLimitError, TransportError)

from conftest import make_image


def test_generation_params_defaults():
    p = GenerationParams()
    assert (p.seed, p.steps, p.max_prompt_tokens, p.max_dim_px) == (0, 28, 512, 1024)
    assert p.as_dict() == {"seed": 0, "steps": 28, "max_prompt_tokens": 512,
                           "max_dim_px": 1024}


def test_embedding_vector_enforces_unit_norm():
    d = BackendDescriptor(role="image-embed", model_id="m", version_tag="1")
    EmbeddingVector((1.0, 0.0, 0.0), d)
    with pytest.raises(NotNormalizedError):
        EmbeddingVector((1.0, 1.0, 0.0), d)


def test_caption_mock_is_pure_function_of_id_and_nonce():
    backend = MockCaptionBackend()
    image = make_image(1)
    a = backend.generate_caption(image, "sys", 0.8, 3)
    b = backend.generate_caption(image, "sys", 0.8, 3)
    c = backend.generate_caption(image, "sys", 0.8, 4)
    assert a.text == b.text
    assert a.text != c.text
    assert (a.temperature, a.nonce, a.backend) == (0.8, 3, backend.descriptor.ident)


def test_caption_temperature_zero_collapses_nonces():
    backend = MockCaptionBackend()
    image = make_image(2)
    texts = {backend.generate_caption(image, "sys", 0.0, n).text
             for n in range(1, 6)}
    assert len(texts) == 1


def test_t2i_determinism_and_prompt_sensitivity(store):
    backend = MockT2IBackend(store)
    params = GenerationParams()
    a = backend.generate_image("a harbor", params)
    b = backend.generate_image("a harbor", params)
    c = backend.generate_image("a runway", params)
    assert a.checksum == b.checksum
    assert a.checksum != c.checksum


def test_t2i_respects_aspect_and_max_dim(store):
    backend = MockT2IBackend(store)
    rec = backend.generate_image("x", GenerationParams(max_dim_px=100),
                                 aspect=(400, 200))
    assert (rec.width, rec.height) == (100, 50)
    rec2 = backend.generate_image("x", GenerationParams(), aspect=(40, 20))
    assert (rec2.width, rec2.height) == (40, 20)


def test_image_embedder_deterministic_and_normalized():
    backend = MockImageEmbedder()
    image = make_image(3)
    a = backend.embed_image(image)
    b = backend.embed_image(image)
    assert a.values == b.values
    assert abs(np.linalg.norm(a.as_array()) - 1.0) < 1e-6


def test_dim_mismatch_is_hard_error():
    backend = MockImageEmbedder()
    backend.embed_image(make_image(4))
    backend.dim = 32  # simulate a backend suddenly changing output width
    with pytest.raises(DimMismatchError):
        backend.embed_image(make_image(5))


def test_rotation_preserves_cosines_negation_flips():
    base = MockImageEmbedder()
    rot = RotatedMockImageEmbedder()
    neg = NegatedMockImageEmbedder()
    x, y = make_image(6), make_image(7)
    cos = float(np.dot(base.embed_image(x).as_array(),
                       base.embed_image(y).as_array()))
    cos_rot = float(np.dot(rot.embed_image(x).as_array(),
                           rot.embed_image(y).as_array()))
    cos_neg = float(np.dot(neg.embed_image(x).as_array(),
                           base.embed_image(y).as_array()))
    assert cos_rot == pytest.approx(cos, abs=1e-9)
    assert cos_neg == pytest.approx(-cos, abs=1e-9)


def test_crossmodal_token_limit_echoed():
    backend = MockCrossModalEmbedder(max_text_tokens=77)
    long_text = " ".join(["word"] * 80)
    with pytest.raises(TokenLimitError) as err:
        backend.embed_text(long_text)
    assert err.value.code == "token-limit"
    assert err.value.limit == 77
    backend.embed_text(" ".join(["word"] * 77))  # at the limit is fine


def test_crossmodal_empty_text():
    backend = MockCrossModalEmbedder()
    with pytest.raises(EmptyInputError):
        backend.embed_text("   ")


def test_count_tokens_is_whitespace_based():
    assert count_tokens("a b  c") == 3
    assert count_tokens("") == 0


def test_empty_generation_error():
    class Empty(MockCaptionBackend):
        def _raw_caption(self, *a):
            return {"text": "   "}

    with pytest.raises(EmptyGenerationError):
        Empty().generate_caption(make_image(8), "sys", 0.5, 1)


def test_retry_recovers_then_gives_up():
    calls = {"n": 0}

    class Flaky(MockCaptionBackend):
        def _raw_caption(self, *a):
            calls["n"] += 1
            if calls["n"] < MAX_ATTEMPTS:
                raise TransportError("boom")
            return {"text": "ok"}

    assert Flaky().generate_caption(make_image(9), "sys", 0.5, 1).text == "ok"
    assert calls["n"] == MAX_ATTEMPTS

    class Dead(MockCaptionBackend):
        def _raw_caption(self, *a):
            calls["n"] += 1
            raise TransportError("down")

    calls["n"] = 0
    with pytest.raises(TransportError):
        Dead().generate_caption(make_image(9), "sys", 0.5, 1)
    assert calls["n"] == MAX_ATTEMPTS


def test_drift_keeps_first_observation():
    flips = {"n": 0}

    class Drifty(MockCaptionBackend):
        def _raw_caption(self, *a):
            flips["n"] += 1
            return {"text": f"version {flips['n']}"}

    backend = Drifty()
    image = make_image(10)
    first = backend.generate_caption(image, "sys", 0.5, 1).text
    second = backend.generate_caption(image, "sys", 0.5, 1).text
    assert first == second == "version 1"


def test_ledger_serialization_excludes_durations(tmp_path):
    ledger = CallLedger()
    backend = MockCaptionBackend(ledger=ledger)
    backend.generate_caption(make_image(11), "sys", 0.5, 1)
    assert ledger.entries[0].duration_ms >= 0.0
    path = tmp_path / "ledger.jsonl"
    ledger.write(path)
    obj = json.loads(path.read_text().splitlines()[0])
    assert "duration_ms" not in obj
    assert set(obj) == {"role", "key", "result", "cache_status"}


def test_replay_reproduces_without_live_backend(tmp_path, store):
    ledger = CallLedger()
    live = MockImageEmbedder(ledger=ledger)
    image = make_image(12)
    want = live.embed_image(image).values
    path = tmp_path / "ledger.jsonl"
    ledger.write(path)

    recorded = CallLedger.read(path)
    ghost = replay_backend(live.descriptor, recorded)
    assert ghost.embed_image(image).values == pytest.approx(want)
    with pytest.raises(ReplayMissError):
        ghost.embed_image(make_image(13))


def test_blobstore_roundtrip(tmp_path):
    store = BlobStore(tmp_path / "b")
    data = b"payload"
    checksum = store.put(data)
    assert store.has(checksum)
    assert store.get(checksum) == data
    assert store.put(data) == checksum  # idempotent


def test_load_backends_mock_and_missing_role(tmp_path, store):
    s = mock_backends(store)
    assert len(s.image_embedders) >= 2
    bad = tmp_path / "backends.json"
    bad.write_text(json.dumps({"backends": [
        {"role": "caption", "model_id": "m", "version_tag": "1",
         "endpoint": "http://localhost:1/v1"}]}))
    with pytest.raises(ValueError):
        load_backends(bad, store)
