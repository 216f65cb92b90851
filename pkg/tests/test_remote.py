from __future__ import annotations

import json
from importlib import resources

import pytest
import requests

from postedit.errors import ProtocolError, ScorerUnavailable
from postedit.remote import RemoteBackend, RemoteConfig, validate_response

HEALTH = {"status": "ok", "dims": {"token": 4, "sentence": 6}}


class FakeResponse:
    def __init__(self, data, status_code=200):
        self._data = data
        self.status_code = status_code
        self.text = json.dumps(data)

    def json(self):
        if isinstance(self._data, Exception):
            raise self._data
        return self._data


class FakeSession:
    """Scripted transport: responses keyed by path, calls recorded."""

    def __init__(self, handlers):
        self.handlers = handlers
        self.calls: list[tuple[str, str, dict | None]] = []

    def get(self, url, timeout=None):
        return self._dispatch("GET", url, None)

    def post(self, url, json=None, timeout=None):
        return self._dispatch("POST", url, json)

    def _dispatch(self, method, url, body):
        path = "/" + url.split("/", 3)[-1]
        self.calls.append((method, path, body))
        handler = self.handlers[path]
        result = handler(body) if callable(handler) else handler
        if isinstance(result, requests.RequestException):
            raise result
        return result


def backend_with(handlers, **config) -> tuple[RemoteBackend, FakeSession]:
    session = FakeSession(handlers)
    cfg = RemoteConfig(base_url="http://server", **config)
    return RemoteBackend(cfg, session=session), session


class TestTransport:
    def test_passthrough_logprobs(self):
        backend, _ = backend_with(
            {"/v1/fluency": FakeResponse({"logprobs": [-1.0, -2.0, -3.0]})}
        )
        assert backend.token_logprobs(["a", "b", "c"]) == [-1.0, -2.0, -3.0]

    def test_retries_then_unavailable(self):
        attempts = []

        def down(body):
            attempts.append(1)
            return requests.ConnectionError("refused")

        backend, _ = backend_with({"/v1/fluency": down}, max_retries=2)
        with pytest.raises(ScorerUnavailable):
            backend.token_logprobs(["a"])
        assert len(attempts) == 3  # max_retries + 1

    def test_http_error_carries_message(self):
        backend, _ = backend_with(
            {"/v1/fluency": FakeResponse({"error": "model exploded"}, status_code=500)}
        )
        with pytest.raises(ScorerUnavailable, match="model exploded"):
            backend.token_logprobs(["a"])

    def test_batched_scoring_matches_unbatched(self):
        tokens = ["x" * (i % 7 + 1) for i in range(120)]

        def scorer(body):
            return FakeResponse({"logprobs": [-float(len(t)) for t in body["tokens"]]})

        batched, session = backend_with({"/v1/fluency": scorer}, batch_size=50)
        unbatched, _ = backend_with({"/v1/fluency": scorer}, batch_size=512)
        assert batched.token_logprobs(tokens) == unbatched.token_logprobs(tokens)
        assert len([c for c in session.calls if c[1] == "/v1/fluency"]) == 3

    def test_wrong_count_is_protocol_error(self):
        backend, _ = backend_with({"/v1/fluency": FakeResponse({"logprobs": [-1.0]})})
        with pytest.raises(ProtocolError):
            backend.token_logprobs(["a", "b"])


class TestMaskFill:
    def test_order_preserved_and_topk_forwarded(self):
        backend, session = backend_with(
            {
                "/v1/mask_fill": FakeResponse(
                    {"candidates": [{"token": "cat", "prob": 0.5}, {"token": "dog", "prob": 0.2}]}
                )
            }
        )
        out = backend.mask_fill(["the", "sat"], 1, top_k=7)
        assert out == [("cat", 0.5), ("dog", 0.2)]
        assert session.calls[0][2] == {"tokens": ["the", "sat"], "mask_index": 1, "top_k": 7}

    def test_non_descending_probs_rejected(self):
        backend, _ = backend_with(
            {
                "/v1/mask_fill": FakeResponse(
                    {"candidates": [{"token": "a", "prob": 0.2}, {"token": "b", "prob": 0.5}]}
                )
            }
        )
        with pytest.raises(ProtocolError):
            backend.mask_fill(["x"], 0)


class TestEmbeddings:
    def test_handshake_and_shapes(self):
        backend, _ = backend_with(
            {
                "/v1/health": FakeResponse(HEALTH),
                "/v1/token_embed": FakeResponse({"vectors": [[1, 2, 3, 4], [5, 6, 7, 8]]}),
                "/v1/embed": FakeResponse({"vector": [1, 2, 3, 4, 5, 6]}),
            }
        )
        assert backend.dims() == (4, 6)
        assert backend.token_embeddings(["a", "b"]).shape == (2, 4)
        assert backend.sentence_embedding("a b").shape == (6,)

    def test_dimension_mismatch(self):
        backend, _ = backend_with(
            {
                "/v1/health": FakeResponse(HEALTH),
                "/v1/embed": FakeResponse({"vector": [1, 2, 3, 4, 5]}),
            }
        )
        with pytest.raises(ProtocolError):
            backend.sentence_embedding("a")

    def test_one_vector_per_token_enforced(self):
        backend, _ = backend_with(
            {
                "/v1/health": FakeResponse(HEALTH),
                "/v1/token_embed": FakeResponse({"vectors": [[1, 2, 3, 4]]}),
            }
        )
        with pytest.raises(ProtocolError):
            backend.token_embeddings(["a", "b"])


class TestParaphraseEndpoint:
    def test_echo(self):
        backend, _ = backend_with(
            {"/v1/paraphrase": lambda body: FakeResponse({"text": body["text"]})}
        )
        assert backend.paraphrase("hello there") == "hello there"

    def test_empty_rejected(self):
        backend, _ = backend_with({"/v1/paraphrase": FakeResponse({"text": ""})})
        with pytest.raises(ProtocolError):
            backend.paraphrase("x")


class TestLocalEntityCount:
    def test_no_server_needed(self):
        backend, _ = backend_with({})
        assert backend.entity_count("he saw Springfield yesterday") == 1


@pytest.fixture(scope="module")
def vectors():
    text = resources.files("postedit.data").joinpath("protocol_vectors.json").read_text()
    return json.loads(text)


class TestConformanceVectors:
    def test_all_endpoints_covered(self, vectors):
        assert set(vectors) == {
            "health",
            "fluency",
            "mask_fill",
            "token_embed",
            "embed",
            "paraphrase",
        }

    def test_vectors_verdicts(self, vectors):
        for endpoint, spec in vectors.items():
            context = spec.get("context", {})
            for case in spec["responses"]:
                if case["valid"]:
                    validate_response(endpoint, case["payload"], **context)
                else:
                    with pytest.raises(ProtocolError):
                        validate_response(endpoint, case["payload"], **context)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            RemoteConfig(base_url="http://x", timeout=0)
        with pytest.raises(ValueError):
            RemoteConfig(base_url="http://x", max_retries=-1)
