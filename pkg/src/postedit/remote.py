"""HTTP client for the model server: neural fluency, mask fill, embeddings,
and paraphrase behind the ScorerBackend contract.

Every response is validated against the wire schema before use; malformed
data raises ProtocolError with the raw payload attached, transport failures
raise ScorerUnavailable after the configured retries.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
import requests

from .baseline import heuristic_entity_count
from .errors import ProtocolError, ScorerUnavailable

__all__ = ["RemoteConfig", "RemoteBackend", "validate_response"]

HEALTH_PATH = "/v1/health"
FLUENCY_PATH = "/v1/fluency"
MASK_FILL_PATH = "/v1/mask_fill"
TOKEN_EMBED_PATH = "/v1/token_embed"
EMBED_PATH = "/v1/embed"
PARAPHRASE_PATH = "/v1/paraphrase"


@dataclass(frozen=True)
class RemoteConfig:
    base_url: str
    timeout: float = 30.0
    max_retries: int = 2
    batch_size: int = 512  # max tokens per fluency request

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be > 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def _check_logprobs(payload: Any, n_tokens: int) -> list[float]:
    if not isinstance(payload, dict) or "logprobs" not in payload:
        raise ProtocolError("response missing 'logprobs'", payload)
    values = payload["logprobs"]
    if not isinstance(values, list) or len(values) != n_tokens:
        raise ProtocolError(
            f"expected {n_tokens} logprobs, got {values!r}", payload
        )
    out = []
    for v in values:
        if not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ProtocolError(f"non-finite logprob {v!r}", payload)
        out.append(float(v))
    return out


def _check_mask_fill(payload: Any) -> list[tuple[str, float]]:
    if not isinstance(payload, dict) or "candidates" not in payload:
        raise ProtocolError("response missing 'candidates'", payload)
    items = payload["candidates"]
    if not isinstance(items, list):
        raise ProtocolError("'candidates' is not a list", payload)
    out: list[tuple[str, float]] = []
    prev = None
    for item in items:
        if (
            not isinstance(item, dict)
            or not isinstance(item.get("token"), str)
            or not isinstance(item.get("prob"), (int, float))
        ):
            raise ProtocolError(f"malformed candidate {item!r}", payload)
        prob = float(item["prob"])
        if not 0 < prob <= 1:
            raise ProtocolError(f"probability {prob} outside (0, 1]", payload)
        if prev is not None and prob > prev:
            raise ProtocolError("candidate probabilities not descending", payload)
        prev = prob
        out.append((item["token"], prob))
    return out


def _check_vectors(payload: Any, key: str, expect_rows: int | None, dim: int) -> np.ndarray:
    if not isinstance(payload, dict) or key not in payload:
        raise ProtocolError(f"response missing '{key}'", payload)
    data = payload[key]
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise ProtocolError(f"'{key}' is not numeric", payload)
    if expect_rows is None:
        if arr.ndim != 1 or arr.shape[0] != dim:
            raise ProtocolError(
                f"expected a vector of dimension {dim}, got shape {arr.shape}", payload
            )
    else:
        if arr.ndim != 2 or arr.shape != (expect_rows, dim):
            raise ProtocolError(
                f"expected {expect_rows} vectors of dimension {dim}, "
                f"got shape {arr.shape}",
                payload,
            )
    if not np.all(np.isfinite(arr)):
        raise ProtocolError(f"non-finite values in '{key}'", payload)
    return arr


def _check_health(payload: Any) -> tuple[int, int]:
    try:
        token_dim = payload["dims"]["token"]
        sentence_dim = payload["dims"]["sentence"]
        if not isinstance(token_dim, int) or not isinstance(sentence_dim, int):
            raise TypeError
    except (KeyError, TypeError):
        raise ProtocolError("malformed health response", payload)
    if payload.get("status") != "ok":
        raise ProtocolError(f"server status {payload.get('status')!r}", payload)
    return token_dim, sentence_dim


def _check_paraphrase(payload: Any) -> str:
    if not isinstance(payload, dict) or not isinstance(payload.get("text"), str):
        raise ProtocolError("paraphrase response missing 'text'", payload)
    if not payload["text"]:
        raise ProtocolError("paraphrase response is empty", payload)
    return payload["text"]


def validate_response(
    endpoint: str,
    payload: Any,
    *,
    n_tokens: int | None = None,
    token_dim: int | None = None,
    sentence_dim: int | None = None,
):
    """Validate a server payload for one endpoint; raises ProtocolError.

    This is the single schema authority: the live client paths and the
    shared conformance vectors both go through it.
    """
    if endpoint == "health":
        return _check_health(payload)
    if endpoint == "fluency":
        return _check_logprobs(payload, n_tokens)
    if endpoint == "mask_fill":
        return _check_mask_fill(payload)
    if endpoint == "token_embed":
        return _check_vectors(payload, "vectors", n_tokens, token_dim)
    if endpoint == "embed":
        return _check_vectors(payload, "vector", None, sentence_dim)
    if endpoint == "paraphrase":
        return _check_paraphrase(payload)
    raise ValueError(f"unknown endpoint {endpoint!r}")


class RemoteBackend:
    """ScorerBackend speaking JSON over HTTP to the model server.

    Entity counting stays local (the capitalization heuristic); the server
    does not expose an entity endpoint.
    """

    def __init__(
        self,
        config: RemoteConfig,
        session: requests.Session | None = None,
        gazetteer: frozenset[str] = frozenset(),
    ):
        self.config = config
        self._fixed_session = session
        self._local = threading.local()
        self.gazetteer = gazetteer
        self._dims: tuple[int, int] | None = None

    @property
    def session(self) -> requests.Session:
        """requests.Session is not thread-safe; give each worker its own
        unless a fixed session was injected (tests)."""
        if self._fixed_session is not None:
            return self._fixed_session
        if not hasattr(self._local, "session"):
            self._local.session = requests.Session()
        return self._local.session

    # -- transport ---------------------------------------------------------

    def _request(self, method: str, path: str, body: dict | None = None) -> Any:
        url = self.config.base_url.rstrip("/") + path
        last_error: Exception | None = None
        for _ in range(self.config.max_retries + 1):
            try:
                if method == "GET":
                    resp = self.session.get(url, timeout=self.config.timeout)
                else:
                    resp = self.session.post(url, json=body, timeout=self.config.timeout)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if resp.status_code >= 400:
                try:
                    message = resp.json().get("error", resp.text)
                except ValueError:
                    message = resp.text
                raise ScorerUnavailable(
                    f"{path} returned HTTP {resp.status_code}: {message}",
                    payload=resp.text,
                )
            try:
                return resp.json()
            except ValueError:
                raise ProtocolError(f"{path} returned non-JSON body", resp.text)
        raise ScorerUnavailable(
            f"{path} unreachable after {self.config.max_retries + 1} attempts: {last_error}"
        )

    def dims(self) -> tuple[int, int]:
        """(token, sentence) embedding dimensions from the health handshake."""
        if self._dims is None:
            payload = self._request("GET", HEALTH_PATH)
            self._dims = _check_health(payload)
        return self._dims

    # -- ScorerBackend -----------------------------------------------------

    def token_logprobs(self, tokens: Sequence[str]) -> list[float]:
        """One finite log-probability per token. Long inputs are scored in
        batch_size windows and reassembled in order."""
        tokens = list(tokens)
        out: list[float] = []
        for start in range(0, len(tokens), self.config.batch_size):
            batch = tokens[start : start + self.config.batch_size]
            payload = self._request("POST", FLUENCY_PATH, {"tokens": batch})
            out.extend(_check_logprobs(payload, len(batch)))
        return out

    def mask_fill(
        self, tokens: Sequence[str], mask_index: int, top_k: int = 10
    ) -> list[tuple[str, float]]:
        payload = self._request(
            "POST",
            MASK_FILL_PATH,
            {"tokens": list(tokens), "mask_index": mask_index, "top_k": top_k},
        )
        return _check_mask_fill(payload)

    def token_embeddings(self, tokens: Sequence[str]) -> np.ndarray:
        token_dim, _ = self.dims()
        payload = self._request("POST", TOKEN_EMBED_PATH, {"tokens": list(tokens)})
        return _check_vectors(payload, "vectors", len(tokens), token_dim)

    def sentence_embedding(self, text: str) -> np.ndarray:
        _, sentence_dim = self.dims()
        payload = self._request("POST", EMBED_PATH, {"text": text})
        return _check_vectors(payload, "vector", None, sentence_dim)

    def paraphrase(self, text: str) -> str:
        payload = self._request("POST", PARAPHRASE_PATH, {"text": text})
        return _check_paraphrase(payload)

    def entity_count(self, text: str) -> int:
        return heuristic_entity_count(text, self.gazetteer)
