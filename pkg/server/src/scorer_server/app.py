"""FastAPI application implementing the scoring wire protocol.

Endpoints, request bodies, and response field names are the protocol
contract; every error body is {"error": message}. Model calls are
serialized behind per-role locks so concurrent requests queue instead of
interleaving inside a model.
"""
from __future__ import annotations

import logging
import threading
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .config import LITE, ServerConfig

log = logging.getLogger(__name__)


@dataclass
class ModelBundle:
    """The four resolved roles plus their locks."""

    lm: object
    masker: object
    embedder: object
    paraphraser: object

    def __post_init__(self):
        self.locks = {name: threading.Lock() for name in ("lm", "masker", "embedder", "paraphraser")}


def build_models(config: ServerConfig) -> ModelBundle:
    """Resolve every role at startup; any failure aborts with a diagnostic."""
    from . import lite

    if config.fluency_model == LITE:
        lm = lite.LiteLanguageModel()
    else:
        from .hf import HfCausalLM

        lm = HfCausalLM(config.fluency_model, config.device)
    if config.mask_model == LITE:
        masker = lm if isinstance(lm, lite.LiteLanguageModel) else lite.LiteLanguageModel()
    else:
        from .hf import HfMaskFiller

        masker = HfMaskFiller(config.mask_model, config.device)
    if config.embed_model == LITE:
        embedder = lite.LiteEmbedder()
    else:
        from .hf import HfEmbedder

        embedder = HfEmbedder(config.embed_model, config.device)
    if config.paraphrase_model == LITE:
        paraphraser = lite.LiteParaphraser()
    else:
        from .hf import HfParaphraser

        paraphraser = HfParaphraser(config.paraphrase_model, config.device)
    return ModelBundle(lm=lm, masker=masker, embedder=embedder, paraphraser=paraphraser)


class FluencyRequest(BaseModel):
    tokens: list[str] = Field(min_length=1)


class MaskFillRequest(BaseModel):
    tokens: list[str]
    mask_index: int
    top_k: int = Field(default=10, ge=1)


class TokenEmbedRequest(BaseModel):
    tokens: list[str] = Field(min_length=1)


class EmbedRequest(BaseModel):
    text: str = Field(min_length=1)


class ParaphraseRequest(BaseModel):
    text: str = Field(min_length=1)


def create_app(config: ServerConfig | None = None, models: ModelBundle | None = None) -> FastAPI:
    config = config or ServerConfig()
    bundle = models or build_models(config)
    app = FastAPI(title="scorer-server", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors()[:1])})

    @app.exception_handler(Exception)
    async def server_error(request: Request, exc: Exception):
        log.exception("request failed")
        return JSONResponse(status_code=500, content={"error": str(exc)})

    def fail(status: int, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": message})

    @app.get("/v1/health")
    def health():
        return {
            "status": "ok",
            "dims": {
                "token": int(bundle.embedder.token_dim),
                "sentence": int(bundle.embedder.sentence_dim),
            },
        }

    @app.post("/v1/fluency")
    def fluency(body: FluencyRequest):
        if len(body.tokens) > config.max_batch_tokens:
            return fail(400, f"request exceeds max_batch_tokens={config.max_batch_tokens}")
        with bundle.locks["lm"]:
            logprobs = bundle.lm.logprobs(body.tokens)
        return {"logprobs": [float(v) for v in logprobs]}

    @app.post("/v1/mask_fill")
    def mask_fill(body: MaskFillRequest):
        if not 0 <= body.mask_index <= len(body.tokens):
            return fail(400, f"mask_index {body.mask_index} out of range")
        with bundle.locks["masker"]:
            candidates = bundle.masker.mask_fill(body.tokens, body.mask_index, body.top_k)
        return {"candidates": [{"token": w, "prob": float(p)} for w, p in candidates]}

    @app.post("/v1/token_embed")
    def token_embed(body: TokenEmbedRequest):
        with bundle.locks["embedder"]:
            vectors = bundle.embedder.token_vectors(body.tokens)
        return {"vectors": [[float(x) for x in row] for row in vectors]}

    @app.post("/v1/embed")
    def embed(body: EmbedRequest):
        with bundle.locks["embedder"]:
            vector = bundle.embedder.sentence_vector(body.text)
        return {"vector": [float(x) for x in vector]}

    @app.post("/v1/paraphrase")
    def paraphrase(body: ParaphraseRequest):
        with bundle.locks["paraphraser"]:
            text = bundle.paraphraser.rewrite(body.text)
        if not text:
            return fail(500, "paraphraser produced empty output")
        return {"text": text}

    return app
