"""Server configuration: one model identifier per role, plus runtime knobs.

Role identifiers: the literal "lite" selects the packaged self-contained
models; anything else is treated as a transformers checkpoint name and
loaded through the optional hf provider.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass

ENV_PORT = "SCORER_SERVER_PORT"
ENV_DEVICE = "SCORER_SERVER_DEVICE"

LITE = "lite"


@dataclass(frozen=True)
class ServerConfig:
    fluency_model: str = LITE
    mask_model: str = LITE
    embed_model: str = LITE
    paraphrase_model: str = LITE
    device: str = "cpu"
    port: int = 8041
    max_batch_tokens: int = 2048

    def __post_init__(self):
        if not 0 < self.port < 65536:
            raise ValueError(f"port {self.port} out of range")
        if self.max_batch_tokens < 1:
            raise ValueError("max_batch_tokens must be >= 1")

    @classmethod
    def load(cls, path: str | None = None) -> "ServerConfig":
        """Build from an optional JSON file, then apply environment
        overrides for port and device."""
        data: dict = {}
        if path:
            with open(path, encoding="utf-8") as f:
                data = json.load(f)
        if ENV_PORT in os.environ:
            data["port"] = int(os.environ[ENV_PORT])
        if ENV_DEVICE in os.environ:
            data["device"] = os.environ[ENV_DEVICE]
        return cls(**data)
