"""HTTP sidecar serving fluency scoring, mask filling, embeddings, and
paraphrasing over a fixed JSON protocol."""

from .app import build_models, create_app
from .config import ServerConfig

__version__ = "0.1.0"

__all__ = ["create_app", "build_models", "ServerConfig", "__version__"]
