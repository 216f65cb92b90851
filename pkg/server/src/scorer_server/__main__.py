"""Entry point: load config, resolve models, serve."""
from __future__ import annotations

import argparse
import logging
import sys

import uvicorn

from .app import build_models, create_app
from .config import ServerConfig


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="scorer-server")
    parser.add_argument("--config", help="JSON config file (role model ids, device, port)")
    parser.add_argument("--port", type=int, help="override listen port")
    parser.add_argument("--host", default="127.0.0.1")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = ServerConfig.load(args.config)
        if args.port is not None:
            config = ServerConfig(
                fluency_model=config.fluency_model,
                mask_model=config.mask_model,
                embed_model=config.embed_model,
                paraphrase_model=config.paraphrase_model,
                device=config.device,
                port=args.port,
                max_batch_tokens=config.max_batch_tokens,
            )
        models = build_models(config)
    except Exception as exc:
        print(f"startup failed: {exc}", file=sys.stderr)
        return 1

    app = create_app(config, models)
    uvicorn.run(app, host=args.host, port=config.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
