"""Command-line entry point.

Precedence for every setting: built-in default < config file < environment
variable (POSTEDIT_REMOTE_URL, POSTEDIT_SEED) < command-line flag.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .errors import PosteditError
from .pipeline import PipelineConfig, StageToggles, run_pipeline

ENV_REMOTE_URL = "POSTEDIT_REMOTE_URL"
ENV_SEED = "POSTEDIT_SEED"

STAGE_NAMES = ("topn", "edits", "para")


def _parse_stages(spec: str) -> StageToggles:
    names = [s.strip() for s in spec.split(",") if s.strip()]
    unknown = [s for s in names if s not in STAGE_NAMES]
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown stages {unknown}; expected a subset of {STAGE_NAMES}"
        )
    return StageToggles(
        edits="edits" in names or "para" in names,
        grammar="edits" in names or "para" in names,
        paraphrase="para" in names,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="postedit",
        description="Post-edit extracted explanation sentences and evaluate the results.",
    )
    parser.add_argument("--config", help="JSON config file mirroring PipelineConfig fields")
    parser.add_argument("--dataset", help="JSON Lines dataset of claim records")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--backend", choices=["baseline", "remote"])
    parser.add_argument("--remote-url", help="base URL of the model server")
    parser.add_argument("--seed", type=int)
    parser.add_argument(
        "--stages",
        type=_parse_stages,
        help="comma-separated subset of topn,edits,para (topn is always produced)",
    )
    parser.add_argument("--n", type=int, help="Top-N selection size")
    parser.add_argument("--k", type=int, help="oracle selection size")
    parser.add_argument("--steps", type=int, help="edit search steps")
    parser.add_argument("--workers", type=int, help="worker pool size")
    parser.add_argument("--selection", choices=["auto", "preselected", "oracle", "lead"])
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _load_config_file(path: str) -> dict:
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def build_config(args: argparse.Namespace) -> PipelineConfig:
    data: dict = {}
    if args.config:
        data.update(_load_config_file(args.config))

    if ENV_SEED in os.environ:
        data["seed"] = int(os.environ[ENV_SEED])
    if ENV_REMOTE_URL in os.environ:
        remote = dict(data.get("remote") or {})
        remote["base_url"] = os.environ[ENV_REMOTE_URL]
        data["remote"] = remote

    if args.dataset:
        data["dataset"] = args.dataset
    if args.out:
        data["out_dir"] = args.out
    if args.backend:
        data["backend"] = args.backend
    if args.remote_url:
        remote = dict(data.get("remote") or {})
        remote["base_url"] = args.remote_url
        data["remote"] = remote
    if args.seed is not None:
        data["seed"] = args.seed
    if args.n is not None:
        data["n"] = args.n
    if args.k is not None:
        data["k"] = args.k
    if args.workers is not None:
        data["workers"] = args.workers
    if args.selection:
        data["selection"] = args.selection
    if args.steps is not None:
        edit = dict(data.get("edit") or {})
        edit["n_steps"] = args.steps
        data["edit"] = edit
    if args.stages:
        data["stages"] = args.stages

    if "dataset" not in data:
        raise PosteditError("no dataset given (use --dataset or a config file)")
    if "out_dir" not in data:
        raise PosteditError("no output directory given (use --out or a config file)")
    return PipelineConfig.from_dict(data)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = build_config(args)
        result = run_pipeline(config)
    except PosteditError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = result.report
    print(f"processed {report.instances} records ({report.failures} failures)")
    for stage in report.stages:
        flesch = stage.summaries["flesch"]
        print(
            f"  {stage.method}: Flesch {flesch.mean:.2f} "
            f"[{flesch.ci_low:.2f}-{flesch.ci_high:.2f}] ({stage.flesch_band})"
        )
    print(f"report written to {result.out_dir / 'report.json'}")
    if not result.ok:
        print(
            f"error: {result.failure_fraction:.0%} of records failed "
            f"(threshold {10}%)",
            file=sys.stderr,
        )
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
