"""End-to-end runner: ingest a dataset, build the Top-N input, run the edit
search, post-process, paraphrase, evaluate, and emit reports."""
from __future__ import annotations

import dataclasses
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .baseline import BaselineBackend
from .engine import EditConfig, EditTrace, run_search
from .errors import DataError, EmptySelection, PosteditError, UndefinedMetric
from .metrics import (
    EvalReport,
    InstanceScores,
    copy_novelty_coverage,
    dale_chall,
    flesch_reading_ease,
    format_report_table,
    rouge_l_f1,
    rouge_n_f1,
    summarize_stage,
)
from .postprocess import GrammarRuleSet, drop_verbless_sentences, grammar_correct, paraphrase
from .remote import RemoteBackend, RemoteConfig
from .selection import ClaimRecord, filter_rc_sentences, greedy_oracle_select
from .textcore import detokenize, parse_bracketed, tokenize

__all__ = [
    "StageToggles",
    "PipelineConfig",
    "PipelineResult",
    "load_dataset",
    "run_pipeline",
    "write_report",
]

log = logging.getLogger(__name__)

SELECTION_MODES = ("auto", "preselected", "oracle", "lead")

FAILURE_EXIT_FRACTION = 0.10


@dataclass(frozen=True)
class StageToggles:
    """Pipeline stages after Top-N selection. They form a prefix: grammar
    correction belongs to the edits stage, paraphrasing builds on it."""

    edits: bool = True
    grammar: bool = True
    paraphrase: bool = False

    def __post_init__(self):
        if self.grammar and not self.edits:
            raise ValueError("grammar correction runs within the edits stage")
        if self.paraphrase and not (self.edits and self.grammar):
            raise ValueError("paraphrasing requires the edits stage")


@dataclass(frozen=True)
class PipelineConfig:
    dataset: str
    out_dir: str
    n: int = 6
    k: int = 4
    selection: str = "auto"
    backend: str = "baseline"
    remote: RemoteConfig | None = None
    stages: StageToggles = field(default_factory=StageToggles)
    edit: EditConfig = field(default_factory=EditConfig)
    seed: int = 0
    workers: int = 2
    filter_max_len: int = 60
    drop_questions: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.selection not in SELECTION_MODES:
            raise ValueError(f"selection must be one of {SELECTION_MODES}")
        if self.backend not in ("baseline", "remote"):
            raise ValueError("backend must be 'baseline' or 'remote'")
        if self.backend == "remote" and self.remote is None:
            raise ValueError("remote backend requires a RemoteConfig")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        data = dict(data)
        if "remote" in data and isinstance(data["remote"], dict):
            data["remote"] = RemoteConfig(**data["remote"])
        if "stages" in data and isinstance(data["stages"], dict):
            data["stages"] = StageToggles(**data["stages"])
        if "edit" in data and isinstance(data["edit"], dict):
            edit = dict(data["edit"])
            if "weights" in edit and isinstance(edit["weights"], dict):
                from .scoring import ScorerWeights

                edit["weights"] = ScorerWeights(**edit["weights"])
            data["edit"] = EditConfig(**edit)
        return cls(**data)


@dataclass
class InstanceOutput:
    record: ClaimRecord
    stage_texts: dict[str, str]
    trace: EditTrace | None = None


@dataclass
class PipelineResult:
    report: EvalReport
    outputs: list[InstanceOutput]
    failures: list[tuple[str, str]]
    out_dir: Path

    @property
    def failure_fraction(self) -> float:
        total = len(self.outputs) + len(self.failures)
        return len(self.failures) / total if total else 0.0

    @property
    def ok(self) -> bool:
        return self.failure_fraction <= FAILURE_EXIT_FRACTION


_REQUIRED_FIELDS = ("claim_id", "claim", "label", "ruling_sentences")


def _record_from_json(obj: dict, require_gold: bool) -> ClaimRecord:
    for name in _REQUIRED_FIELDS:
        if name not in obj:
            raise ValueError(f"missing field '{name}'")
    if require_gold and not obj.get("justification"):
        raise ValueError("missing field 'justification' (required by oracle selection)")
    sentences = obj["ruling_sentences"]
    if not isinstance(sentences, list) or not all(isinstance(s, str) for s in sentences):
        raise ValueError("'ruling_sentences' must be a list of strings")
    preselected = obj.get("preselected_topn")
    parses = obj.get("parses")
    return ClaimRecord(
        claim_id=str(obj["claim_id"]),
        claim=str(obj["claim"]),
        label=str(obj["label"]),
        ruling_sentences=tuple(sentences),
        justification=str(obj.get("justification", "")),
        preselected_topn=tuple(preselected) if preselected is not None else None,
        parses=tuple(parses) if parses is not None else None,
    )


def load_dataset(path: str | Path, require_gold: bool = False) -> list[ClaimRecord]:
    """Read a JSON Lines dataset; any malformed line fails the load with a
    message listing every offending line number."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"dataset not found: {path}")
    records: list[ClaimRecord] = []
    problems: list[str] = []
    with path.open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                records.append(_record_from_json(obj, require_gold))
            except (ValueError, TypeError) as exc:
                problems.append(f"line {lineno}: {exc}")
    if problems:
        raise DataError("malformed dataset lines: " + "; ".join(problems))
    if not records:
        raise DataError(f"dataset {path} contains no records")
    return records


def _select_indices(
    record: ClaimRecord,
    kept: list[str],
    index_map: list[int],
    config: PipelineConfig,
) -> list[int]:
    """Positions into the filtered sentence list for this record."""
    mode = config.selection
    if mode == "auto":
        if record.preselected_topn is not None:
            mode = "preselected"
        elif record.justification.strip():
            mode = "oracle"
        else:
            mode = "lead"
    if mode == "preselected":
        if record.preselected_topn is None:
            raise EmptySelection(f"{record.claim_id}: no preselected_topn in record")
        original_to_kept = {orig: pos for pos, orig in enumerate(index_map)}
        positions = [
            original_to_kept[i] for i in record.preselected_topn if i in original_to_kept
        ]
        if not positions:
            raise EmptySelection(f"{record.claim_id}: preselected sentences all filtered out")
        return positions
    if mode == "oracle":
        if not record.justification.strip():
            raise DataError(f"{record.claim_id}: missing field 'justification' for oracle selection")
        return greedy_oracle_select(kept, record.justification, config.k)
    return list(range(min(config.n, len(kept))))


def _trees_for_selection(record: ClaimRecord, index_map: list[int], positions: list[int]):
    if record.parses is None:
        return None
    trees = []
    for pos in positions:
        original = index_map[pos]
        try:
            trees.append(parse_bracketed(record.parses[original]))
        except PosteditError:
            trees.append(None)
    return trees


def _process_record(
    idx: int,
    record: ClaimRecord,
    config: PipelineConfig,
    backend,
    paraphrase_backend,
    rules: GrammarRuleSet,
) -> InstanceOutput:
    kept, index_map = filter_rc_sentences(
        list(record.ruling_sentences), config.filter_max_len, config.drop_questions
    )
    positions = _select_indices(record, kept, index_map, config)
    topn_text = " ".join(kept[p].strip() for p in positions)
    stage_texts = {"topn": topn_text}
    trace = None

    if config.stages.edits:
        expl = tokenize(topn_text)
        trees = _trees_for_selection(record, index_map, positions)
        if trees is not None and len(expl.sentence_bounds) != len(trees):
            trees = None
        edit_config = dataclasses.replace(config.edit, rng_seed=config.seed ^ idx)
        best, trace = run_search(expl, trees, edit_config, backend)
        edited_text = detokenize(best)
        if config.stages.grammar:
            edited_text = grammar_correct(edited_text, rules)
            dropped = drop_verbless_sentences(tokenize(edited_text), rules)
            edited_text = detokenize(dropped.explanation)
        stage_texts["edits"] = edited_text

        if config.stages.paraphrase:
            result = paraphrase(edited_text, paraphrase_backend)
            stage_texts["para"] = result.text

    return InstanceOutput(record=record, stage_texts=stage_texts, trace=trace)


def _stage_methods(config: PipelineConfig) -> list[tuple[str, str]]:
    n = config.n
    methods = [("topn", f"Top-{n}")]
    if config.stages.edits:
        methods.append(("edits", f"Top-{n}+Edits-{n}"))
    if config.stages.paraphrase:
        methods.append(("para", f"Top-{n}+Edits-{n}+Para"))
    return methods


def _evaluate(
    config: PipelineConfig, outputs: list[InstanceOutput], n_failures: int
) -> EvalReport:
    report = EvalReport(
        dataset=config.dataset,
        n=config.n,
        k=config.k,
        seed=config.seed,
        instances=len(outputs) + n_failures,
        failures=n_failures,
    )
    for stage_index, (stage, method) in enumerate(_stage_methods(config)):
        rows: list[InstanceScores] = []
        copy_stats: list[tuple[float, float, float]] = []
        for out in outputs:
            text = out.stage_texts[stage]
            gold = out.record.justification
            source = " ".join(out.record.ruling_sentences)
            try:
                flesch = flesch_reading_ease(text)
                dc = dale_chall(text)
            except UndefinedMetric:
                flesch, dc = 0.0, 0.0
            rows.append(
                InstanceScores(
                    id=out.record.claim_id,
                    rouge1=rouge_n_f1(text, gold, 1),
                    rouge2=rouge_n_f1(text, gold, 2),
                    rougeL=rouge_l_f1(text, gold),
                    flesch=flesch,
                    dale_chall=dc,
                )
            )
            copy_stats.append(copy_novelty_coverage(source, text, gold))
        report.stages.append(
            summarize_stage(method, rows, copy_stats, seed=config.seed + 100 * stage_index)
        )
    return report


def _atomic_write(path: Path, content: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(content, encoding="utf-8")
    os.replace(tmp, path)


def write_report(report: EvalReport, out_dir: str | Path) -> tuple[Path, Path]:
    """Emit report.json and the aligned report.txt table; overwrites are
    atomic so a rerun never leaves a torn file."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / "report.json"
    txt_path = out / "report.txt"
    _atomic_write(json_path, json.dumps(report.to_dict(), indent=2) + "\n")
    _atomic_write(txt_path, format_report_table(report))
    return json_path, txt_path


def run_pipeline(config: PipelineConfig) -> PipelineResult:
    """Process every record through the enabled stages, evaluate each stage,
    and write outputs, traces, and reports under the output directory."""
    require_gold = config.selection == "oracle"
    records = load_dataset(config.dataset, require_gold=require_gold)

    if config.backend == "baseline":
        corpus = [s for r in records for s in r.ruling_sentences]
        backend = BaselineBackend.from_corpus(corpus)
        paraphrase_backend = None
    else:
        backend = RemoteBackend(config.remote)
        paraphrase_backend = backend

    rules = GrammarRuleSet.default()
    outputs: list[InstanceOutput] = []
    failures: list[tuple[str, str]] = []

    def work(item: tuple[int, ClaimRecord]):
        idx, record = item
        try:
            return _process_record(idx, record, config, backend, paraphrase_backend, rules)
        except PosteditError as exc:
            return (record.claim_id, f"{type(exc).__name__}: {exc}")

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        for result in pool.map(work, enumerate(records)):
            if isinstance(result, InstanceOutput):
                outputs.append(result)
            else:
                log.warning("record %s failed: %s", result[0], result[1])
                failures.append(result)

    report = _evaluate(config, outputs, len(failures))

    out_dir = Path(config.out_dir)
    (out_dir / "outputs").mkdir(parents=True, exist_ok=True)
    for stage, _ in _stage_methods(config):
        lines = [
            json.dumps({"claim_id": o.record.claim_id, "text": o.stage_texts[stage]})
            for o in outputs
        ]
        _atomic_write(out_dir / "outputs" / f"{stage}.jsonl", "\n".join(lines) + "\n")
    if config.stages.edits:
        traces_dir = out_dir / "traces"
        traces_dir.mkdir(parents=True, exist_ok=True)
        for o in outputs:
            if o.trace is not None:
                _atomic_write(traces_dir / f"{o.record.claim_id}.jsonl", o.trace.to_jsonl())
    if failures:
        _atomic_write(
            out_dir / "failures.jsonl",
            "\n".join(json.dumps({"claim_id": c, "error": e}) for c, e in failures) + "\n",
        )
    write_report(report, out_dir)
    return PipelineResult(report=report, outputs=outputs, failures=failures, out_dir=out_dir)
