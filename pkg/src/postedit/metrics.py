"""Evaluation metrics: n-gram and LCS overlap F1, readability formulas,
percentile-bootstrap confidence intervals, and copy/novelty statistics."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import UndefinedMetric
from .textcore import tokenize
from .wordlists import familiar_words

__all__ = [
    "rouge_n_f1",
    "rouge_l_f1",
    "flesch_reading_ease",
    "flesch_band",
    "dale_chall",
    "count_syllables",
    "bootstrap_ci",
    "copy_novelty_coverage",
    "InstanceScores",
    "MetricSummary",
    "StageReport",
    "EvalReport",
]

BOOTSTRAP_RESAMPLES = 1000
CONFIDENCE_LEVEL = 0.95


def _metric_tokens(text: str) -> list[str]:
    """Lowercased tokens with punctuation retained; empty list for blank text."""
    if not text or not text.strip():
        return []
    return [t.text.lower() for t in tokenize(text).tokens]


def _word_tokens(text: str) -> list[str]:
    """Lowercased tokens with punctuation excluded."""
    if not text or not text.strip():
        return []
    return [t.text.lower() for t in tokenize(text).tokens if not t.is_punct]


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def rouge_n_f1(candidate: str, reference: str, n: int) -> float:
    """Clipped n-gram overlap F1 between candidate and reference."""
    if n not in (1, 2):
        raise ValueError("n must be 1 or 2")
    cand = _metric_tokens(candidate)
    ref = _metric_tokens(reference)
    cand_grams = Counter(tuple(cand[i : i + n]) for i in range(len(cand) - n + 1))
    ref_grams = Counter(tuple(ref[i : i + n]) for i in range(len(ref) - n + 1))
    if not cand_grams and not ref_grams:
        return 0.0
    if not cand_grams or not ref_grams:
        return 0.0
    overlap = sum(min(c, ref_grams[g]) for g, c in cand_grams.items())
    precision = overlap / sum(cand_grams.values())
    recall = overlap / sum(ref_grams.values())
    return _f1(precision, recall)


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0]
        for j, y in enumerate(b, start=1):
            curr.append(prev[j - 1] + 1 if x == y else max(prev[j], curr[j - 1]))
        prev = curr
    return prev[-1]


def rouge_l_f1(candidate: str, reference: str) -> float:
    """Longest-common-subsequence F1 between candidate and reference."""
    cand = _metric_tokens(candidate)
    ref = _metric_tokens(reference)
    if not cand or not ref:
        return 0.0
    lcs = _lcs_length(cand, ref)
    return _f1(lcs / len(cand), lcs / len(ref))


_VOWELS = set("aeiouy")


def count_syllables(word: str) -> int:
    """Vowel-group heuristic: count vowel clusters, drop a silent trailing
    'e', never return less than 1."""
    w = "".join(ch for ch in word.lower() if ch.isalpha())
    if not w:
        return 0
    groups = 0
    prev_vowel = False
    for ch in w:
        is_vowel = ch in _VOWELS
        if is_vowel and not prev_vowel:
            groups += 1
        prev_vowel = is_vowel
    if w.endswith("e") and not w.endswith("le") and groups > 1:
        groups -= 1
    return max(groups, 1)


def _words_and_sentences(text: str) -> tuple[list[str], int]:
    if not text or not text.strip():
        raise UndefinedMetric("readability is undefined for empty text")
    expl = tokenize(text)
    words = [t.text for t in expl.tokens if not t.is_punct]
    if not words:
        raise UndefinedMetric("readability is undefined for text with no words")
    return words, len(expl.sentence_bounds)


def flesch_reading_ease(text: str) -> float:
    """206.835 - 1.015 * (words per sentence) - 84.6 * (syllables per word)."""
    words, n_sentences = _words_and_sentences(text)
    syllables = sum(count_syllables(w) for w in words)
    return 206.835 - 1.015 * (len(words) / n_sentences) - 84.6 * (syllables / len(words))


def flesch_band(score: float) -> str:
    """Reading-difficulty label for a reading-ease score."""
    if score < 30:
        return "very difficult"
    if score <= 50:
        return "difficult"
    if score <= 60:
        return "fairly difficult"
    if score <= 70:
        return "plain English"
    return "easy"


def dale_chall(text: str, familiar: frozenset[str] | set[str] | None = None) -> float:
    """0.1579 * (percent unfamiliar words) + 0.0496 * (words per sentence),
    plus 3.6365 when more than 5 percent of words are unfamiliar."""
    words, n_sentences = _words_and_sentences(text)
    fam = familiar_words() if familiar is None else familiar
    unfamiliar = sum(1 for w in words if w.lower() not in fam)
    pct_unfamiliar = 100.0 * unfamiliar / len(words)
    score = 0.1579 * pct_unfamiliar + 0.0496 * (len(words) / n_sentences)
    if pct_unfamiliar > 5.0:
        score += 3.6365
    return score


def bootstrap_ci(
    values: Sequence[float],
    resamples: int = BOOTSTRAP_RESAMPLES,
    level: float = CONFIDENCE_LEVEL,
    seed: int = 0,
) -> tuple[float, float]:
    """Percentile bootstrap interval for the mean."""
    if len(values) == 0:
        raise ValueError("values must be non-empty")
    if resamples < 1:
        raise ValueError("resamples must be >= 1")
    if not 0 < level < 1:
        raise ValueError("level must be in (0, 1)")
    arr = np.asarray(values, dtype=float)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(arr), size=(resamples, len(arr)))
    means = arr[idx].mean(axis=1)
    lo = (1 - level) / 2
    return (
        float(np.quantile(means, lo)),
        float(np.quantile(means, 1 - lo)),
    )


def copy_novelty_coverage(
    source_rcs: str, output: str, gold: str
) -> tuple[float, float, float]:
    """Fraction of output word tokens found in the source vocabulary, its
    complement, and the fraction found in the gold vocabulary."""
    out_words = _word_tokens(output)
    if not out_words:
        return (0.0, 0.0, 0.0)
    source_vocab = set(_word_tokens(source_rcs))
    gold_vocab = set(_word_tokens(gold))
    copied = sum(1 for w in out_words if w in source_vocab)
    in_gold = sum(1 for w in out_words if w in gold_vocab)
    copy_rate = copied / len(out_words)
    return (copy_rate, 1.0 - copy_rate, in_gold / len(out_words))


@dataclass(frozen=True)
class InstanceScores:
    id: str
    rouge1: float
    rouge2: float
    rougeL: float
    flesch: float
    dale_chall: float

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "rouge1": self.rouge1,
            "rouge2": self.rouge2,
            "rougeL": self.rougeL,
            "flesch": self.flesch,
            "dale_chall": self.dale_chall,
        }


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    ci_low: float
    ci_high: float

    def to_dict(self) -> dict:
        return {"mean": self.mean, "ci": [self.ci_low, self.ci_high]}


METRIC_NAMES = ("flesch", "dale_chall", "rouge1", "rouge2", "rougeL")


@dataclass
class StageReport:
    method: str
    rows: list[InstanceScores]
    summaries: dict[str, MetricSummary]
    copy_rate: float
    novelty: float
    gold_coverage: float
    flesch_band: str

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "metrics": {name: self.summaries[name].to_dict() for name in METRIC_NAMES},
            "flesch_band": self.flesch_band,
            "copy_rate": self.copy_rate,
            "novelty": self.novelty,
            "gold_coverage": self.gold_coverage,
            "rows": [r.to_dict() for r in self.rows],
        }


@dataclass
class EvalReport:
    dataset: str
    n: int
    k: int
    seed: int
    instances: int
    failures: int
    stages: list[StageReport] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "n": self.n,
            "k": self.k,
            "seed": self.seed,
            "instances": self.instances,
            "failures": self.failures,
            "stages": [s.to_dict() for s in self.stages],
        }


def summarize_stage(
    method: str,
    rows: list[InstanceScores],
    copy_novelty: list[tuple[float, float, float]],
    seed: int,
) -> StageReport:
    summaries: dict[str, MetricSummary] = {}
    for offset, name in enumerate(METRIC_NAMES):
        attr = {"rouge1": "rouge1", "rouge2": "rouge2", "rougeL": "rougeL",
                "flesch": "flesch", "dale_chall": "dale_chall"}[name]
        values = [getattr(r, attr) for r in rows]
        lo, hi = bootstrap_ci(values, seed=seed + offset)
        summaries[name] = MetricSummary(mean=float(np.mean(values)), ci_low=lo, ci_high=hi)
    copy_rate = float(np.mean([c for c, _, _ in copy_novelty]))
    novelty = float(np.mean([n for _, n, _ in copy_novelty]))
    coverage = float(np.mean([g for _, _, g in copy_novelty]))
    return StageReport(
        method=method,
        rows=rows,
        summaries=summaries,
        copy_rate=copy_rate,
        novelty=novelty,
        gold_coverage=coverage,
        flesch_band=flesch_band(summaries["flesch"].mean),
    )


def format_report_table(report: EvalReport) -> str:
    """Aligned plain-text table: one row per method, readability and overlap
    columns with confidence intervals."""
    headers = [
        "Method",
        "Flesch",
        "Flesch CI",
        "Dale-Chall",
        "Dale-Chall CI",
        "R-1",
        "R-1 CI",
        "R-2",
        "R-2 CI",
        "R-L",
        "R-L CI",
    ]
    rows = [headers]
    for stage in report.stages:
        s = stage.summaries

        def ci(name: str) -> str:
            m = s[name]
            return f"[{m.ci_low:.2f}-{m.ci_high:.2f}]"

        rows.append(
            [
                stage.method,
                f"{s['flesch'].mean:.2f}",
                ci("flesch"),
                f"{s['dale_chall'].mean:.2f}",
                ci("dale_chall"),
                f"{s['rouge1'].mean * 100:.2f}",
                ci_pct(s["rouge1"]),
                f"{s['rouge2'].mean * 100:.2f}",
                ci_pct(s["rouge2"]),
                f"{s['rougeL'].mean * 100:.2f}",
                ci_pct(s["rougeL"]),
            ]
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(headers))]
    lines = []
    for r in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(r)).rstrip())
    band_notes = [
        f"{stage.method}: Flesch band '{stage.flesch_band}', "
        f"copy rate {stage.copy_rate * 100:.1f}, novelty {stage.novelty * 100:.1f}, "
        f"gold coverage {stage.gold_coverage * 100:.1f}"
        for stage in report.stages
    ]
    return "\n".join(lines) + "\n\n" + "\n".join(band_notes) + "\n"


def ci_pct(m: MetricSummary) -> str:
    return f"[{m.ci_low * 100:.2f}-{m.ci_high * 100:.2f}]"
