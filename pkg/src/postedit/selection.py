"""Building the input sentences for post-editing: record schema, ruling
comment filtering, and the greedy bigram-overlap oracle selector."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptySelection
from .metrics import rouge_n_f1
from .textcore import tokenize

__all__ = ["ClaimRecord", "filter_rc_sentences", "greedy_oracle_select"]

DEFAULT_MAX_SENTENCE_TOKENS = 60


@dataclass(frozen=True)
class ClaimRecord:
    """One claim with its ruling comment sentences and gold justification."""

    claim_id: str
    claim: str
    label: str
    ruling_sentences: tuple[str, ...]
    justification: str = ""
    preselected_topn: tuple[int, ...] | None = None
    parses: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.preselected_topn is not None:
            for i in self.preselected_topn:
                if not 0 <= i < len(self.ruling_sentences):
                    raise ValueError(
                        f"preselected index {i} out of range for "
                        f"{len(self.ruling_sentences)} ruling sentences"
                    )
        if self.parses is not None and len(self.parses) != len(self.ruling_sentences):
            raise ValueError("parses must align 1:1 with ruling_sentences")


def filter_rc_sentences(
    sentences: list[str],
    max_len: int = DEFAULT_MAX_SENTENCE_TOKENS,
    drop_questions: bool = True,
) -> tuple[list[str], list[int]]:
    """Drop overlong sentences and questions, preserving order.

    Returns the kept sentences and a map from kept position to original
    index.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    kept: list[str] = []
    index_map: list[int] = []
    for i, sent in enumerate(sentences):
        stripped = sent.strip()
        if not stripped:
            continue
        if drop_questions and stripped.endswith("?"):
            continue
        if tokenize(stripped).n_tokens > max_len:
            continue
        kept.append(sent)
        index_map.append(i)
    if not kept:
        raise EmptySelection("filtering removed every ruling comment sentence")
    return kept, index_map


def greedy_oracle_select(sentences: list[str], gold: str, k: int) -> list[int]:
    """Greedy forward selection of up to k sentences maximizing bigram-overlap
    F1 of the concatenated selection against the gold justification.

    Ties break toward the lowest index; selection stops early once no
    remaining sentence strictly improves the score.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not sentences:
        raise ValueError("sentences must be non-empty")

    selected: list[int] = []
    best_score = 0.0
    for _ in range(k):
        round_best: tuple[float, int] | None = None
        for i, sent in enumerate(sentences):
            if i in selected:
                continue
            candidate = " ".join([sentences[j] for j in selected] + [sent])
            score = rouge_n_f1(candidate, gold, 2)
            if round_best is None or score > round_best[0]:
                round_best = (score, i)
        if round_best is None or round_best[0] <= best_score:
            break
        best_score = round_best[0]
        selected.append(round_best[1])
    return selected
