"""Iterative phrase-level edit search.

Each step draws one operation (insert / delete / reorder) uniformly at
random, proposes an edited candidate at a randomly chosen phrase span, scores
it against the original source, and accepts it when the log-score gain
exceeds the operation's log threshold. Phrase spans are re-derived from the
current state every step; supplied parse trees are trusted only at step 0,
after which edits have invalidated them and the heuristic chunker takes over.
"""
from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ProposalFailed, ScorerUnavailable
from .scoring import (
    ScorerBackend,
    ScorerWeights,
    fluency_log_score,
    prepare_source,
    total_log_score,
)
from .textcore import (
    DEFAULT_PHRASE_LABELS,
    Explanation,
    ParseTree,
    PhraseSpan,
    build_explanation,
    detokenize,
    extract_phrases,
    heuristic_chunk,
)

__all__ = [
    "EditConfig",
    "EditStep",
    "EditTrace",
    "Proposal",
    "OPERATIONS",
    "propose_insertion",
    "propose_deletion",
    "propose_reorder",
    "accept",
    "run_search",
    "apply_insertion",
    "apply_deletion",
    "apply_swap",
]

OPERATIONS = ("insert", "delete", "reorder")

# Mask fillers may surface model-control tokens; never insert these.
SPECIAL_TOKENS = {"<s>", "</s>", "<mask>", "<pad>", "<unk>", "[CLS]", "[SEP]", "[MASK]", "[PAD]"}

MASK_FILL_CANDIDATES = 10


@dataclass(frozen=True)
class EditConfig:
    """Search hyperparameters. The defaults are the tuned operating point:
    220 steps, per-operation thresholds 1.10 / 0.97 / 0.94, and a 40-token
    floor on candidate length."""

    n_steps: int = 220
    r_insert: float = 1.10
    r_delete: float = 0.97
    r_reorder: float = 0.94
    min_tokens: int = 40
    m_anchors: int = 3
    weights: ScorerWeights = field(default_factory=ScorerWeights)
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_steps < 0:
            raise ValueError("n_steps must be >= 0")
        if min(self.r_insert, self.r_delete, self.r_reorder) <= 0:
            raise ValueError("acceptance thresholds must be > 0")
        if self.min_tokens < 1:
            raise ValueError("min_tokens must be >= 1")
        if self.m_anchors < 1:
            raise ValueError("m_anchors must be >= 1")

    def threshold(self, op: str) -> float:
        return {"insert": self.r_insert, "delete": self.r_delete, "reorder": self.r_reorder}[op]


@dataclass(frozen=True)
class EditStep:
    step: int
    op: str
    spans: tuple[tuple[int, int], ...]
    cand_hash: str | None
    prev_log: float
    cand_log: float | None
    accepted: bool

    def to_record(self) -> dict:
        return {
            "step": self.step,
            "op": self.op,
            "span": [list(s) for s in self.spans],
            "prev_log": self.prev_log,
            "cand_log": self.cand_log,
            "accepted": self.accepted,
        }


@dataclass
class EditTrace:
    """Audit log of every step's proposal and acceptance decision."""

    steps: list[EditStep] = field(default_factory=list)
    initial_log: float | None = None
    skipped_short_input: bool = False

    def to_jsonl(self) -> str:
        return "\n".join(json.dumps(s.to_record()) for s in self.steps) + (
            "\n" if self.steps else ""
        )


@dataclass(frozen=True)
class Proposal:
    explanation: Explanation
    spans: tuple[tuple[int, int], ...]
    inserted_word: str | None = None


def _text_hash(expl: Explanation) -> str:
    return hashlib.sha1(detokenize(expl).encode("utf-8")).hexdigest()


def apply_insertion(state: Explanation, position: int, word: str) -> Explanation:
    texts = state.token_texts()
    texts.insert(position, word)
    si = state.sentence_index_of(min(position, state.n_tokens - 1))
    bounds = []
    for i, (s, e) in enumerate(state.sentence_bounds):
        if i < si:
            bounds.append((s, e))
        elif i == si:
            bounds.append((s, e + 1))
        else:
            bounds.append((s + 1, e + 1))
    return build_explanation(texts, bounds)


def apply_deletion(state: Explanation, span: tuple[int, int]) -> Explanation:
    start, end = span
    width = end - start
    texts = state.token_texts()
    del texts[start:end]
    si = state.sentence_index_of(start)
    bounds = []
    for i, (s, e) in enumerate(state.sentence_bounds):
        if i < si:
            bounds.append((s, e))
        elif i == si:
            if e - s > width:
                bounds.append((s, e - width))
        else:
            bounds.append((s - width, e - width))
    return build_explanation(texts, bounds)


def apply_swap(state: Explanation, a: tuple[int, int], b: tuple[int, int]) -> Explanation:
    """Exchange two disjoint token spans; the token multiset is unchanged."""
    if a[0] > b[0]:
        a, b = b, a
    if a[1] > b[0]:
        raise ValueError(f"spans {a} and {b} overlap")
    texts = state.token_texts()
    new_texts = (
        texts[: a[0]] + texts[b[0] : b[1]] + texts[a[1] : b[0]] + texts[a[0] : a[1]] + texts[b[1] :]
    )
    delta = (b[1] - b[0]) - (a[1] - a[0])
    sa = state.sentence_index_of(a[0])
    sb = state.sentence_index_of(b[0])
    sizes = [e - s for s, e in state.sentence_bounds]
    sizes[sa] += delta
    sizes[sb] -= delta
    bounds = []
    cursor = 0
    for size in sizes:
        bounds.append((cursor, cursor + size))
        cursor += size
    return build_explanation(new_texts, bounds)


def propose_insertion(
    state: Explanation,
    phrases: Sequence[PhraseSpan],
    rng: random.Random,
    backend: ScorerBackend,
) -> Proposal:
    """Insert a mask slot before a random phrase and fill it with the most
    probable non-punctuation word from the backend."""
    if not phrases:
        raise ProposalFailed("no phrases to insert before")
    phrase = phrases[rng.randrange(len(phrases))]
    position = phrase.range[0]
    candidates = backend.mask_fill(state.token_texts(), position, MASK_FILL_CANDIDATES)
    word = next(
        (
            w
            for w, _ in candidates
            if w not in SPECIAL_TOKENS and any(ch.isalnum() for ch in w)
        ),
        None,
    )
    if word is None:
        raise ProposalFailed("mask fill produced no usable word")
    return Proposal(
        explanation=apply_insertion(state, position, word),
        spans=(phrase.range,),
        inserted_word=word,
    )


def propose_deletion(
    state: Explanation,
    phrases: Sequence[PhraseSpan],
    rng: random.Random,
    min_tokens: int = 40,
) -> Proposal:
    """Delete a random phrase, refusing edits that would under-run the
    minimum length."""
    if not phrases:
        raise ProposalFailed("no phrases to delete")
    phrase = phrases[rng.randrange(len(phrases))]
    width = phrase.range[1] - phrase.range[0]
    if state.n_tokens - width < min_tokens:
        raise ProposalFailed(
            f"deletion of {width} tokens would leave fewer than {min_tokens}"
        )
    return Proposal(explanation=apply_deletion(state, phrase.range), spans=(phrase.range,))


def _disjoint(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[1] <= b[0] or b[1] <= a[0]


def propose_reorder(
    state: Explanation,
    phrases: Sequence[PhraseSpan],
    rng: random.Random,
    m: int,
    backend: ScorerBackend,
) -> Proposal:
    """Swap a random reorder phrase with each of up to m disjoint anchor
    phrases and keep the most fluent arrangement."""
    if len(phrases) < 2:
        raise ProposalFailed("need at least two phrases to reorder")
    reorder_phrase = phrases[rng.randrange(len(phrases))]
    pool = [p for p in phrases if _disjoint(p.range, reorder_phrase.range)]
    if not pool:
        raise ProposalFailed("no anchor phrase disjoint from the reorder phrase")
    order = list(range(len(pool)))
    rng.shuffle(order)
    anchors: list[PhraseSpan] = []
    for idx in order:
        candidate = pool[idx]
        if all(_disjoint(candidate.range, a.range) for a in anchors):
            anchors.append(candidate)
        if len(anchors) == m:
            break

    best: tuple[float, Explanation, PhraseSpan] | None = None
    for anchor in anchors:
        swapped = apply_swap(state, reorder_phrase.range, anchor.range)
        score = fluency_log_score(swapped, backend)
        if best is None or score > best[0]:
            best = (score, swapped, anchor)
    assert best is not None
    return Proposal(explanation=best[1], spans=(reorder_phrase.range, best[2].range))


def accept(prev_log: float, cand_log: float, r_op: float) -> bool:
    """Accept when the candidate beats the previous state by more than the
    operation's multiplicative factor; strict, in log space."""
    return cand_log - prev_log > math.log(r_op)


def _phrases_for(
    state: Explanation,
    trees: Sequence[ParseTree | None] | None,
    allowed_labels: frozenset[str],
) -> list[PhraseSpan]:
    """Phrase spans for the current state; per-sentence parse trees are used
    where they still align with the tokens, the chunker elsewhere."""
    if trees is None:
        return heuristic_chunk(state)
    chunks_by_sentence: dict[int, list[PhraseSpan]] = {}
    for span in heuristic_chunk(state):
        chunks_by_sentence.setdefault(span.sentence_index, []).append(span)
    spans: list[PhraseSpan] = []
    for si, (start, end) in enumerate(state.sentence_bounds):
        tree = trees[si] if si < len(trees) else None
        if tree is not None and len(tree.leaves()) == end - start:
            spans.extend(
                extract_phrases(
                    tree, allowed_labels, sentence_index=si, token_offset=start
                )
            )
        else:
            spans.extend(chunks_by_sentence.get(si, []))
    return spans


def run_search(
    src: Explanation,
    trees: Sequence[ParseTree | None] | None,
    config: EditConfig,
    backend: ScorerBackend,
    allowed_labels: frozenset[str] = DEFAULT_PHRASE_LABELS,
) -> tuple[Explanation, EditTrace]:
    """Run the n-step edit search and return the best-scoring state visited
    (the initial state included) along with the full trace.

    Inputs shorter than the minimum length are returned unchanged with the
    trace flagged. A backend failure raises ScorerUnavailable carrying the
    partial trace.
    """
    trace = EditTrace()
    if src.n_tokens < config.min_tokens:
        trace.skipped_short_input = True
        return src, trace

    rng = random.Random(config.rng_seed)
    profile = prepare_source(src, backend)
    current = src
    current_log = total_log_score(src, src, backend, config.weights, profile).log_total
    trace.initial_log = current_log
    best, best_log = current, current_log

    for step in range(config.n_steps):
        op = OPERATIONS[rng.randrange(len(OPERATIONS))]
        phrases = _phrases_for(current, trees if step == 0 else None, allowed_labels)
        try:
            if op == "insert":
                proposal = propose_insertion(current, phrases, rng, backend)
            elif op == "delete":
                proposal = propose_deletion(current, phrases, rng, config.min_tokens)
            else:
                proposal = propose_reorder(current, phrases, rng, config.m_anchors, backend)
        except ProposalFailed:
            trace.steps.append(
                EditStep(
                    step=step,
                    op=op,
                    spans=(),
                    cand_hash=None,
                    prev_log=current_log,
                    cand_log=None,
                    accepted=False,
                )
            )
            continue
        except ScorerUnavailable as exc:
            raise ScorerUnavailable(str(exc), trace=trace) from exc

        try:
            cand_log = total_log_score(
                src, proposal.explanation, backend, config.weights, profile
            ).log_total
        except ScorerUnavailable as exc:
            raise ScorerUnavailable(str(exc), trace=trace) from exc

        accepted = accept(current_log, cand_log, config.threshold(op))
        trace.steps.append(
            EditStep(
                step=step,
                op=op,
                spans=proposal.spans,
                cand_hash=_text_hash(proposal.explanation),
                prev_log=current_log,
                cand_log=cand_log,
                accepted=accepted,
            )
        )
        if accepted:
            current, current_log = proposal.explanation, cand_log
            if cand_log > best_log:
                best, best_log = current, cand_log

    return best, trace
