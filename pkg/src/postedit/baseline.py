"""Deterministic, dependency-free scorer backends.

These stand in for the neural models behind the scoring function so the full
search and evaluation stack runs offline and reproducibly: an add-k smoothed
n-gram language model, PPMI count embeddings, and a capitalization-based
entity counter.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyCorpus
from .textcore import tokenize

__all__ = [
    "NgramModel",
    "train_ngram",
    "baseline_mask_fill",
    "CountEmbeddings",
    "heuristic_entity_count",
    "BaselineBackend",
]

START = "<s>"
END = "</s>"

FALLBACK_COMPONENT = 1e-8


def _sentence_token_lists(corpus: Iterable[str]) -> list[list[str]]:
    """Lowercased token lists, one per sentence, across all corpus entries."""
    out: list[list[str]] = []
    for entry in corpus:
        if not entry or not entry.strip():
            continue
        expl = tokenize(entry)
        for start, end in expl.sentence_bounds:
            out.append([t.text.lower() for t in expl.tokens[start:end]])
    return out


@dataclass(frozen=True)
class NgramModel:
    """Add-k smoothed n-gram model over lowercased tokens.

    The event space for every context is the vocabulary plus the end marker,
    so conditional probabilities sum to 1 per context.
    """

    order: int
    counts: dict[tuple[str, ...], int]
    context_counts: dict[tuple[str, ...], int]
    vocab: frozenset[str]
    k: float

    @property
    def n_events(self) -> int:
        return len(self.vocab) + 1  # + end marker

    def cond_prob(self, word: str, context: Sequence[str]) -> float:
        ctx = tuple(context[-(self.order - 1):]) if self.order > 1 else ()
        num = self.counts.get(ctx + (word,), 0) + self.k
        den = self.context_counts.get(ctx, 0) + self.k * self.n_events
        return num / den

    def sequence_logprobs(self, tokens: Sequence[str]) -> list[float]:
        """One log-probability per token; the end-marker transition is folded
        into the final position so the sum is the full joint log-likelihood."""
        words = [t.lower() for t in tokens]
        context = [START] * (self.order - 1)
        out: list[float] = []
        for w in words:
            out.append(math.log(self.cond_prob(w, context)))
            context.append(w)
        if out:
            out[-1] += math.log(self.cond_prob(END, context))
        return out


def train_ngram(corpus: Sequence[str], order: int = 2, k: float = 1.0) -> NgramModel:
    """Count n-grams over sentence-padded lowercased tokens."""
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2, or 3, got {order}")
    if k <= 0:
        raise ValueError("smoothing constant k must be > 0")
    sentences = _sentence_token_lists(corpus)
    if not sentences:
        raise EmptyCorpus("cannot train an n-gram model on an empty corpus")

    counts: Counter[tuple[str, ...]] = Counter()
    context_counts: Counter[tuple[str, ...]] = Counter()
    vocab: set[str] = set()
    pad = order - 1
    for sent in sentences:
        vocab.update(sent)
        padded = [START] * pad + sent + [END]
        for i in range(pad, len(padded)):
            ctx = tuple(padded[i - pad : i])
            counts[ctx + (padded[i],)] += 1
            context_counts[ctx] += 1
    return NgramModel(
        order=order,
        counts=dict(counts),
        context_counts=dict(context_counts),
        vocab=frozenset(vocab),
        k=k,
    )


def baseline_mask_fill(
    model: NgramModel,
    tokens: Sequence[str],
    mask_index: int,
    top_k: int = 10,
) -> list[tuple[str, float]]:
    """Score every vocabulary word for a mask slot between tokens.

    A word w is scored by P(w | left context) * P(right neighbor | ...w),
    renormalized over the vocabulary. Ties break alphabetically.
    """
    if not 0 <= mask_index <= len(tokens):
        raise ValueError(f"mask_index {mask_index} out of range")
    left = [START] * (model.order - 1) + [t.lower() for t in tokens[:mask_index]]
    right = tokens[mask_index].lower() if mask_index < len(tokens) else END

    words = sorted(model.vocab)
    scores = []
    for w in words:
        p = model.cond_prob(w, left) * model.cond_prob(right, left + [w])
        scores.append(p)
    total = sum(scores)
    ranked = sorted(zip(words, scores), key=lambda ws: (-ws[1], ws[0]))
    return [(w, s / total) for w, s in ranked[:top_k]]


@dataclass(frozen=True)
class CountEmbeddings:
    """Word vectors from windowed co-occurrence counts with PPMI weighting,
    truncated to a fixed dimension.

    The last component is log(1 + frequency), which keeps every in-vocabulary
    vector nonzero; out-of-vocabulary words share a tiny fallback vector.
    """

    dimension: int
    table: dict[str, np.ndarray] = field(repr=False)

    def vector(self, word: str) -> np.ndarray:
        vec = self.table.get(word.lower())
        if vec is None:
            return np.full(self.dimension, FALLBACK_COMPONENT)
        return vec

    def is_known(self, word: str) -> bool:
        return word.lower() in self.table

    def token_vectors(self, tokens: Sequence[str]) -> np.ndarray:
        if not tokens:
            return np.zeros((0, self.dimension))
        return np.stack([self.vector(t) for t in tokens])

    def text_vector(self, text: str) -> np.ndarray:
        """Mean of member word vectors (punctuation tokens excluded)."""
        expl = tokenize(text)
        words = [t.text for t in expl.tokens if not t.is_punct]
        if not words:
            return np.full(self.dimension, FALLBACK_COMPONENT)
        return self.token_vectors(words).mean(axis=0)


def build_count_embeddings(
    corpus: Sequence[str], dimension: int = 32, window: int = 2
) -> CountEmbeddings:
    sentences = _sentence_token_lists(corpus)
    if not sentences:
        raise EmptyCorpus("cannot build embeddings from an empty corpus")

    freq: Counter[str] = Counter()
    pair: Counter[tuple[str, str]] = Counter()
    for sent in sentences:
        words = [w for w in sent if any(ch.isalnum() for ch in w)]
        freq.update(words)
        for i, w in enumerate(words):
            for j in range(max(0, i - window), min(len(words), i + window + 1)):
                if j != i:
                    pair[(w, words[j])] += 1

    features = [w for w, _ in freq.most_common(dimension - 1)]
    feat_index = {w: i for i, w in enumerate(features)}
    total_pairs = sum(pair.values()) or 1
    ctx_totals: Counter[str] = Counter()
    word_totals: Counter[str] = Counter()
    for (w, c), n in pair.items():
        word_totals[w] += n
        ctx_totals[c] += n

    table: dict[str, np.ndarray] = {}
    for w in freq:
        vec = np.zeros(dimension)
        for c, i in feat_index.items():
            n = pair.get((w, c), 0)
            if n:
                pmi = math.log(
                    (n / total_pairs)
                    / ((word_totals[w] / total_pairs) * (ctx_totals[c] / total_pairs))
                )
                vec[i] = max(0.0, pmi)
        vec[dimension - 1] = math.log(1 + freq[w])
        table[w] = vec
    return CountEmbeddings(dimension=dimension, table=table)


def heuristic_entity_count(text: str, gazetteer: frozenset[str] | set[str] = frozenset()) -> int:
    """Count maximal runs of capitalized tokens that do not sit at a sentence
    start, plus gazetteer phrase hits outside those runs."""
    try:
        expl = tokenize(text)
    except Exception:
        return 0
    sentence_starts = {start for start, _ in expl.sentence_bounds}

    def eligible(i: int) -> bool:
        tok = expl.tokens[i]
        return (
            i not in sentence_starts
            and tok.text[0].isalpha()
            and tok.text[0].isupper()
        )

    runs: list[tuple[int, int]] = []
    i = 0
    n = len(expl.tokens)
    while i < n:
        if eligible(i):
            j = i
            while j < n and eligible(j):
                j += 1
            runs.append((i, j))
            i = j
        else:
            i += 1

    count = len(runs)
    if gazetteer:
        lowered = [t.text.lower() for t in expl.tokens]
        covered = set()
        for s, e in runs:
            covered.update(range(s, e))
        for entry in gazetteer:
            entry_toks = entry.lower().split()
            if not entry_toks:
                continue
            m = len(entry_toks)
            for i in range(n - m + 1):
                if lowered[i : i + m] == entry_toks and not any(
                    p in covered for p in range(i, i + m)
                ):
                    count += 1
                    covered.update(range(i, i + m))
    return count


@dataclass(frozen=True)
class BaselineBackend:
    """ScorerBackend built entirely from corpus statistics."""

    lm: NgramModel
    embeddings: CountEmbeddings
    gazetteer: frozenset[str] = frozenset()

    @classmethod
    def from_corpus(
        cls,
        corpus: Sequence[str],
        order: int = 2,
        k: float = 1.0,
        dimension: int = 32,
        gazetteer: Iterable[str] = (),
    ) -> "BaselineBackend":
        return cls(
            lm=train_ngram(corpus, order=order, k=k),
            embeddings=build_count_embeddings(corpus, dimension=dimension),
            gazetteer=frozenset(gazetteer),
        )

    def token_logprobs(self, tokens: Sequence[str]) -> list[float]:
        return self.lm.sequence_logprobs(tokens)

    def token_embeddings(self, tokens: Sequence[str]) -> np.ndarray:
        return self.embeddings.token_vectors(tokens)

    def sentence_embedding(self, text: str) -> np.ndarray:
        return self.embeddings.text_vector(text)

    def mask_fill(
        self, tokens: Sequence[str], mask_index: int, top_k: int = 10
    ) -> list[tuple[str, float]]:
        return baseline_mask_fill(self.lm, tokens, mask_index, top_k)

    def entity_count(self, text: str) -> int:
        return heuristic_entity_count(text, self.gazetteer)
