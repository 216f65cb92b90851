"""The product-of-experts scoring function over a source/candidate pair.

All components are computed and combined in log space: the raw products
underflow on 100+-token texts, and acceptance only ever compares ratios,
which become log differences. Cosines are clamped below at COSINE_FLOOR
before the log so the total stays finite.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from .errors import DegenerateEmbedding, NoKeywords
from .textcore import Explanation, detokenize
from .wordlists import stopwords as default_stopwords

__all__ = [
    "ScorerWeights",
    "ScoreBreakdown",
    "ScorerBackend",
    "SourceProfile",
    "prepare_source",
    "fluency_log_score",
    "rake_keywords",
    "keyword_semantic_score",
    "explanation_semantic_score",
    "semantic_log_score",
    "length_log_score",
    "entity_log_score",
    "total_log_score",
]

COSINE_FLOOR = 1e-6

DEFAULT_TOP_KEYWORDS = 10


class ScorerBackend(Protocol):
    """What the scoring function needs from a model backend.

    Implementations must be deterministic and safe for concurrent reads;
    remote implementations raise ScorerUnavailable on transport failure.
    """

    def token_logprobs(self, tokens: Sequence[str]) -> list[float]: ...

    def token_embeddings(self, tokens: Sequence[str]) -> np.ndarray: ...

    def sentence_embedding(self, text: str) -> np.ndarray: ...

    def mask_fill(
        self, tokens: Sequence[str], mask_index: int, top_k: int = 10
    ) -> list[tuple[str, float]]: ...

    def entity_count(self, text: str) -> int: ...


@dataclass(frozen=True)
class ScorerWeights:
    """Exponents of the individual experts in the product."""

    alpha: float = 1.5  # fluency
    beta: float = 1.0  # keyword-level semantics
    eta: float = 1.2  # explanation-level semantics
    gamma: float = 1.4  # length
    delta: float = 0.95  # named entities

    def __post_init__(self):
        for name in ("alpha", "beta", "eta", "gamma", "delta"):
            if getattr(self, name) < 0:
                raise ValueError(f"weight {name} must be >= 0")


@dataclass(frozen=True)
class ScoreBreakdown:
    log_fluency: float
    log_keyword_sem: float
    log_expl_sem: float
    log_length: float
    log_entity: float
    log_total: float


def fluency_log_score(c: Explanation, backend: ScorerBackend) -> float:
    """Joint log-likelihood of the candidate under the backend's language
    model; deliberately not length-normalized."""
    return float(sum(backend.token_logprobs(c.token_texts())))


def rake_keywords(
    e: Explanation,
    stopword_set: frozenset[str] | set[str] | None = None,
    top_t: int = DEFAULT_TOP_KEYWORDS,
) -> list[list[int]]:
    """RAKE keyword extraction; each keyword is a list of token indices.

    Candidate phrases are maximal token runs broken at stopwords and
    punctuation. A word scores degree/frequency, a phrase the sum of its
    word scores; ties rank the earlier phrase first.
    """
    if top_t < 1:
        raise ValueError("top_t must be >= 1")
    stops = default_stopwords() if stopword_set is None else stopword_set

    phrases: list[list[int]] = []
    current: list[int] = []
    for tok in e.tokens:
        if tok.is_punct or tok.text.lower() in stops:
            if current:
                phrases.append(current)
                current = []
        else:
            current.append(tok.index)
    if current:
        phrases.append(current)
    if not phrases:
        return []

    freq: Counter[str] = Counter()
    degree: Counter[str] = Counter()
    for phrase in phrases:
        words = [e.tokens[i].text.lower() for i in phrase]
        for w in words:
            freq[w] += 1
            degree[w] += len(words)

    def phrase_score(phrase: list[int]) -> float:
        return sum(degree[e.tokens[i].text.lower()] / freq[e.tokens[i].text.lower()] for i in phrase)

    ranked = sorted(phrases, key=lambda p: (-phrase_score(p), p[0]))
    return ranked[:top_t]


def _unit_rows(mat: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return mat / norms


@dataclass(frozen=True)
class SourceProfile:
    """Source-side artifacts that stay fixed during a search, precomputed so
    repeated candidate scoring does not hit the backend for them."""

    keyword_vectors: np.ndarray | None  # (K, D) unit rows, None if no keywords
    sentence_vector: np.ndarray = field(repr=False)


def prepare_source(
    src: Explanation,
    backend: ScorerBackend,
    stopword_set: frozenset[str] | set[str] | None = None,
    top_t: int = DEFAULT_TOP_KEYWORDS,
) -> SourceProfile:
    keywords = rake_keywords(src, stopword_set, top_t)
    kw_vectors = None
    if keywords:
        token_vecs = np.asarray(backend.token_embeddings(src.token_texts()), dtype=float)
        kw_vectors = _unit_rows(
            np.stack([token_vecs[kw].mean(axis=0) for kw in keywords])
        )
    sent_vec = np.asarray(backend.sentence_embedding(detokenize(src)), dtype=float)
    return SourceProfile(keyword_vectors=kw_vectors, sentence_vector=sent_vec)


def keyword_semantic_score(
    src: Explanation,
    cand: Explanation,
    backend: ScorerBackend,
    stopword_set: frozenset[str] | set[str] | None = None,
    top_t: int = DEFAULT_TOP_KEYWORDS,
    source_profile: SourceProfile | None = None,
) -> float:
    """Least-matched-keyword similarity: embed each source keyword as the
    mean of its tokens' contextual vectors, take its best cosine against the
    candidate's token vectors, and return the minimum over keywords."""
    if source_profile is not None:
        kw_unit = source_profile.keyword_vectors
        if kw_unit is None:
            raise NoKeywords("source explanation has no RAKE keywords")
    else:
        keywords = rake_keywords(src, stopword_set, top_t)
        if not keywords:
            raise NoKeywords("source explanation has no RAKE keywords")
        src_vecs = np.asarray(backend.token_embeddings(src.token_texts()), dtype=float)
        kw_unit = _unit_rows(np.stack([src_vecs[kw].mean(axis=0) for kw in keywords]))

    cand_vecs = np.asarray(backend.token_embeddings(cand.token_texts()), dtype=float)
    cand_unit = _unit_rows(cand_vecs)
    sims = kw_unit @ cand_unit.T  # (K, n_cand)
    score = float(sims.max(axis=1).min())
    return max(-1.0, min(1.0, score))


def explanation_semantic_score(
    src: Explanation,
    cand: Explanation,
    backend: ScorerBackend,
    source_profile: SourceProfile | None = None,
) -> float:
    """Cosine similarity of the two full-text sentence embeddings."""
    if source_profile is not None:
        v1 = np.asarray(source_profile.sentence_vector, dtype=float)
    else:
        v1 = np.asarray(backend.sentence_embedding(detokenize(src)), dtype=float)
    v2 = np.asarray(backend.sentence_embedding(detokenize(cand)), dtype=float)
    n1, n2 = np.linalg.norm(v1), np.linalg.norm(v2)
    if n1 == 0 or n2 == 0:
        raise DegenerateEmbedding("zero-norm sentence embedding")
    score = float(v1 @ v2 / (n1 * n2))
    return max(-1.0, min(1.0, score))


def _clamped_log(x: float) -> float:
    return math.log(max(x, COSINE_FLOOR))


def semantic_log_score(
    src: Explanation,
    cand: Explanation,
    backend: ScorerBackend,
    weights: ScorerWeights,
    source_profile: SourceProfile | None = None,
) -> float:
    """Weighted sum of the log keyword-level and explanation-level scores.
    A keyword-free source gates the word-level factor at 1."""
    try:
        f_w = keyword_semantic_score(src, cand, backend, source_profile=source_profile)
    except NoKeywords:
        f_w = 1.0
    f_e = explanation_semantic_score(src, cand, backend, source_profile=source_profile)
    return weights.beta * _clamped_log(f_w) + weights.eta * _clamped_log(f_e)


def length_log_score(cand: Explanation) -> float:
    """Negative log of the non-punctuation token count: shorter is better."""
    return -math.log(max(cand.n_word_tokens, 1))


def entity_log_score(cand: Explanation, backend: ScorerBackend) -> float:
    """log(1 + named entity count); the +1 keeps entity-free texts scorable."""
    return math.log1p(backend.entity_count(detokenize(cand)))


def total_log_score(
    src: Explanation,
    cand: Explanation,
    backend: ScorerBackend,
    weights: ScorerWeights,
    source_profile: SourceProfile | None = None,
) -> ScoreBreakdown:
    """Assemble all experts into one weighted log score."""
    log_fluency = fluency_log_score(cand, backend)
    try:
        f_w = keyword_semantic_score(src, cand, backend, source_profile=source_profile)
    except NoKeywords:
        f_w = 1.0
    log_kw = _clamped_log(f_w)
    log_expl = _clamped_log(
        explanation_semantic_score(src, cand, backend, source_profile=source_profile)
    )
    log_length = length_log_score(cand)
    log_entity = entity_log_score(cand, backend)
    log_total = (
        weights.alpha * log_fluency
        + weights.beta * log_kw
        + weights.eta * log_expl
        + weights.gamma * log_length
        + weights.delta * log_entity
    )
    return ScoreBreakdown(
        log_fluency=log_fluency,
        log_keyword_sem=log_kw,
        log_expl_sem=log_expl,
        log_length=log_length,
        log_entity=log_entity,
        log_total=log_total,
    )
