"""Self-contained deterministic models for every role.

These run with no weights, no downloads, and no GPU: a bigram language model
trained on the packaged corpus, hash-seeded embeddings, and a rule-based
sentence-splitting paraphraser. They exist so the full protocol and pipeline
can be exercised hermetically; swap in real checkpoints via the hf provider
for quality.
"""
from __future__ import annotations

import hashlib
import math
import re
from collections import Counter
from functools import lru_cache
from importlib import resources

import numpy as np

TOKEN_DIM = 32
SENTENCE_DIM = 48

START = "<s>"
END = "</s>"

_WORD_RE = re.compile(r"[\w'’\-]+", re.UNICODE)

# LM tokens keep case and punctuation: transitions like ". The" have to be
# cheap and ". that" expensive for the model to defend sentence boundaries.
_LM_TOKEN_RE = re.compile(r"[\w'’\-]+|[^\w\s]", re.UNICODE)


def _corpus_sentences() -> list[list[str]]:
    text = resources.files("scorer_server.data").joinpath("corpus.txt").read_text("utf-8")
    return [
        _LM_TOKEN_RE.findall(line)
        for line in text.splitlines()
        if line.strip()
    ]


class LiteLanguageModel:
    """Add-k bigram model over the packaged corpus; the first token of a
    request is scored with its unconditional (unigram) probability.

    k is deliberately tiny so transitions seen in the corpus are sharply
    preferred over unseen ones; that contrast is what lets the edit search
    tell fluent regions from disfluent ones.
    """

    def __init__(self, k: float = 0.001):
        bigrams: Counter[tuple[str, str]] = Counter()
        unigrams: Counter[str] = Counter()
        previous_end = START
        for sent in _corpus_sentences():
            unigrams.update(sent)
            # chain sentences so cross-boundary transitions (". The") count
            for a, b in zip([previous_end] + sent, sent + [END]):
                bigrams[(a, b)] += 1
            previous_end = sent[-1] if sent else START
        self.k = k
        self.bigrams = bigrams
        self.unigrams = unigrams
        self.total = sum(unigrams.values())
        self.vocab = sorted(unigrams)
        self.v = len(self.vocab) + 1  # + end marker
        self.context_totals: Counter[str] = Counter()
        for (a, _), n in bigrams.items():
            self.context_totals[a] += n

    def unigram_prob(self, word: str) -> float:
        return (self.unigrams.get(word, 0) + self.k) / (self.total + self.k * self.v)

    def cond_prob(self, word: str, prev: str) -> float:
        return (self.bigrams.get((prev, word), 0) + self.k) / (
            self.context_totals.get(prev, 0) + self.k * self.v
        )

    def logprobs(self, tokens: list[str]) -> list[float]:
        out: list[float] = []
        for i, w in enumerate(tokens):
            if i == 0:
                out.append(math.log(self.unigram_prob(w)))
            else:
                out.append(math.log(self.cond_prob(w, tokens[i - 1])))
        return out

    def mask_fill(self, tokens: list[str], mask_index: int, top_k: int) -> list[tuple[str, float]]:
        prev = tokens[mask_index - 1] if mask_index > 0 else START
        nxt = tokens[mask_index] if mask_index < len(tokens) else END
        scores = [
            (w, self.cond_prob(w, prev) * self.cond_prob(nxt, w)) for w in self.vocab
        ]
        total = sum(s for _, s in scores)
        ranked = sorted(scores, key=lambda ws: (-ws[1], ws[0]))[:top_k]
        return [(w, s / total) for w, s in ranked]


@lru_cache(maxsize=65536)
def _hash_vector(key: str, dim: int) -> np.ndarray:
    seed = int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "big")
    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)


class LiteEmbedder:
    """Deterministic hash-seeded word vectors; identical words always match
    exactly, unrelated words are near-orthogonal."""

    token_dim = TOKEN_DIM
    sentence_dim = SENTENCE_DIM

    def token_vectors(self, tokens: list[str]) -> np.ndarray:
        if not tokens:
            return np.zeros((0, TOKEN_DIM))
        return np.stack([_hash_vector("tok:" + t.lower(), TOKEN_DIM) for t in tokens])

    def sentence_vector(self, text: str) -> np.ndarray:
        words = [w.lower() for w in _WORD_RE.findall(text)]
        if not words:
            return np.full(SENTENCE_DIM, 1e-8)
        mat = np.stack([_hash_vector("sent:" + w, SENTENCE_DIM) for w in words])
        vec = mat.mean(axis=0)
        norm = np.linalg.norm(vec)
        return vec / norm if norm > 0 else np.full(SENTENCE_DIM, 1e-8)


SUBSTITUTIONS = {
    "approximately": "about",
    "purchase": "buy",
    "purchased": "bought",
    "utilize": "use",
    "utilized": "used",
    "demonstrate": "show",
    "demonstrated": "showed",
    "individuals": "people",
    "additional": "more",
    "numerous": "many",
    "assistance": "help",
    "regarding": "about",
    "sufficient": "enough",
    "attempted": "tried",
    "indicated": "said",
    "stated": "said",
    "confirmed": "said",
    "legislation": "law",
    "expenditure": "cost",
    "expenditures": "costs",
    "allocation": "share",
    "certified": "approved",
    "steadily": "slowly",
    "immediately": "at once",
    "requirement": "rule",
    "requirements": "rules",
}

_SPLIT_WORDS = {
    "and", "but", "because", "while", "although", "which", "that",
    "after", "since", "when", "where",
}

_MIN_SPLIT_SENTENCE = 9  # sentences shorter than this are left whole
_MIN_FRAGMENT = 3


class LiteParaphraser:
    """Rule-based rewriting aimed at readability: swap hard words for short
    ones and split one long sentence into two at a mid-sentence connective.
    Deterministic, and never returns empty output."""

    def rewrite(self, text: str) -> str:
        sentences = re.split(r"(?<=[.!?])\s+", text.strip())
        out: list[str] = []
        for sentence in sentences:
            if not sentence:
                continue
            sentence = re.sub(r"\s*\([^)]*\)", "", sentence)
            words = sentence.split()
            words = [self._substitute(w) for w in words]
            out.extend(self._split_long(words))
        rewritten = " ".join(self._polish(s) for s in out if s)
        return rewritten if rewritten.strip() else text

    @staticmethod
    def _substitute(word: str) -> str:
        stripped = word.strip(".,;:!?\"'")
        low = stripped.lower()
        if low in SUBSTITUTIONS and stripped:
            replacement = SUBSTITUTIONS[low]
            if stripped[0].isupper():
                replacement = replacement[0].upper() + replacement[1:]
            return word.replace(stripped, replacement)
        return word

    @classmethod
    def _split_long(cls, words: list[str]) -> list[str]:
        if len(words) < _MIN_SPLIT_SENTENCE:
            return [" ".join(words)]
        mid = len(words) / 2
        candidates = [
            i
            for i, w in enumerate(words)
            if w.lower().strip(",;") in _SPLIT_WORDS
            and i >= _MIN_FRAGMENT
            and len(words) - i - 1 >= _MIN_FRAGMENT
        ]
        if not candidates:
            return [" ".join(words)]
        split_at = min(candidates, key=lambda i: abs(i - mid))
        head = words[:split_at]
        tail = words[split_at + 1 :]
        head[-1] = head[-1].rstrip(",;")
        return cls._split_long(head) + cls._split_long(tail)

    @staticmethod
    def _polish(sentence: str) -> str:
        s = sentence.strip()
        if not s:
            return s
        if s[0].islower():
            s = s[0].upper() + s[1:]
        if s[-1] not in ".!?":
            s += "."
        return s
