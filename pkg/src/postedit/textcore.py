"""Tokenization, sentence segmentation, bracketed-tree ingestion, and phrase
span extraction.

Everything here is immutable after construction and safe to share across
threads; all operations are pure functions.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EmptyInput, ParseFormatError
from .wordlists import abbreviations, function_words

__all__ = [
    "Token",
    "Explanation",
    "ParseTree",
    "PhraseSpan",
    "tokenize",
    "detokenize",
    "build_explanation",
    "parse_bracketed",
    "extract_phrases",
    "heuristic_chunk",
    "DEFAULT_PHRASE_LABELS",
]

# Constituent labels eligible as edit sites unless the caller overrides them.
DEFAULT_PHRASE_LABELS = frozenset({"NP", "VP", "PP", "ADJP", "ADVP", "SBAR"})

# Chunks produced by the heuristic fallback carry this pseudo-label.
CHUNK_LABEL = "CHUNK"

COORDINATING_CONJUNCTIONS = frozenset({"and", "or", "but", "nor", "yet", "so"})

MAX_CHUNK_TOKENS = 12

_TERMINATORS = {".", "!", "?"}


@dataclass(frozen=True)
class Token:
    text: str
    index: int
    is_punct: bool

    def __post_init__(self):
        if not self.text:
            raise ValueError("token text must be non-empty")


@dataclass(frozen=True)
class Explanation:
    """A tokenized multi-sentence text.

    ``sentence_bounds`` are half-open (start, end) token ranges that
    partition [0, len(tokens)).
    """

    tokens: tuple[Token, ...]
    sentence_bounds: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pos = 0
        for i, tok in enumerate(self.tokens):
            if tok.index != i:
                raise ValueError(f"token index {tok.index} at position {i}")
            pos += 1
        cursor = 0
        for start, end in self.sentence_bounds:
            if start != cursor or end <= start:
                raise ValueError(
                    f"sentence bounds {self.sentence_bounds} do not partition "
                    f"[0, {len(self.tokens)})"
                )
            cursor = end
        if cursor != len(self.tokens):
            raise ValueError("sentence bounds do not cover all tokens")

    @property
    def n_tokens(self) -> int:
        return len(self.tokens)

    @property
    def n_word_tokens(self) -> int:
        """Token count excluding punctuation-only tokens."""
        return sum(1 for t in self.tokens if not t.is_punct)

    def token_texts(self) -> list[str]:
        return [t.text for t in self.tokens]

    def sentence_index_of(self, pos: int) -> int:
        for i, (start, end) in enumerate(self.sentence_bounds):
            if start <= pos < end:
                return i
        raise IndexError(f"token position {pos} out of range")

    def sentence_tokens(self, i: int) -> tuple[Token, ...]:
        start, end = self.sentence_bounds[i]
        return self.tokens[start:end]


@dataclass(frozen=True)
class PhraseSpan:
    """A candidate edit site: a token range inside one sentence."""

    sentence_index: int
    range: tuple[int, int]
    label: str

    def __post_init__(self):
        if self.range[1] <= self.range[0]:
            raise ValueError(f"empty phrase range {self.range}")

    def __len__(self) -> int:
        return self.range[1] - self.range[0]


@dataclass(frozen=True)
class ParseTree:
    """Constituency tree node; leaves are raw token strings."""

    label: str
    children: tuple["ParseTree | str", ...]
    span: tuple[int, int]

    def leaves(self) -> list[str]:
        out: list[str] = []
        for child in self.children:
            if isinstance(child, ParseTree):
                out.extend(child.leaves())
            else:
                out.append(child)
        return out


def build_explanation(
    texts: Sequence[str], sentence_bounds: Iterable[tuple[int, int]]
) -> Explanation:
    """Construct an Explanation from raw token texts, computing punctuation
    flags and positions. Used by edit operations to rebuild state."""
    tokens = tuple(
        Token(text=t, index=i, is_punct=not any(ch.isalnum() for ch in t))
        for i, t in enumerate(texts)
    )
    return Explanation(tokens=tokens, sentence_bounds=tuple(sentence_bounds))


def _abbreviation_pattern() -> str:
    abbrs = sorted(abbreviations(), key=len, reverse=True)
    return "|".join(re.escape(a) for a in abbrs)


_TOKEN_RE = re.compile(
    rf"(?P<ABBR>(?<![\w.])(?:{_abbreviation_pattern()}))"
    r"|(?P<NUM>\d+(?:[.,]\d+)+)"
    r"|(?P<WORD>\w+(?:['’\-]\w+)*)"
    r"|(?P<OTHER>[^\s])",
    re.UNICODE,
)


def tokenize(text: str) -> Explanation:
    """Whitespace- and punctuation-splitting tokenizer.

    Abbreviations from the shipped list keep their trailing period as one
    token; decimal numbers stay whole. Sentence boundaries fall after
    ``.``/``!``/``?`` when followed by whitespace and a capital letter, or at
    end of text.
    """
    if not text or not text.strip():
        raise EmptyInput("cannot tokenize empty or whitespace-only text")

    texts: list[str] = []
    spans: list[tuple[int, int]] = []
    for m in _TOKEN_RE.finditer(text):
        texts.append(m.group(0))
        spans.append(m.span())

    breaks: list[int] = []
    for i, tok in enumerate(texts):
        if tok not in _TERMINATORS:
            continue
        if i == len(texts) - 1:
            breaks.append(i + 1)
            continue
        gap = text[spans[i][1] : spans[i + 1][0]]
        nxt = texts[i + 1]
        if gap and gap.isspace() and nxt[0].isupper():
            breaks.append(i + 1)
    if not breaks or breaks[-1] != len(texts):
        breaks.append(len(texts))

    bounds = []
    start = 0
    for b in breaks:
        if b > start:
            bounds.append((start, b))
            start = b
    return build_explanation(texts, bounds)


_NO_SPACE_BEFORE = set(".,!?;:%)]}’”'\"…")
_NO_SPACE_AFTER = set("([{“‘")


def detokenize(expl: Explanation) -> str:
    """Render tokens back to a string. Inserts single spaces only, so every
    non-whitespace character of the original text is preserved."""
    parts: list[str] = []
    for tok in expl.tokens:
        if parts:
            prev = parts[-1]
            if tok.text[0] in _NO_SPACE_BEFORE or prev[-1] in _NO_SPACE_AFTER:
                parts.append(tok.text)
                continue
        parts.append((" " if parts else "") + tok.text)
    return "".join(parts)


def _lex_bracketed(s: str) -> list[str]:
    out: list[str] = []
    i = 0
    while i < len(s):
        ch = s[i]
        if ch in "()":
            out.append(ch)
            i += 1
        elif ch.isspace():
            i += 1
        else:
            j = i
            while j < len(s) and not s[j].isspace() and s[j] not in "()":
                j += 1
            out.append(s[i:j])
            i = j
    return out


def parse_bracketed(s: str) -> ParseTree:
    """Parse a Penn-Treebank-style bracketed tree, computing token spans
    bottom-up. Leaves may be bare tokens or (TAG token) preterminals."""
    items = _lex_bracketed(s)
    if not items:
        raise ParseFormatError("empty tree string")

    pos = 0  # lexer cursor
    leaf_count = 0  # running token index for spans

    def parse_node() -> ParseTree:
        nonlocal pos, leaf_count
        if items[pos] != "(":
            raise ParseFormatError(f"expected '(' at item {pos}")
        pos += 1
        if pos >= len(items) or items[pos] in "()":
            raise ParseFormatError("constituent is missing a label")
        label = items[pos]
        pos += 1
        children: list[ParseTree | str] = []
        start = leaf_count
        while pos < len(items) and items[pos] != ")":
            if items[pos] == "(":
                children.append(parse_node())
            else:
                children.append(items[pos])
                leaf_count += 1
                pos += 1
        if pos >= len(items):
            raise ParseFormatError("unbalanced parentheses: missing ')'")
        if not children:
            raise ParseFormatError(f"empty constituent ({label})")
        pos += 1  # consume ')'
        return ParseTree(label=label, children=tuple(children), span=(start, leaf_count))

    tree = parse_node()
    if pos != len(items):
        raise ParseFormatError("trailing content after the root constituent")
    return tree


def extract_phrases(
    tree: ParseTree,
    allowed_labels: frozenset[str] | set[str] | None = None,
    *,
    sentence_index: int = 0,
    token_offset: int = 0,
) -> list[PhraseSpan]:
    """All constituents with an allowed label, in depth-first order,
    excluding any span that covers the whole sentence.

    ``token_offset`` rebases tree-local spans into explanation coordinates.
    """
    allowed = DEFAULT_PHRASE_LABELS if allowed_labels is None else allowed_labels
    full = tree.span
    found: list[PhraseSpan] = []

    def walk(node: ParseTree) -> None:
        if (
            node.label in allowed
            and node.span != full
            and node.span[1] > node.span[0]
        ):
            found.append(
                PhraseSpan(
                    sentence_index=sentence_index,
                    range=(node.span[0] + token_offset, node.span[1] + token_offset),
                    label=node.label,
                )
            )
        for child in node.children:
            if isinstance(child, ParseTree):
                walk(child)

    walk(tree)
    return found


def heuristic_chunk(expl: Explanation) -> list[PhraseSpan]:
    """Greedy fallback chunker used when no parse is supplied.

    Splits each sentence at punctuation (excluded from chunks), before
    coordinating conjunctions, and where a closed-class function word follows
    a content word. Chunks never exceed MAX_CHUNK_TOKENS tokens.
    """
    fw = function_words()
    spans: list[PhraseSpan] = []

    for si, (start, end) in enumerate(expl.sentence_bounds):
        chunk_start: int | None = None

        def close(upto: int) -> None:
            nonlocal chunk_start
            if chunk_start is not None and upto > chunk_start:
                spans.append(
                    PhraseSpan(sentence_index=si, range=(chunk_start, upto), label=CHUNK_LABEL)
                )
            chunk_start = None

        for i in range(start, end):
            tok = expl.tokens[i]
            if tok.is_punct:
                close(i)
                continue
            low = tok.text.lower()
            if chunk_start is not None:
                prev_low = expl.tokens[i - 1].text.lower()
                boundary = (
                    low in COORDINATING_CONJUNCTIONS
                    or (low in fw and prev_low not in fw)
                    or i - chunk_start >= MAX_CHUNK_TOKENS
                )
                if boundary:
                    close(i)
            if chunk_start is None:
                chunk_start = i
        close(end)

    return spans
