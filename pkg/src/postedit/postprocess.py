"""Post-search cleanup: deterministic grammar correction, verbless-sentence
removal, and the optional paraphrase pass."""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .errors import PosteditError
from .textcore import Explanation, build_explanation, detokenize, tokenize
from .wordlists import verb_lexicon, verb_suffix_exclusions

__all__ = [
    "GrammarRuleSet",
    "grammar_correct",
    "drop_verbless_sentences",
    "DropResult",
    "paraphrase",
    "ParaphraseResult",
]

log = logging.getLogger(__name__)

_TERMINAL = ".!?"


@dataclass(frozen=True)
class GrammarRuleSet:
    """Ordered regex rewrites plus the verb lexicon for sentence filtering.

    Applying the rule set twice must equal applying it once; the default
    rules are built to be idempotent as a whole.
    """

    rules: tuple[tuple[str, re.Pattern, str], ...]
    verbs: frozenset[str]
    suffix_exclusions: frozenset[str]
    external_hook: Callable[[str], str] | None = field(default=None, compare=False)

    @classmethod
    def default(cls, external_hook: Callable[[str], str] | None = None) -> "GrammarRuleSet":
        rules = (
            ("collapse_spaces", re.compile(r"\s+"), " "),
            # runs of the same punctuation mark collapse to one
            ("collapse_punct", re.compile(r"([.,!?;:])(?:\s*\1)+"), r"\1"),
            ("space_before_punct", re.compile(r"\s+([.,!?;:])"), r"\1"),
        )
        return cls(
            rules=rules,
            verbs=verb_lexicon(),
            suffix_exclusions=verb_suffix_exclusions(),
            external_hook=external_hook,
        )

    def is_verb(self, word: str) -> bool:
        w = word.lower()
        if w in self.verbs:
            return True
        if w in self.suffix_exclusions:
            return False
        for suffix in ("ed", "ing", "s"):
            if w.endswith(suffix) and len(w) > len(suffix) + 1:
                stem = w[: -len(suffix)]
                if stem in self.verbs or stem + "e" in self.verbs:
                    return True
                # doubled final consonant: stopped -> stop
                if len(stem) > 2 and stem[-1] == stem[-2] and stem[:-1] in self.verbs:
                    return True
        return False


def _capitalize_sentences(text: str) -> str:
    try:
        expl = tokenize(text)
    except PosteditError:
        return text
    texts = expl.token_texts()
    edited = False
    for start, end in expl.sentence_bounds:
        for i in range(start, end):
            tok = texts[i]
            if expl.tokens[i].is_punct:
                continue
            if tok[0].isalpha() and not tok[0].isupper():
                texts[i] = tok[0].upper() + tok[1:]
                edited = True
            break
    if not edited:
        return text
    return detokenize(build_explanation(texts, expl.sentence_bounds))


def _ensure_terminal_punctuation(text: str) -> str:
    try:
        expl = tokenize(text)
    except PosteditError:
        return text
    pieces = []
    for start, end in expl.sentence_bounds:
        sent = detokenize(build_explanation(
            [t.text for t in expl.tokens[start:end]], [(0, end - start)]
        ))
        if sent and sent[-1] not in _TERMINAL:
            sent += "."
        pieces.append(sent)
    return " ".join(pieces)


def grammar_correct(text: str, rules: GrammarRuleSet | None = None) -> str:
    """Fix capitalization and spacing/punctuation noise; idempotent."""
    if rules is None:
        rules = GrammarRuleSet.default()
    out = text
    for _, pattern, replacement in rules.rules:
        out = pattern.sub(replacement, out)
    out = out.strip()
    if not out:
        return out
    out = _ensure_terminal_punctuation(out)
    out = _capitalize_sentences(out)
    if rules.external_hook is not None:
        out = rules.external_hook(out)
    return out


class DropResult(NamedTuple):
    explanation: Explanation
    all_verbless: bool


def drop_verbless_sentences(e: Explanation, rules: GrammarRuleSet | None = None) -> DropResult:
    """Remove sentences with no verb. If every sentence is verbless, the
    longest one is kept and the result is flagged."""
    if rules is None:
        rules = GrammarRuleSet.default()
    keep = [
        (start, end)
        for start, end in e.sentence_bounds
        if any(rules.is_verb(t.text) for t in e.tokens[start:end] if not t.is_punct)
    ]
    if len(keep) == len(e.sentence_bounds):
        return DropResult(e, False)
    all_verbless = not keep
    if all_verbless:
        keep = [max(e.sentence_bounds, key=lambda se: se[1] - se[0])]
        log.warning("all sentences verbless; keeping the longest")

    texts: list[str] = []
    bounds: list[tuple[int, int]] = []
    cursor = 0
    for start, end in keep:
        texts.extend(t.text for t in e.tokens[start:end])
        bounds.append((cursor, cursor + end - start))
        cursor += end - start
    return DropResult(build_explanation(texts, bounds), all_verbless)


class ParaphraseResult(NamedTuple):
    text: str
    paraphrased: bool


def paraphrase(text: str, backend=None) -> ParaphraseResult:
    """Run the configured paraphrase backend; fall back to the identity (and
    say so) when no backend is configured or the call fails."""
    if backend is None:
        return ParaphraseResult(text, False)
    call = backend.paraphrase if hasattr(backend, "paraphrase") else backend
    try:
        out = call(text)
    except PosteditError as exc:
        log.warning("paraphrase backend failed (%s); returning input unchanged", exc)
        return ParaphraseResult(text, False)
    if not out:
        log.warning("paraphrase backend returned empty text; returning input unchanged")
        return ParaphraseResult(text, False)
    return ParaphraseResult(out, True)
