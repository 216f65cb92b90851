"""Loaders for the word-list data files shipped with the package.

All lists are plain UTF-8 text, one entry per line; blank lines and lines
starting with '#' are ignored. Loaders are cached: the lists are read once
per process and shared.
"""
from __future__ import annotations

from functools import lru_cache
from importlib import resources


def _read_lines(name: str) -> tuple[str, ...]:
    text = resources.files("postedit.data").joinpath(name).read_text("utf-8")
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return tuple(out)


@lru_cache(maxsize=None)
def stopwords() -> frozenset[str]:
    return frozenset(_read_lines("stopwords.txt"))


@lru_cache(maxsize=None)
def abbreviations() -> frozenset[str]:
    """Abbreviations that keep their trailing period as one token."""
    return frozenset(_read_lines("abbreviations.txt"))


@lru_cache(maxsize=None)
def function_words() -> frozenset[str]:
    """Closed-class words used as chunk boundaries by the heuristic chunker."""
    return frozenset(_read_lines("function_words.txt"))


@lru_cache(maxsize=None)
def verb_lexicon() -> frozenset[str]:
    return frozenset(_read_lines("verbs.txt"))


@lru_cache(maxsize=None)
def verb_suffix_exclusions() -> frozenset[str]:
    """Words that end in -ed/-ing/-s but are not verb forms."""
    return frozenset(_read_lines("verb_suffix_exclusions.txt"))


@lru_cache(maxsize=None)
def familiar_words() -> frozenset[str]:
    """Common-word list backing the Dale-Chall readability score."""
    return frozenset(_read_lines("dale_familiar_words.txt"))


def load_word_file(path: str) -> frozenset[str]:
    """Read a user-supplied word list (stopwords, gazetteer, verbs...)."""
    with open(path, encoding="utf-8") as f:
        return frozenset(
            line.strip() for line in f if line.strip() and not line.startswith("#")
        )
