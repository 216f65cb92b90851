from __future__ import annotations

import numpy as np
import pytest

from scorer_server.lite import (
    SENTENCE_DIM,
    TOKEN_DIM,
    LiteEmbedder,
    LiteLanguageModel,
    LiteParaphraser,
)


@pytest.fixture(scope="module")
def lm():
    return LiteLanguageModel()


class TestLanguageModel:
    def test_one_logprob_per_token_all_nonpositive(self, lm):
        out = lm.logprobs(["The", "council", "approved", "the", "budget"])
        assert len(out) == 5
        assert all(v <= 0 for v in out)

    def test_deterministic(self, lm):
        tokens = ["the", "agency", "confirmed", "the", "plan"]
        assert lm.logprobs(tokens) == lm.logprobs(tokens)

    def test_known_bigram_beats_unknown(self, lm):
        known = lm.logprobs(["the", "plan"])[1]
        unknown = lm.logprobs(["the", "zyqqat"])[1]
        assert known > unknown

    def test_sentence_boundary_transition_preferred(self, lm):
        capital = lm.logprobs([".", "The"])[1]
        lowered = lm.logprobs([".", "that"])[1]
        assert capital > lowered

    def test_mask_fill_distribution(self, lm):
        out = lm.mask_fill(["the", "approved"], 1, top_k=5)
        assert len(out) == 5
        probs = [p for _, p in out]
        assert probs == sorted(probs, reverse=True)
        assert all(0 < p <= 1 for p in probs)

    def test_mask_fill_at_boundaries(self, lm):
        assert lm.mask_fill(["budget"], 0, 3)
        assert lm.mask_fill(["budget"], 1, 3)


class TestEmbedder:
    def test_shapes_and_dims(self):
        e = LiteEmbedder()
        assert e.token_vectors(["a", "b", "c"]).shape == (3, TOKEN_DIM)
        assert e.sentence_vector("the cat sat").shape == (SENTENCE_DIM,)

    def test_same_word_same_vector(self):
        e = LiteEmbedder()
        v = e.token_vectors(["Budget", "budget"])
        assert np.allclose(v[0], v[1])

    def test_distinct_words_not_aligned(self):
        e = LiteEmbedder()
        v = e.token_vectors(["budget", "giraffe"])
        cos = float(v[0] @ v[1])
        assert abs(cos) < 0.9

    def test_unit_norm_tokens(self):
        e = LiteEmbedder()
        v = e.token_vectors(["anything"])
        assert np.linalg.norm(v[0]) == pytest.approx(1.0)

    def test_empty_text_nonzero(self):
        e = LiteEmbedder()
        assert np.linalg.norm(e.sentence_vector("...")) > 0


class TestParaphraser:
    LONG = (
        "The mayor said that the budget would increase sharply over the next "
        "decade according to records from Springfield."
    )

    def test_deterministic_and_nonempty(self):
        p = LiteParaphraser()
        out = p.rewrite(self.LONG)
        assert out
        assert p.rewrite(self.LONG) == out

    def test_splits_long_sentences(self):
        p = LiteParaphraser()
        out = p.rewrite(self.LONG)
        assert out.count(".") > self.LONG.count(".")

    def test_short_sentences_kept_whole(self):
        p = LiteParaphraser()
        assert p.rewrite("The cat sat.") == "The cat sat."

    def test_substitutions_preserve_capitalization(self):
        p = LiteParaphraser()
        out = p.rewrite("Approximately twenty people attended the hearing downtown yesterday.")
        assert out.startswith("About")

    def test_drops_parentheticals(self):
        p = LiteParaphraser()
        out = p.rewrite("The plan (first drafted in March) was approved.")
        assert "(" not in out

    def test_never_empty(self):
        p = LiteParaphraser()
        assert p.rewrite("()") == "()"
