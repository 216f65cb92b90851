from __future__ import annotations

from collections import Counter

from hypothesis import given, settings
from hypothesis import strategies as st

from postedit.errors import ProtocolError
from postedit.postprocess import (
    GrammarRuleSet,
    drop_verbless_sentences,
    grammar_correct,
    paraphrase,
)
from postedit.textcore import tokenize


class TestGrammarCorrect:
    def test_capitalization_and_spacing(self):
        assert grammar_correct("the cat sat .") == "The cat sat."

    def test_repeated_punct_and_terminal(self):
        assert grammar_correct("He ran ,, fast") == "He ran, fast."

    def test_collapses_spaces(self):
        assert grammar_correct("He  ran   fast.") == "He ran fast."

    def test_adds_terminal_punctuation_per_sentence(self):
        assert grammar_correct("It works") == "It works."

    def test_capitalizes_each_sentence(self):
        out = grammar_correct("it rained. They left.")
        assert out == "It rained. They left."

    @settings(max_examples=80, deadline=None)
    @given(st.text(alphabet="abcDE .,!?;", min_size=1).filter(lambda s: s.strip()))
    def test_idempotent(self, text):
        once = grammar_correct(text)
        assert grammar_correct(once) == once

    @settings(max_examples=80, deadline=None)
    @given(st.text(alphabet="abcDE .,!?;:xyz", min_size=1).filter(lambda s: s.strip()))
    def test_preserves_alphanumerics_up_to_case(self, text):
        out = grammar_correct(text)
        before = Counter(ch.lower() for ch in text if ch.isalnum())
        after = Counter(ch.lower() for ch in out if ch.isalnum())
        assert before == after

    def test_external_hook_applied_last(self):
        rules = GrammarRuleSet.default(external_hook=lambda s: s.replace("cat", "dog"))
        assert grammar_correct("the cat sat.", rules) == "The dog sat."


class TestVerbDetection:
    def test_lexicon_and_suffixes(self):
        rules = GrammarRuleSet.default()
        for word in ["sat", "ran", "says", "walked", "running", "stopped", "walks"]:
            assert rules.is_verb(word), word
        for word in ["hat", "table", "red", "thing", "morning", "gas", "news"]:
            assert not rules.is_verb(word), word


class TestDropVerbless:
    def test_drops_verbless_sentence(self):
        e = tokenize("The cat sat. The hat.")
        result = drop_verbless_sentences(e)
        assert [t.text for t in result.explanation.tokens] == ["The", "cat", "sat", "."]
        assert not result.all_verbless

    def test_all_have_verbs_unchanged(self):
        e = tokenize("The cat sat. The dog ran.")
        result = drop_verbless_sentences(e)
        assert result.explanation == e

    def test_all_verbless_keeps_longest_and_flags(self):
        e = tokenize("The hat. The very large purple hat.")
        result = drop_verbless_sentences(e)
        assert result.all_verbless
        texts = [t.text for t in result.explanation.tokens]
        assert texts == ["The", "very", "large", "purple", "hat", "."]

    def test_output_is_subsequence_of_input_sentences(self):
        e = tokenize("The cat sat. The hat. The dog ran. Big sky.")
        result = drop_verbless_sentences(e)
        kept = [
            tuple(t.text for t in result.explanation.tokens[s:f])
            for s, f in result.explanation.sentence_bounds
        ]
        original = [
            tuple(t.text for t in e.tokens[s:f]) for s, f in e.sentence_bounds
        ]
        it = iter(original)
        assert all(any(k == o for o in it) for k in kept)


class TestParaphrase:
    def test_no_backend_is_identity_with_flag(self):
        result = paraphrase("The cat sat.")
        assert result.text == "The cat sat."
        assert not result.paraphrased

    def test_mock_backend_passthrough(self):
        result = paraphrase("the cat", lambda s: s.upper())
        assert result.text == "THE CAT"
        assert result.paraphrased

    def test_backend_object_with_method(self):
        class Upper:
            def paraphrase(self, text):
                return text.upper()

        assert paraphrase("abc", Upper()).text == "ABC"

    def test_backend_failure_falls_back(self):
        def broken(text):
            raise ProtocolError("boom")

        result = paraphrase("keep me", broken)
        assert result.text == "keep me"
        assert not result.paraphrased

    def test_empty_backend_output_falls_back(self):
        result = paraphrase("keep me", lambda s: "")
        assert result.text == "keep me"
        assert not result.paraphrased
