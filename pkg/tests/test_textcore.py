from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from postedit.errors import EmptyInput, ParseFormatError
from postedit.textcore import (
    DEFAULT_PHRASE_LABELS,
    build_explanation,
    detokenize,
    extract_phrases,
    heuristic_chunk,
    parse_bracketed,
    tokenize,
)


class TestTokenize:
    def test_single_sentence(self):
        e = tokenize("The cat sat.")
        assert [t.text for t in e.tokens] == ["The", "cat", "sat", "."]
        assert e.sentence_bounds == ((0, 4),)

    def test_boundary_rule(self):
        e = tokenize("A? B.")
        assert e.sentence_bounds == ((0, 2), (2, 4))

    def test_abbreviation_suppresses_split(self):
        # hand segmentation: "Dr." must not end the first sentence
        e = tokenize("Dr. Smith won. He smiled.")
        assert [t.text for t in e.tokens] == ["Dr.", "Smith", "won", ".", "He", "smiled", "."]
        assert e.sentence_bounds == ((0, 4), (4, 7))

    def test_terminator_without_capital_does_not_split(self):
        e = tokenize("He won. then he left.")
        assert len(e.sentence_bounds) == 1

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            tokenize("")
        with pytest.raises(EmptyInput):
            tokenize("   \n\t ")

    def test_punctuation_flags(self):
        e = tokenize("Wait, stop!")
        flags = {t.text: t.is_punct for t in e.tokens}
        assert flags == {"Wait": False, ",": True, "stop": False, "!": True}

    def test_indices_contiguous(self):
        e = tokenize("One two three. Four five.")
        assert [t.index for t in e.tokens] == list(range(e.n_tokens))

    @given(st.text(min_size=1).filter(lambda s: s.strip()))
    def test_roundtrip_preserves_non_whitespace(self, text):
        out = detokenize(tokenize(text))
        assert "".join(out.split()) == "".join(text.split())

    @given(st.text(min_size=1).filter(lambda s: s.strip()))
    def test_deterministic(self, text):
        a = tokenize(text)
        b = tokenize(text)
        assert a == b

    def test_decimal_number_stays_whole(self):
        e = tokenize("It rose 3.5 percent.")
        assert "3.5" in [t.text for t in e.tokens]


class TestParseBracketed:
    def test_simple(self):
        t = parse_bracketed("(NP (DT the) (NN cat))")
        assert t.label == "NP"
        assert t.span == (0, 2)
        assert t.leaves() == ["the", "cat"]

    def test_spans_bottom_up(self):
        # manual span computation: NP covers tokens 0-2, VP 2-3, S 0-3
        t = parse_bracketed("(S (NP (DT the) (NN cat)) (VP (VBD sat)))")
        np_node, vp_node = (c for c in t.children)
        assert np_node.span == (0, 2)
        assert vp_node.span == (2, 3)
        assert t.span == (0, 3)

    def test_bare_leaf_tokens(self):
        t = parse_bracketed("(S (NP the cat) (VP sat))")
        assert t.leaves() == ["the", "cat", "sat"]

    @pytest.mark.parametrize(
        "bad",
        ["(S (NP", "(S)", "", "(S (NP the)) extra", "(S (NP the) ))", "((DT the))"],
    )
    def test_malformed(self, bad):
        with pytest.raises(ParseFormatError):
            parse_bracketed(bad)


class TestExtractPhrases:
    def test_manual_enumeration(self):
        t = parse_bracketed("(S (NP the cat) (VP sat))")
        spans = extract_phrases(t)
        assert [(p.label, p.range) for p in spans] == [("NP", (0, 2)), ("VP", (2, 3))]

    def test_no_allowed_labels(self):
        t = parse_bracketed("(S the cat sat)")
        assert extract_phrases(t) == []

    def test_nested_nps_both_returned(self):
        t = parse_bracketed("(S (NP (NP the cat) (PP of (NP the town))) (VP sat))")
        spans = extract_phrases(t, {"NP"})
        assert [(p.range) for p in spans] == [(0, 5), (0, 2), (3, 5)]

    def test_full_sentence_span_excluded(self):
        t = parse_bracketed("(NP (NP the cat))")
        # both NPs cover the whole sentence span, so neither is a site
        assert extract_phrases(t, {"NP"}) == []

    def test_offsets(self):
        t = parse_bracketed("(S (NP the cat) (VP sat))")
        spans = extract_phrases(t, sentence_index=2, token_offset=10)
        assert [(p.sentence_index, p.range) for p in spans] == [(2, (10, 12)), (2, (12, 13))]

    def test_default_labels(self):
        assert DEFAULT_PHRASE_LABELS == {"NP", "VP", "PP", "ADJP", "ADVP", "SBAR"}


class TestHeuristicChunk:
    def test_simple_sentence(self):
        # hand application: one clause, punctuation excluded
        e = tokenize("The cat sat .")
        spans = heuristic_chunk(e)
        assert [p.range for p in spans] == [(0, 3)]

    def test_split_at_comma(self):
        e = tokenize("A , B .")
        spans = heuristic_chunk(e)
        assert [p.range for p in spans] == [(0, 1), (2, 3)]

    def test_function_word_boundary(self):
        e = tokenize("The cat sat on the mat.")
        spans = heuristic_chunk(e)
        assert [p.range for p in spans] == [(0, 3), (3, 6)]

    def test_coordinating_conjunction_boundary(self):
        e = tokenize("The cat sat and the dog slept.")
        ranges = [p.range for p in heuristic_chunk(e)]
        assert (0, 3) in ranges
        assert all(e.tokens[s].text != "and" or s == r[0] for r in ranges for s in [r[0]])

    def test_max_chunk_length(self):
        e = tokenize(" ".join(["word"] * 30) + ".")
        spans = heuristic_chunk(e)
        assert all(len(p) <= 12 for p in spans)

    def test_spans_within_one_sentence_and_cover_words(self):
        e = tokenize("The cat sat on the mat. The dog, meanwhile, slept in the sun.")
        spans = heuristic_chunk(e)
        covered = set()
        for p in spans:
            start, end = e.sentence_bounds[p.sentence_index]
            assert start <= p.range[0] < p.range[1] <= end
            for i in range(*p.range):
                assert i not in covered
                covered.add(i)
        words = {t.index for t in e.tokens if not t.is_punct}
        assert covered == words

    def test_empty_no_sentences_not_possible_but_chunker_handles_punct_only(self):
        e = tokenize("...")
        assert heuristic_chunk(e) == []


class TestBuildExplanation:
    def test_validates_bounds(self):
        with pytest.raises(ValueError):
            build_explanation(["a", "b"], [(0, 1)])
        with pytest.raises(ValueError):
            build_explanation(["a", "b"], [(0, 1), (1, 1)])

    def test_phrase_invariant_concatenation(self):
        t = parse_bracketed("(S (NP the cat) (VP sat))")
        e = tokenize("the cat sat")
        for p in extract_phrases(t):
            leaf_slice = t.leaves()[p.range[0] : p.range[1]]
            token_slice = [tok.text for tok in e.tokens[p.range[0] : p.range[1]]]
            assert leaf_slice == token_slice
