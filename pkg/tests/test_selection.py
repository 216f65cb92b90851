from __future__ import annotations

import random

import pytest

from postedit.errors import EmptySelection
from postedit.metrics import rouge_n_f1
from postedit.selection import ClaimRecord, filter_rc_sentences, greedy_oracle_select

from toydata import make_records


class TestClaimRecord:
    def test_preselected_indices_validated(self):
        with pytest.raises(ValueError):
            ClaimRecord(
                claim_id="x",
                claim="c",
                label="true",
                ruling_sentences=("a.", "b."),
                preselected_topn=(5,),
            )

    def test_parses_alignment_validated(self):
        with pytest.raises(ValueError):
            ClaimRecord(
                claim_id="x",
                claim="c",
                label="true",
                ruling_sentences=("a.", "b."),
                parses=("(S a)",),
            )


class TestFilterRcSentences:
    def test_drops_questions(self):
        kept, index_map = filter_rc_sentences(["Is it true?", "It is false."])
        assert kept == ["It is false."]
        assert index_map == [1]

    def test_boundary_length(self):
        long61 = " ".join(["word"] * 61)
        at60 = " ".join(["word"] * 60)
        kept, index_map = filter_rc_sentences([long61, at60], max_len=60)
        assert kept == [at60]
        assert index_map == [1]

    def test_identity_when_nothing_matches(self):
        sentences = ["One two.", "Three four."]
        kept, index_map = filter_rc_sentences(sentences)
        assert kept == sentences
        assert index_map == [0, 1]

    def test_all_dropped_raises(self):
        with pytest.raises(EmptySelection):
            filter_rc_sentences(["Really?", "Are you sure?"])

    def test_question_kept_when_flag_off(self):
        kept, _ = filter_rc_sentences(["Is it true?"], drop_questions=False)
        assert kept == ["Is it true?"]


from reference import oracle_greedy  # noqa: E402


class TestGreedyOracleSelect:
    def test_verbatim_gold_first(self):
        sentences = ["The sky is blue today.", "Cats sleep a lot.", "Taxes rose sharply last year."]
        assert greedy_oracle_select(sentences, "Taxes rose sharply last year.", 1) == [2]

    def test_early_stop(self):
        sentences = ["alpha beta gamma.", "delta epsilon zeta."]
        gold = "alpha beta gamma."
        out = greedy_oracle_select(sentences, gold, 2)
        assert out == [0]  # adding the second sentence cannot improve F1

    def test_no_bigram_overlap_selects_nothing(self):
        out = greedy_oracle_select(["one two.", "three four."], "five six.", 2)
        assert out == []

    def test_matches_bruteforce_on_random_instances(self):
        rng = random.Random(13)
        records = make_records(25, seed=31, n_sentences=6)
        for record in records:
            sentences = list(record["ruling_sentences"])[:6]
            k = rng.randint(1, 3)
            got = greedy_oracle_select(sentences, record["justification"], k)
            expected = oracle_greedy(sentences, record["justification"], k)
            assert got == expected

    def test_score_nondecreasing_and_indices_unique(self):
        records = make_records(10, seed=5, n_sentences=6)
        for record in records:
            sentences = list(record["ruling_sentences"])
            out = greedy_oracle_select(sentences, record["justification"], 3)
            assert len(out) == len(set(out))
            scores = []
            for upto in range(1, len(out) + 1):
                text = " ".join(sentences[j] for j in out[:upto])
                scores.append(rouge_n_f1(text, record["justification"], 2))
            assert scores == sorted(scores)

    def test_filter_then_select_consistency(self):
        records = make_records(8, seed=17, n_sentences=7)
        for record in records:
            sentences = list(record["ruling_sentences"])
            try:
                kept, index_map = filter_rc_sentences(sentences)
            except EmptySelection:
                continue
            picked = greedy_oracle_select(kept, record["justification"], 2)
            remapped = [index_map[p] for p in picked]
            direct = greedy_oracle_select(
                [sentences[i] for i in index_map], record["justification"], 2
            )
            assert [index_map[p] for p in direct] == remapped

    def test_validation(self):
        with pytest.raises(ValueError):
            greedy_oracle_select([], "gold", 1)
        with pytest.raises(ValueError):
            greedy_oracle_select(["a."], "gold", 0)
