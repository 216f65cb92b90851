"""Unsupervised phrase-level post-editing of multi-sentence explanations.

The package splits into: text handling (textcore), the product-of-experts
scoring function (scoring) with offline baseline backends (baseline) and a
remote HTTP backend (remote), the iterative edit search (engine), grammar
and paraphrase post-passes (postprocess), sentence selection (selection),
evaluation metrics (metrics), and the end-to-end pipeline and CLI.
"""

from .baseline import BaselineBackend, CountEmbeddings, NgramModel
from .engine import EditConfig, EditTrace, accept, run_search
from .errors import PosteditError
from .metrics import (
    bootstrap_ci,
    copy_novelty_coverage,
    dale_chall,
    flesch_reading_ease,
    rouge_l_f1,
    rouge_n_f1,
)
from .pipeline import PipelineConfig, load_dataset, run_pipeline, write_report
from .postprocess import GrammarRuleSet, drop_verbless_sentences, grammar_correct, paraphrase
from .remote import RemoteBackend, RemoteConfig
from .scoring import ScoreBreakdown, ScorerWeights, total_log_score
from .selection import ClaimRecord, filter_rc_sentences, greedy_oracle_select
from .textcore import Explanation, ParseTree, PhraseSpan, Token, detokenize, tokenize

__version__ = "0.1.0"

__all__ = [
    "BaselineBackend",
    "CountEmbeddings",
    "NgramModel",
    "EditConfig",
    "EditTrace",
    "accept",
    "run_search",
    "PosteditError",
    "bootstrap_ci",
    "copy_novelty_coverage",
    "dale_chall",
    "flesch_reading_ease",
    "rouge_l_f1",
    "rouge_n_f1",
    "PipelineConfig",
    "load_dataset",
    "run_pipeline",
    "write_report",
    "GrammarRuleSet",
    "drop_verbless_sentences",
    "grammar_correct",
    "paraphrase",
    "RemoteBackend",
    "RemoteConfig",
    "ScoreBreakdown",
    "ScorerWeights",
    "total_log_score",
    "ClaimRecord",
    "filter_rc_sentences",
    "greedy_oracle_select",
    "Explanation",
    "ParseTree",
    "PhraseSpan",
    "Token",
    "detokenize",
    "tokenize",
    "__version__",
]
