"""Directional smoke run: the full pipeline against the live server on a
40-instance sample must raise average reading ease at the edit stage and
again at the paraphrase stage."""
from __future__ import annotations

import pytest

from postedit.pipeline import PipelineConfig, run_pipeline

from smokedata import make_records, write_dataset


@pytest.mark.slow
def test_reading_ease_improves_per_stage(live_server, tmp_path):
    dataset = write_dataset(tmp_path / "sample40.jsonl", make_records(40, seed=1234))
    config = PipelineConfig.from_dict(
        {
            "dataset": str(dataset),
            "out_dir": str(tmp_path / "out"),
            "seed": 11,
            "selection": "lead",
            "backend": "remote",
            "remote": {"base_url": live_server, "timeout": 30},
            "workers": 4,
            "edit": {"n_steps": 40},
            "stages": {"edits": True, "grammar": True, "paraphrase": True},
        }
    )
    result = run_pipeline(config)
    assert result.failures == []
    by_method = {s.method: s for s in result.report.stages}
    topn = by_method["Top-6"].summaries["flesch"].mean
    edits = by_method["Top-6+Edits-6"].summaries["flesch"].mean
    para = by_method["Top-6+Edits-6+Para"].summaries["flesch"].mean
    print(f"flesch: topn={topn:.2f} edits={edits:.2f} para={para:.2f}")
    assert edits > topn, f"edits {edits:.2f} did not improve on topn {topn:.2f}"
    assert para > edits, f"para {para:.2f} did not improve on edits {edits:.2f}"
