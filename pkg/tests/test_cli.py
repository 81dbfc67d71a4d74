import json

import pytest
from click.testing import CliRunner

from derailwatch.cli import main
from derailwatch.model import load_corpus
from derailwatch.predictor import load_predictions

from .conftest import FIXTURES, REPLAY


@pytest.fixture()
def runner():
    return CliRunner()


class TestIngest:
    def test_anchor_only(self, runner, tmp_path):
        out = tmp_path / "corpus.jsonl"
        result = runner.invoke(main, [
            "ingest", "--repo", "octo/demo", "--number", "42",
            "--out", str(out), "--replay-dir", str(REPLAY),
        ])
        assert result.exit_code == 0, result.output
        assert "wrote 1 threads" in result.output
        corpus = load_corpus(out)
        assert corpus[0].ref == "octo/demo#42"
        assert len(corpus[0].comments) == 5

    def test_with_neighbors(self, runner, tmp_path):
        out = tmp_path / "corpus.jsonl"
        result = runner.invoke(main, [
            "ingest", "--repo", "octo/demo", "--number", "42",
            "--out", str(out), "--replay-dir", str(REPLAY),
            "--neighbors", "--seed", "7",
        ])
        assert result.exit_code == 0, result.output
        numbers = {thread.number for thread in load_corpus(out)}
        assert numbers == {42, 37, 41, 44, 46}

    def test_missing_thread_fails(self, runner, tmp_path):
        result = runner.invoke(main, [
            "ingest", "--repo", "octo/demo", "--number", "38",
            "--out", str(tmp_path / "c.jsonl"), "--replay-dir", str(REPLAY),
        ])
        assert result.exit_code != 0


class TestAnalyze:
    def test_writes_json_and_prints_tables(self, runner, tmp_path):
        out = tmp_path / "stats.json"
        result = runner.invoke(main, [
            "analyze", "--corpus", str(FIXTURES / "analytics_corpus.jsonl"),
            "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text(encoding="utf-8"))
        assert data["partition_counts"] == {
            "toxic": 5, "non_toxic": 5, "derailed_toxic": 3, "abrupt_toxic": 2,
        }
        assert "report written" in result.output


class TestScore:
    def score_args(self, out):
        return [
            "score", "--corpus", str(FIXTURES / "eval_corpus.jsonl"),
            "--strategy", "ltm", "--out", str(out),
            "--gateway", "mock",
            "--mock-script", str(FIXTURES / "eval_mock_script.jsonl"),
        ]

    def test_scores_all_scorable_threads(self, runner, tmp_path):
        out = tmp_path / "predictions.jsonl"
        result = runner.invoke(main, self.score_args(out))
        assert result.exit_code == 0, result.output
        predictions = load_predictions(out)
        assert len(predictions) == 8
        by_number = {p.number: p.probability for p in predictions}
        assert by_number[101] == 0.85

    def test_repeat_runs_are_byte_identical(self, runner, tmp_path):
        first = tmp_path / "a.jsonl"
        second = tmp_path / "b.jsonl"
        assert runner.invoke(main, self.score_args(first)).exit_code == 0
        assert runner.invoke(main, self.score_args(second)).exit_code == 0
        assert first.read_bytes() == second.read_bytes()

    def test_mock_requires_script(self, runner, tmp_path):
        result = runner.invoke(main, [
            "score", "--corpus", str(FIXTURES / "eval_corpus.jsonl"),
            "--out", str(tmp_path / "p.jsonl"), "--gateway", "mock",
        ])
        assert result.exit_code == 2
        assert "--mock-script" in result.output


class TestEvaluate:
    def test_sweep_numbers_match_hand_tally(self, runner, tmp_path):
        predictions = tmp_path / "predictions.jsonl"
        runner.invoke(main, [
            "score", "--corpus", str(FIXTURES / "eval_corpus.jsonl"),
            "--strategy", "ltm", "--out", str(predictions),
            "--gateway", "mock",
            "--mock-script", str(FIXTURES / "eval_mock_script.jsonl"),
        ])
        out = tmp_path / "report.json"
        result = runner.invoke(main, [
            "evaluate", "--predictions", str(predictions),
            "--corpus", str(FIXTURES / "eval_corpus.jsonl"),
            "--thresholds", "0.5", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        row = json.loads(out.read_text(encoding="utf-8"))["rows"][0]
        assert (row["tp"], row["fp"], row["tn"], row["fn"]) == (3, 2, 2, 1)
        assert "Model" in result.output


class TestServe:
    def test_mock_requires_script(self, runner, tmp_path):
        result = runner.invoke(main, [
            "serve", "--store", str(tmp_path / "store"), "--gateway", "mock",
        ])
        assert result.exit_code == 2
        assert "--mock-script" in result.output
