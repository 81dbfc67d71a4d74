import pytest

from derailwatch.errors import (
    ContextOverflowError,
    FirstCommentToxicError,
    ParseFailureError,
)
from derailwatch.gateway import ScriptedMock
from derailwatch.model import TBDF
from derailwatch.predictor import (
    DerailmentPrediction,
    InterventionAction,
    InterventionPolicy,
    classify,
    load_predictions,
    predict,
    recommend_action,
    save_predictions,
    truncate_transcript,
)
from derailwatch.prompts import TEMPLATE_VERSION, ScdStrategy

from .conftest import make_comment, make_thread, ts


@pytest.fixture()
def derailed_thread():
    return make_thread(
        [
            make_comment(0, body="The export feature breaks on large files."),
            make_comment(1, body="Any progress on this?", author="bob",
                         association="NONE"),
            make_comment(2, body="Still waiting, this is dragging on.",
                         author="bob", association="NONE",
                         tbdfs=frozenset({TBDF.IMPATIENCE}),
                         is_derailment_point=True),
            make_comment(3, body="You people are useless.", author="bob",
                         association="NONE", is_toxic=True,
                         tbdfs=frozenset({TBDF.INSULTING})),
        ]
    )


def scd_mock(probability="0.85", scd='"A tense exchange about a bug."'):
    return ScriptedMock(
        [
            ("trajectory summary", scd),
            ("probability", probability),
        ]
    )


class TestClassify:
    def test_inclusive_threshold(self):
        assert classify(0.50, 0.5) is True

    def test_below_threshold(self):
        assert classify(0.49, 0.5) is False

    def test_zero_boundary(self):
        assert classify(0.0, 0.0) is True


class TestInterventionPolicy:
    def test_band_membership(self):
        policy = InterventionPolicy(0.4, 0.6)
        assert recommend_action(0.10, policy) == InterventionAction.NO_ACTION
        assert recommend_action(0.45, policy) == InterventionAction.BOT_REMINDER
        assert recommend_action(0.60, policy) == InterventionAction.MODERATOR_ALERT

    def test_band_edges_inclusive_lower(self):
        policy = InterventionPolicy(0.4, 0.6)
        assert recommend_action(0.4, policy) == InterventionAction.BOT_REMINDER
        assert recommend_action(0.5999, policy) == InterventionAction.BOT_REMINDER

    @pytest.mark.parametrize("low,high", [(0.5, 0.5), (0.6, 0.4), (-0.1, 0.5), (0.5, 1.1)])
    def test_invalid_thresholds_rejected(self, low, high):
        with pytest.raises(ValueError):
            InterventionPolicy(low, high)


class TestTruncateTranscript:
    def big(self, i, size=400):
        return make_comment(i, body="x" * size)

    def test_identity_when_within_budget(self):
        prefix = [self.big(i, 20) for i in range(3)]
        kept, elided = truncate_transcript(prefix, budget_tokens=1000)
        assert kept == prefix
        assert elided == 0

    def test_drops_middles_keeps_first_and_suffix(self):
        prefix = [self.big(i) for i in range(20)]
        # each comment costs 100 + 12 = 112 tokens; budget fits 1 + 7
        kept, elided = truncate_transcript(prefix, budget_tokens=112 * 8)
        assert kept[0] is prefix[0]
        assert kept[1:] == prefix[13:]
        assert elided == 12

    def test_never_reorders(self):
        prefix = [self.big(i) for i in range(10)]
        kept, _ = truncate_transcript(prefix, budget_tokens=112 * 5)
        ids = [c.id for c in kept]
        assert ids == sorted(ids, key=lambda x: int(x[1:]))

    def test_giant_first_comment_overflows(self):
        prefix = [self.big(0, 4000), self.big(1, 10)]
        with pytest.raises(ContextOverflowError) as exc:
            truncate_transcript(prefix, budget_tokens=100)
        assert exc.value.step == "truncate"

    def test_non_positive_budget_rejected(self):
        with pytest.raises(ValueError):
            truncate_transcript([self.big(0)], budget_tokens=0)


class TestPredict:
    def test_pipeline_returns_scripted_values(self, derailed_thread):
        prediction = predict(
            derailed_thread, ScdStrategy.LEAST_TO_MOST, scd_mock()
        )
        assert prediction.probability == 0.85
        assert prediction.scd_summary == "A tense exchange about a bug."
        assert prediction.raw_scd_response.startswith('"')
        assert prediction.template_version == TEMPLATE_VERSION
        assert prediction.strategy == ScdStrategy.LEAST_TO_MOST
        assert prediction.thread_ref == derailed_thread.ref

    def test_only_prefix_enters_transcript(self, derailed_thread):
        prediction = predict(
            derailed_thread, ScdStrategy.LEAST_TO_MOST, scd_mock()
        )
        assert "useless" not in prediction.transcript
        assert "dragging on" in prediction.transcript

    def test_surrounding_quotes_stripped_interior_kept(self, derailed_thread):
        mock = scd_mock(scd='"He said "stop" twice."')
        prediction = predict(derailed_thread, ScdStrategy.GENERIC, mock)
        assert prediction.scd_summary == 'He said "stop" twice.'

    def test_parse_failure_names_predict_step(self, derailed_thread):
        mock = scd_mock(probability="unclear")
        with pytest.raises(ParseFailureError) as exc:
            predict(derailed_thread, ScdStrategy.GENERIC, mock)
        assert exc.value.step == "predict"

    def test_overflow_after_truncation_names_scd_step(self):
        thread = make_thread(
            [make_comment(0, body="y" * 40000), make_comment(1)]
        )
        with pytest.raises(ContextOverflowError) as exc:
            predict(thread, ScdStrategy.GENERIC, scd_mock(),
                    max_context_tokens=2000)
        assert exc.value.step == "scd"

    def test_truncation_applied_and_recorded(self):
        comments = [make_comment(0, body="intro " * 50)]
        comments += [
            make_comment(i, body=f"turn {i} " + "z" * 600)
            for i in range(1, 15)
        ]
        thread = make_thread(comments)
        prediction = predict(thread, ScdStrategy.GENERIC, scd_mock(),
                             max_context_tokens=2000)
        assert prediction.elided_comments > 0
        assert "turn 14" in prediction.transcript
        assert "intro" in prediction.transcript

    def test_toxic_first_comment_rejected(self):
        thread = make_thread(
            [make_comment(0, is_toxic=True), make_comment(1)]
        )
        with pytest.raises(FirstCommentToxicError):
            predict(thread, ScdStrategy.GENERIC, scd_mock())

    def test_drop_bot_comments_flag(self):
        thread = make_thread(
            [
                make_comment(0, body="report text"),
                make_comment(1, body="I am a bot announcement",
                             author="helper[bot]", association="NONE"),
                make_comment(2, body="real reply", author="bob",
                             association="NONE"),
            ]
        )
        with_bots = predict(thread, ScdStrategy.GENERIC, scd_mock())
        without_bots = predict(thread, ScdStrategy.GENERIC, scd_mock(),
                               drop_bot_comments=True)
        assert "bot announcement" in with_bots.transcript
        assert "bot announcement" not in without_bots.transcript

    def test_created_at_defaults_to_last_prefix_timestamp(self, derailed_thread):
        prediction = predict(
            derailed_thread, ScdStrategy.GENERIC, scd_mock()
        )
        assert prediction.created_at == derailed_thread.comments[2].created_at

    def test_explicit_now_wins(self, derailed_thread):
        prediction = predict(
            derailed_thread, ScdStrategy.GENERIC, scd_mock(), now=ts(9, 12)
        )
        assert prediction.created_at == ts(9, 12)

    def test_pure_function_of_thread_strategy_script(self, derailed_thread):
        a = predict(derailed_thread, ScdStrategy.LEAST_TO_MOST, scd_mock())
        b = predict(derailed_thread, ScdStrategy.LEAST_TO_MOST, scd_mock())
        assert a.to_dict() == b.to_dict()


class TestPredictionPersistence:
    def test_round_trip(self, tmp_path, derailed_thread):
        prediction = predict(
            derailed_thread, ScdStrategy.LEAST_TO_MOST, scd_mock()
        )
        path = tmp_path / "predictions.jsonl"
        save_predictions([prediction], path)
        assert load_predictions(path) == [prediction]

    def test_saved_sorted_by_thread(self, tmp_path, derailed_thread):
        p1 = predict(derailed_thread, ScdStrategy.GENERIC, scd_mock())
        other = make_thread(
            [make_comment(0), make_comment(1)], repo="aaa/first", number=2
        )
        p2 = predict(other, ScdStrategy.GENERIC, scd_mock())
        path = tmp_path / "predictions.jsonl"
        save_predictions([p1, p2], path)
        loaded = load_predictions(path)
        assert [p.repo for p in loaded] == ["aaa/first", "octo/demo"]

    def test_dict_round_trip(self, derailed_thread):
        prediction = predict(derailed_thread, ScdStrategy.GENERIC, scd_mock())
        assert DerailmentPrediction.from_dict(prediction.to_dict()) == prediction
