from datetime import timedelta

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from derailwatch.analytics import TimingBucket, lower_median, timing_bucket
from derailwatch.evaluation import cohens_kappa, is_undefined, sweep
from derailwatch.gateway import estimate_tokens, parse_probability
from derailwatch.model import (
    TBDF,
    ConversationThread,
    load_corpus,
    save_corpus,
)
from derailwatch.predictor import (
    InterventionAction,
    InterventionPolicy,
    classify,
    recommend_action,
)
from derailwatch.prompts import ScdStrategy

from .conftest import make_comment, make_thread
from .test_evaluation import prediction

probabilities = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


class TestClassify:
    @given(p=probabilities, t=probabilities)
    def test_inclusive_boundary(self, p, t):
        assert classify(p, t) == (p >= t)
        assert classify(t, t) is True

    @given(p1=probabilities, p2=probabilities, t=probabilities)
    def test_monotone_in_probability(self, p1, p2, t):
        lo, hi = sorted((p1, p2))
        if classify(lo, t):
            assert classify(hi, t)

    @given(p=probabilities, t1=probabilities, t2=probabilities)
    def test_antitone_in_threshold(self, p, t1, t2):
        lo, hi = sorted((t1, t2))
        if classify(p, hi):
            assert classify(p, lo)


class TestInterventionBands:
    policies = st.tuples(probabilities, probabilities).filter(
        lambda pair: pair[0] < pair[1]
    ).map(lambda pair: InterventionPolicy(*pair))

    @given(p=probabilities, policy=policies)
    def test_every_probability_gets_exactly_one_action(self, p, policy):
        action = recommend_action(p, policy)
        expected = (
            InterventionAction.MODERATOR_ALERT
            if p >= policy.high_threshold
            else InterventionAction.BOT_REMINDER
            if p >= policy.low_threshold
            else InterventionAction.NO_ACTION
        )
        assert action == expected

    @given(p1=probabilities, p2=probabilities, policy=policies)
    def test_bands_monotone(self, p1, p2, policy):
        severity = {
            InterventionAction.NO_ACTION: 0,
            InterventionAction.BOT_REMINDER: 1,
            InterventionAction.MODERATOR_ALERT: 2,
        }
        lo, hi = sorted((p1, p2))
        assert severity[recommend_action(lo, policy)] <= severity[
            recommend_action(hi, policy)
        ]


class TestTimingBuckets:
    deltas = st.timedeltas(
        min_value=timedelta(seconds=1), max_value=timedelta(days=60)
    )

    @given(delta=deltas)
    def test_total_over_positive_deltas(self, delta):
        assert isinstance(timing_bucket(delta), TimingBucket)

    @given(d1=deltas, d2=deltas)
    def test_monotone_in_delta(self, d1, d2):
        order = list(TimingBucket)
        lo, hi = sorted((d1, d2))
        assert order.index(timing_bucket(lo)) <= order.index(timing_bucket(hi))

    @given(values=st.lists(st.integers(), min_size=1))
    def test_lower_median_is_an_element_with_balanced_rank(self, values):
        median = lower_median(values)
        assert median in values
        assert sum(1 for v in values if v < median) <= (len(values) - 1) // 2
        assert sum(1 for v in values if v > median) <= len(values) // 2


def thread_strategy():
    def build(n, toxic_at, derailment_at):
        comments = []
        for i in range(n):
            is_toxic = toxic_at is not None and i >= toxic_at
            comments.append(
                make_comment(
                    i,
                    is_toxic=is_toxic,
                    is_derailment_point=(i == derailment_at),
                    tbdfs=frozenset({TBDF.IMPATIENCE})
                    if i == derailment_at
                    else frozenset(),
                )
            )
        return make_thread(comments, number=1)

    def configs(n):
        toxic_positions = st.one_of(st.none(), st.integers(1, n - 1))
        return toxic_positions.flatmap(
            lambda toxic_at: st.builds(
                lambda derailment_at: build(n, toxic_at, derailment_at),
                st.one_of(st.none(), st.integers(0, toxic_at - 1))
                if toxic_at is not None
                else st.none(),
            )
        )

    return st.integers(min_value=2, max_value=8).flatmap(configs)


class TestCorpusRoundTrip:
    @settings(max_examples=30)
    @given(thread=thread_strategy())
    def test_save_load_is_identity(self, thread, tmp_path_factory):
        path = tmp_path_factory.mktemp("corpus") / "c.jsonl"
        save_corpus([thread], path)
        assert load_corpus(path) == [thread]

    @given(thread=thread_strategy())
    def test_dict_round_trip_is_identity(self, thread):
        assert ConversationThread.from_dict(thread.to_dict()) == thread


class TestKappa:
    label_pairs = st.lists(
        st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=50
    )

    @given(pairs=label_pairs)
    def test_symmetry(self, pairs):
        a = [x for x, _ in pairs]
        b = [y for _, y in pairs]
        assert cohens_kappa(a, b) == cohens_kappa(b, a)

    @given(pairs=label_pairs)
    def test_bounded_or_undefined(self, pairs):
        a = [x for x, _ in pairs]
        b = [y for _, y in pairs]
        kappa = cohens_kappa(a, b)
        assert is_undefined(kappa) or -1.0 <= kappa <= 1.0


class TestSweepMonotonicity:
    scored = st.lists(
        st.tuples(probabilities, st.booleans()), min_size=1, max_size=20
    )

    @given(scored=scored, thresholds=st.lists(probabilities, min_size=2,
                                              max_size=5, unique=True))
    def test_recall_non_increasing_in_threshold(self, scored, thresholds):
        predictions = [
            prediction("r/x", i, p, strategy=ScdStrategy.LEAST_TO_MOST)
            for i, (p, _) in enumerate(scored)
        ]
        labels = {f"r/x#{i}": label for i, (_, label) in enumerate(scored)}
        report = sweep(predictions, labels, thresholds=thresholds)
        tps = [row.counts.tp for row in report.rows]
        fps = [row.counts.fp for row in report.rows]
        assert tps == sorted(tps, reverse=True)
        assert fps == sorted(fps, reverse=True)
        for row in report.rows:
            assert row.counts.total == len(scored)


class TestTokenEstimate:
    @given(text=st.text(max_size=200), suffix=st.text(max_size=200))
    def test_monotone_under_extension(self, text, suffix):
        assert estimate_tokens(text) <= estimate_tokens(text + suffix)

    @given(text=st.text(max_size=400))
    def test_quarter_length_ceiling(self, text):
        estimate = estimate_tokens(text)
        assert 4 * (estimate - 1) < len(text) <= 4 * estimate or (
            not text and estimate == 0
        )


class TestParseProbability:
    @given(value=st.integers(0, 100).map(lambda n: n / 100))
    def test_strict_round_trip_of_two_decimal_literals(self, value):
        assert parse_probability(f"{value:.2f}") == pytest.approx(value)

    @given(value=st.integers(0, 100).map(lambda n: n / 100),
           prefix=st.sampled_from(["Probability: ", "I'd say ", "p = "]))
    def test_lenient_extraction_matches_strict_value(self, value, prefix):
        assert parse_probability(prefix + f"{value:.2f}") == pytest.approx(value)
