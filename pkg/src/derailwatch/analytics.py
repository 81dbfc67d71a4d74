"""Corpus-level empirical statistics for annotated GitHub conversation corpora.

Every percentage is stored as its (numerator, denominator) pair so reports
stay auditable. Medians use the lower-median convention for even-length
samples; the convention name is recorded in the report itself.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from datetime import timedelta
from enum import Enum
from typing import Iterable

from .errors import EmptyCorpusError, NonPositiveDeltaError
from .model import (
    TBDF,
    AuthorRole,
    Comment,
    ConversationThread,
    CorpusPartition,
    TriggerType,
    partition,
)
from .textfeat import LexiconSet, extract_features


class TimingBucket(Enum):
    LT_ONE_HOUR = "lt_1h"
    ONE_TO_THREE_HOURS = "1h_3h"
    THREE_TO_SIX_HOURS = "3h_6h"
    SIX_TO_TWELVE_HOURS = "6h_12h"
    TWELVE_TO_TWENTY_FOUR_HOURS = "12h_24h"
    ONE_TO_SEVEN_DAYS = "1d_7d"
    GT_ONE_WEEK = "gt_1w"


_BUCKET_LABELS = {
    TimingBucket.LT_ONE_HOUR: "< 1 hour",
    TimingBucket.ONE_TO_THREE_HOURS: "1-3 hours",
    TimingBucket.THREE_TO_SIX_HOURS: "3-6 hours",
    TimingBucket.SIX_TO_TWELVE_HOURS: "6-12 hours",
    TimingBucket.TWELVE_TO_TWENTY_FOUR_HOURS: "12-24 hours",
    TimingBucket.ONE_TO_SEVEN_DAYS: "1-7 days",
    TimingBucket.GT_ONE_WEEK: "> 1 week",
}

# Half-open upper boundaries [lower, upper); exactly 1 hour lands in 1-3h.
_BUCKET_UPPER_BOUNDS = [
    (timedelta(hours=1), TimingBucket.LT_ONE_HOUR),
    (timedelta(hours=3), TimingBucket.ONE_TO_THREE_HOURS),
    (timedelta(hours=6), TimingBucket.THREE_TO_SIX_HOURS),
    (timedelta(hours=12), TimingBucket.SIX_TO_TWELVE_HOURS),
    (timedelta(hours=24), TimingBucket.TWELVE_TO_TWENTY_FOUR_HOURS),
    (timedelta(days=7), TimingBucket.ONE_TO_SEVEN_DAYS),
]

GHOST_HANDLE = "ghost"

LEXICAL_CUES = (
    "second_person",
    "wh_question",
    "negation",
    "reasoning",
    "emphasis",
    "communication_verbs",
)

DEFAULT_LABEL_SYNONYMS: dict[str, tuple[str, ...]] = {
    "bug": ("bug",),
    "feature": ("feature", "enhancement", "suggestion", "proposal"),
    "help_wanted": ("help wanted", "help-wanted", "help"),
    "wontfix_rejected": ("wontfix", "won't fix", "rejected", "invalid", "declined"),
    "positive_status": ("approved", "completed", "resolved", "fixed", "merged", "done"),
}


@dataclass(frozen=True)
class Ratio:
    """A count over its universe, kept unreduced for auditability."""

    numerator: int
    denominator: int

    @property
    def fraction(self) -> float:
        if self.denominator == 0:
            raise ZeroDivisionError("ratio over an empty universe")
        return self.numerator / self.denominator

    @property
    def percent(self) -> float:
        return round(100.0 * self.fraction, 2)

    def to_dict(self) -> dict:
        return {
            "numerator": self.numerator,
            "denominator": self.denominator,
            "percent": self.percent if self.denominator else None,
        }

    def __str__(self) -> str:
        pct = f"{self.percent:.2f}%" if self.denominator else "—"
        return f"{self.numerator}/{self.denominator} ({pct})"


def lower_median(values: list) -> object:
    if not values:
        raise ValueError("median of empty sample")
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def timing_bucket(delta: timedelta) -> TimingBucket:
    if delta <= timedelta(0):
        raise NonPositiveDeltaError(f"non-positive delta: {delta}")
    for upper, bucket in _BUCKET_UPPER_BOUNDS:
        if delta < upper:
            return bucket
    return TimingBucket.GT_ONE_WEEK


@dataclass
class CorpusStats:
    conventions: dict = field(default_factory=lambda: {"median": "lower"})
    partition_counts: dict[str, int] = field(default_factory=dict)
    role_comment_shares: dict | None = None
    initiator_role_counts: dict | None = None
    first_toxic_author_role_counts: dict | None = None
    median_thread_length: dict | None = None
    first_toxic_position_median: int | None = None
    first_toxic_position_cumulative: dict | None = None
    timing_histogram: dict | None = None
    reference_rates: dict | None = None
    tbdf_toxicity_rates: dict | None = None
    label_category_counts: dict | None = None
    labeled_thread_share: Ratio | None = None
    derailment_distance_median: int | None = None
    derailment_within_8h: Ratio | None = None
    derailment_tbdf_distribution: dict | None = None
    trigger_distribution: dict | None = None
    lexical_cue_prevalence: dict | None = None

    def to_dict(self) -> dict:
        def conv(value):
            if isinstance(value, Ratio):
                return value.to_dict()
            if isinstance(value, Enum):
                return value.value
            if isinstance(value, dict):
                return {
                    (k.value if isinstance(k, Enum) else k): conv(v)
                    for k, v in value.items()
                }
            if isinstance(value, (list, tuple)):
                return [conv(v) for v in value]
            return value

        return {
            name: conv(getattr(self, name))
            for name in (
                "conventions",
                "partition_counts",
                "role_comment_shares",
                "initiator_role_counts",
                "first_toxic_author_role_counts",
                "median_thread_length",
                "first_toxic_position_median",
                "first_toxic_position_cumulative",
                "timing_histogram",
                "reference_rates",
                "tbdf_toxicity_rates",
                "label_category_counts",
                "labeled_thread_share",
                "derailment_distance_median",
                "derailment_within_8h",
                "derailment_tbdf_distribution",
                "trigger_distribution",
                "lexical_cue_prevalence",
            )
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)


def _thread_has_ghost(thread: ConversationThread) -> bool:
    return any(c.author_handle == GHOST_HANDLE for c in thread.comments)


def _inter_comment_deltas(thread: ConversationThread) -> list[timedelta]:
    return [
        cur.created_at - prev.created_at
        for prev, cur in zip(thread.comments, thread.comments[1:])
    ]


def first_toxic_timing(
    corpus: Iterable[ConversationThread],
) -> dict[TimingBucket, tuple[int, int]]:
    """Per bucket: (threads whose first-toxic delta lands there,
    how many of those deltas are strictly shorter than the thread's
    median inter-comment delta)."""
    counts = {bucket: [0, 0] for bucket in TimingBucket}
    for thread in corpus:
        k = thread.first_toxic_index
        if k is None or k == 0:
            continue
        delta = thread.comments[k].created_at - thread.comments[k - 1].created_at
        if delta <= timedelta(0):
            continue
        bucket = timing_bucket(delta)
        counts[bucket][0] += 1
        deltas = _inter_comment_deltas(thread)
        if delta < lower_median(deltas):
            counts[bucket][1] += 1
    return {bucket: (c[0], c[1]) for bucket, c in counts.items()}


def derailment_stats(
    corpus: Iterable[ConversationThread],
) -> tuple[int, Ratio, dict[TBDF, Ratio]] | None:
    """(distance median, within-8h share, TBDF distribution) over derailed threads."""
    derailed = [t for t in corpus if partition(t) == CorpusPartition.DERAILED_TOXIC]
    if not derailed:
        return None
    distances = []
    within_8h = 0
    tbdf_counts: Counter[TBDF] = Counter()
    for thread in derailed:
        d = thread.derailment_index
        t = thread.first_toxic_index
        distances.append(t - d)
        delta = thread.comments[t].created_at - thread.comments[d].created_at
        if delta <= timedelta(hours=8):
            within_8h += 1
        for tbdf in thread.comments[d].tbdfs:
            tbdf_counts[tbdf] += 1
    n = len(derailed)
    distribution = {tbdf: Ratio(c, n) for tbdf, c in sorted(tbdf_counts.items(), key=lambda kv: kv[0].value)}
    return lower_median(distances), Ratio(within_8h, n), distribution


def label_categories(
    corpus: Iterable[ConversationThread],
    synonyms: dict[str, tuple[str, ...]] | None = None,
) -> tuple[dict[str, Ratio], Ratio]:
    """Keyword-driven label categories over labeled toxic threads.

    A thread counts once per matched category; labeled threads matching
    no category count under "other".
    """
    if synonyms is None:
        synonyms = DEFAULT_LABEL_SYNONYMS
    toxic = [t for t in corpus if t.is_toxic_thread]
    labeled = [t for t in toxic if t.labels]
    counts: Counter[str] = Counter()
    for thread in labeled:
        lowered = [label.lower() for label in thread.labels]
        matched = False
        for category, keywords in synonyms.items():
            if any(kw in label for label in lowered for kw in keywords):
                counts[category] += 1
                matched = True
        if not matched:
            counts["other"] += 1
    n = len(labeled)
    result = {cat: Ratio(c, n) for cat, c in sorted(counts.items())}
    return result, Ratio(n, len(toxic)) if toxic else Ratio(0, 0)


def _reference_rates_for(
    comments: list[Comment], lexicons: LexiconSet
) -> dict[str, Ratio]:
    n = len(comments)
    mention = quote = second = first = both = 0
    for c in comments:
        fv = extract_features(c, lexicons)
        mention += bool(fv.mentions)
        quote += fv.has_quote
        second += fv.has_second_person
        first += fv.has_first_person
        both += fv.has_second_person and fv.has_first_person
    return {
        "mention": Ratio(mention, n),
        "quote": Ratio(quote, n),
        "second_person": Ratio(second, n),
        "first_person": Ratio(first, n),
        "both_pronouns": Ratio(both, n),
    }


def _cue_flags(fv) -> dict[str, bool]:
    return {
        "second_person": fv.has_second_person,
        "wh_question": fv.has_wh,
        "negation": fv.has_negation,
        "reasoning": fv.has_reasoning,
        "emphasis": fv.has_emphasis,
        "communication_verbs": fv.has_comm_verb,
    }


def compute_stats(
    corpus: list[ConversationThread], lexicons: LexiconSet | None = None
) -> CorpusStats:
    """All corpus statistics in one deterministic pass.

    Role-based figures exclude threads containing ghost (deleted) authors,
    whose associations are no longer observable; those threads keep their
    place in every non-role universe.
    """
    if not corpus:
        raise EmptyCorpusError("cannot compute statistics over an empty corpus")
    if lexicons is None:
        lexicons = LexiconSet.default()

    corpus = sorted(corpus, key=lambda t: (t.repo, t.number))
    stats = CorpusStats()

    parts = {t.ref: partition(t) for t in corpus}
    toxic = [t for t in corpus if parts[t.ref] != CorpusPartition.NON_TOXIC]
    non_toxic = [t for t in corpus if parts[t.ref] == CorpusPartition.NON_TOXIC]
    derailed = [t for t in corpus if parts[t.ref] == CorpusPartition.DERAILED_TOXIC]
    abrupt = [t for t in corpus if parts[t.ref] == CorpusPartition.ABRUPT_TOXIC]
    stats.partition_counts = {
        "toxic": len(toxic),
        "derailed_toxic": len(derailed),
        "abrupt_toxic": len(abrupt),
        "non_toxic": len(non_toxic),
    }

    # Role-based stats over threads with fully observable authors.
    role_known_toxic = [t for t in toxic if not _thread_has_ghost(t)]
    role_known_non_toxic = [t for t in non_toxic if not _thread_has_ghost(t)]

    def comment_shares(threads):
        all_comments = [c for t in threads for c in t.comments]
        n = len(all_comments)
        contrib = sum(
            1 for c in all_comments if c.role == AuthorRole.PROJECT_CONTRIBUTOR
        )
        return {
            "project_contributor": Ratio(contrib, n),
            "external_participant": Ratio(n - contrib, n),
        }

    def initiator_counts(threads):
        n = len(threads)
        external = sum(
            1
            for t in threads
            if t.comments[0].role == AuthorRole.EXTERNAL_PARTICIPANT
        )
        return {
            "external_participant": Ratio(external, n),
            "project_contributor": Ratio(n - external, n),
        }

    stats.role_comment_shares = {}
    stats.initiator_role_counts = {}
    if role_known_toxic:
        stats.role_comment_shares["toxic"] = comment_shares(role_known_toxic)
        stats.initiator_role_counts["toxic"] = initiator_counts(role_known_toxic)
    if role_known_non_toxic:
        stats.role_comment_shares["non_toxic"] = comment_shares(role_known_non_toxic)
        stats.initiator_role_counts["non_toxic"] = initiator_counts(
            role_known_non_toxic
        )

    if role_known_toxic:
        n = len(role_known_toxic)
        contrib_first_toxic = sum(
            1
            for t in role_known_toxic
            if t.comments[t.first_toxic_index].role == AuthorRole.PROJECT_CONTRIBUTOR
        )
        stats.first_toxic_author_role_counts = {
            "project_contributor": Ratio(contrib_first_toxic, n),
            "external_participant": Ratio(n - contrib_first_toxic, n),
        }

    stats.median_thread_length = {}
    if toxic:
        stats.median_thread_length["toxic"] = lower_median(
            [len(t.comments) for t in toxic]
        )
    if non_toxic:
        stats.median_thread_length["non_toxic"] = lower_median(
            [len(t.comments) for t in non_toxic]
        )

    # Position of the first toxic comment, counted in comments after the
    # initiating post (index 0 = initiating post itself).
    positions = [t.first_toxic_index for t in toxic if t.first_toxic_index is not None]
    if positions:
        stats.first_toxic_position_median = lower_median(positions)
        stats.first_toxic_position_cumulative = {
            k: Ratio(sum(1 for p in positions if p <= k), len(positions))
            for k in (3, 5, 7, 10)
        }

    if toxic:
        timing = first_toxic_timing(toxic)
        total = sum(c for c, _ in timing.values())
        stats.timing_histogram = {
            bucket: {
                "count": Ratio(c, total),
                "shorter_than_thread_median": Ratio(s, c) if c else Ratio(0, 0),
            }
            for bucket, (c, s) in timing.items()
        }

    # Mention/quote/pronoun rates per comment class.
    stats.reference_rates = {}
    first_toxic_comments = [
        t.comments[t.first_toxic_index]
        for t in toxic
        if t.first_toxic_index is not None
    ]
    toxic_thread_comments = [c for t in toxic for c in t.comments]
    non_toxic_thread_comments = [c for t in non_toxic for c in t.comments]
    if first_toxic_comments:
        stats.reference_rates["first_toxic"] = _reference_rates_for(
            first_toxic_comments, lexicons
        )
    if toxic_thread_comments:
        stats.reference_rates["toxic_thread_comments"] = _reference_rates_for(
            toxic_thread_comments, lexicons
        )
    if non_toxic_thread_comments:
        stats.reference_rates["non_toxic_thread_comments"] = _reference_rates_for(
            non_toxic_thread_comments, lexicons
        )

    # Fraction of comments carrying each TBDF that are also toxic.
    tbdf_totals: Counter[TBDF] = Counter()
    tbdf_toxic: Counter[TBDF] = Counter()
    for t in corpus:
        for c in t.comments:
            for tbdf in c.tbdfs:
                tbdf_totals[tbdf] += 1
                if c.is_toxic:
                    tbdf_toxic[tbdf] += 1
    if tbdf_totals:
        stats.tbdf_toxicity_rates = {
            tbdf: Ratio(tbdf_toxic[tbdf], tbdf_totals[tbdf])
            for tbdf in sorted(tbdf_totals, key=lambda x: x.value)
        }

    if toxic:
        categories, labeled_share = label_categories(corpus)
        stats.label_category_counts = categories
        stats.labeled_thread_share = labeled_share

    derail = derailment_stats(corpus)
    if derail is not None:
        stats.derailment_distance_median = derail[0]
        stats.derailment_within_8h = derail[1]
        stats.derailment_tbdf_distribution = derail[2]

    triggers = [t.trigger for t in derailed if t.trigger is not None]
    if triggers:
        counts: Counter[TriggerType] = Counter(triggers)
        stats.trigger_distribution = {
            trig: Ratio(counts[trig], len(derailed))
            for trig in sorted(counts, key=lambda x: x.value)
        }

    # Lexical cue prevalence over three comment universes.
    all_comments = [c for t in corpus for c in t.comments]
    derailment_points = [
        t.comments[t.derailment_index]
        for t in corpus
        if t.derailment_index is not None
    ]
    tbdf_comments = [c for t in corpus for c in t.comments if c.tbdfs]

    def cue_prevalence(comments):
        n = len(comments)
        cue_counts = Counter()
        for c in comments:
            flags = _cue_flags(extract_features(c, lexicons))
            for cue, present in flags.items():
                if present:
                    cue_counts[cue] += 1
        return {cue: Ratio(cue_counts[cue], n) for cue in LEXICAL_CUES}

    prevalence: dict[str, dict] = {}
    universes = {
        "all_comments": all_comments,
        "derailment_points": derailment_points,
        "tbdf_comments": tbdf_comments,
    }
    by_universe = {
        name: cue_prevalence(comments)
        for name, comments in universes.items()
        if comments
    }
    for cue in LEXICAL_CUES:
        prevalence[cue] = {
            name: rates[cue] for name, rates in by_universe.items()
        }
    stats.lexical_cue_prevalence = prevalence

    return stats


def render_text_report(stats: CorpusStats) -> str:
    """Plain-text tables mirroring the timing and lexical-cue summaries."""
    lines: list[str] = []
    lines.append("Corpus statistics")
    lines.append("=================")
    lines.append(f"Median convention: {stats.conventions['median']}")
    lines.append("")
    lines.append("Partitions: " + ", ".join(
        f"{k}={v}" for k, v in stats.partition_counts.items()
    ))
    if stats.median_thread_length:
        lines.append("Median thread length: " + ", ".join(
            f"{k}={v}" for k, v in stats.median_thread_length.items()
        ))
    if stats.timing_histogram:
        lines.append("")
        lines.append("Time since previous comment (first toxic comment)")
        lines.append(f"{'Timeframe':<14}{'Count':<22}{'Shorter than thread median'}")
        for bucket in TimingBucket:
            row = stats.timing_histogram[bucket]
            lines.append(
                f"{_BUCKET_LABELS[bucket]:<14}{str(row['count']):<22}"
                f"{row['shorter_than_thread_median']}"
            )
    if stats.lexical_cue_prevalence:
        lines.append("")
        lines.append("Lexical cue prevalence")
        header = f"{'Cue':<22}{'All':<20}{'Derailment pts':<20}{'TBDF'}"
        lines.append(header)
        for cue, rates in stats.lexical_cue_prevalence.items():
            cells = [
                str(rates[name]) if name in rates else "—"
                for name in ("all_comments", "derailment_points", "tbdf_comments")
            ]
            lines.append(f"{cue:<22}{cells[0]:<20}{cells[1]:<20}{cells[2]}")
    return "\n".join(lines) + "\n"
