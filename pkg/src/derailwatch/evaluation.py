"""Classification metrics, threshold sweeps, and comparison reports.

Metrics with empty denominators return the UNDEFINED marker rather than a
conventional zero; reports render them as an em-dash so no fabricated
number can be mistaken for a measured one.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DerailwatchError
from .model import ConversationThread, CorpusPartition, partition
from .predictor import DerailmentPrediction, classify

DEFAULT_THRESHOLDS = (0.4, 0.5, 0.6)


class EvaluationInputError(DerailwatchError):
    pass


class _Undefined:
    """Marker for a metric whose denominator is empty."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNDEFINED"


UNDEFINED = _Undefined()


def is_undefined(value) -> bool:
    return value is UNDEFINED


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "fp", "tn", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def precision(c: ConfusionCounts):
    if c.tp + c.fp == 0:
        return UNDEFINED
    return c.tp / (c.tp + c.fp)


def recall(c: ConfusionCounts):
    if c.tp + c.fn == 0:
        return UNDEFINED
    return c.tp / (c.tp + c.fn)


def f1(c: ConfusionCounts):
    p, r = precision(c), recall(c)
    if is_undefined(p) or is_undefined(r) or p + r == 0:
        return UNDEFINED
    return 2 * p * r / (p + r)


def f1_from_pr(p: float, r: float):
    if p + r == 0:
        return UNDEFINED
    return 2 * p * r / (p + r)


def cohens_kappa(labels_a: Sequence[bool], labels_b: Sequence[bool]):
    """Cohen's kappa with marginal-product expected agreement."""
    if len(labels_a) != len(labels_b):
        raise EvaluationInputError(
            f"label sequences differ in length: {len(labels_a)} vs {len(labels_b)}"
        )
    if not labels_a:
        raise EvaluationInputError("label sequences must be non-empty")
    n = len(labels_a)
    observed = sum(1 for a, b in zip(labels_a, labels_b) if a == b) / n
    pa = sum(labels_a) / n
    pb = sum(labels_b) / n
    expected = pa * pb + (1 - pa) * (1 - pb)
    if expected == 1.0:
        return UNDEFINED
    return (observed - expected) / (1 - expected)


@dataclass(frozen=True)
class ReportRow:
    strategy: str
    threshold: float
    counts: ConfusionCounts
    precision: object
    recall: object
    f1: object


@dataclass(frozen=True)
class EvaluationReport:
    rows: tuple[ReportRow, ...]
    parse_failure_count: int
    positives: int
    negatives: int

    def to_dict(self) -> dict:
        def metric(value):
            return None if is_undefined(value) else round(value, 2)

        return {
            "positives": self.positives,
            "negatives": self.negatives,
            "parse_failure_count": self.parse_failure_count,
            "rows": [
                {
                    "strategy": row.strategy,
                    "threshold": row.threshold,
                    "tp": row.counts.tp,
                    "fp": row.counts.fp,
                    "tn": row.counts.tn,
                    "fn": row.counts.fn,
                    "precision": metric(row.precision),
                    "recall": metric(row.recall),
                    "f1": metric(row.f1),
                }
                for row in self.rows
            ],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def labels_from_corpus(corpus: Iterable[ConversationThread]) -> dict[str, bool]:
    """Derailed toxic threads are positives, non-toxic threads negatives.

    Abruptly toxic threads have no derailment to forecast and are left out
    of the evaluation universe.
    """
    labels: dict[str, bool] = {}
    for thread in corpus:
        part = partition(thread)
        if part == CorpusPartition.DERAILED_TOXIC:
            labels[thread.ref] = True
        elif part == CorpusPartition.NON_TOXIC:
            labels[thread.ref] = False
    return labels


def sweep(
    predictions: Sequence[DerailmentPrediction],
    labels: dict[str, bool],
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    parse_failure_refs: Sequence[str] = (),
    parse_failure_policy: str = "negative",
) -> EvaluationReport:
    """Confusion counts and metrics per (strategy, threshold).

    Parse failures are counted as predicted-negative by default
    (conservative for precision); policy "exclude" drops them instead.
    The failure count is always reported.
    """
    if parse_failure_policy not in ("negative", "exclude"):
        raise ValueError(f"unknown parse failure policy: {parse_failure_policy}")
    ref_counts = Counter((p.strategy.value, p.thread_ref) for p in predictions)
    duplicates = [key for key, n in ref_counts.items() if n > 1]
    if duplicates:
        raise EvaluationInputError(f"duplicate predictions for: {duplicates}")
    for prediction in predictions:
        if prediction.thread_ref not in labels:
            raise EvaluationInputError(
                f"prediction for unlabeled thread {prediction.thread_ref}"
            )
    for ref in parse_failure_refs:
        if ref not in labels:
            raise EvaluationInputError(f"parse failure for unlabeled thread {ref}")

    failed_labels = [labels[ref] for ref in parse_failure_refs]
    strategies = sorted({p.strategy.value for p in predictions})
    rows = []
    for strategy in strategies:
        strat_predictions = [p for p in predictions if p.strategy.value == strategy]
        for threshold in sorted(thresholds):
            tp = fp = tn = fn = 0
            for p in strat_predictions:
                predicted = classify(p.probability, threshold)
                actual = labels[p.thread_ref]
                if predicted and actual:
                    tp += 1
                elif predicted and not actual:
                    fp += 1
                elif not predicted and actual:
                    fn += 1
                else:
                    tn += 1
            if parse_failure_policy == "negative":
                fn += sum(1 for label in failed_labels if label)
                tn += sum(1 for label in failed_labels if not label)
            counts = ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)
            rows.append(
                ReportRow(
                    strategy=strategy,
                    threshold=threshold,
                    counts=counts,
                    precision=precision(counts),
                    recall=recall(counts),
                    f1=f1(counts),
                )
            )
    evaluated_refs = {p.thread_ref for p in predictions} | set(parse_failure_refs)
    positives = sum(1 for ref in evaluated_refs if labels[ref])
    return EvaluationReport(
        rows=tuple(rows),
        parse_failure_count=len(parse_failure_refs),
        positives=positives,
        negatives=len(evaluated_refs) - positives,
    )


def render_report(report: EvaluationReport) -> str:
    """Fixed-width table with the Model / T / Precision / Recall / F1 layout."""

    def metric(value) -> str:
        return "—" if is_undefined(value) else f"{value:.2f}"

    lines = [
        f"{'Model':<16}{'T (>=)':<8}{'Precision':<11}{'Recall':<8}{'F1':<6}",
        "-" * 49,
    ]
    for row in report.rows:
        lines.append(
            f"{row.strategy:<16}{row.threshold:<8.1f}"
            f"{metric(row.precision):<11}{metric(row.recall):<8}{metric(row.f1):<6}"
        )
    lines.append("")
    lines.append(
        f"positives={report.positives} negatives={report.negatives} "
        f"parse_failures={report.parse_failure_count}"
    )
    return "\n".join(lines) + "\n"
