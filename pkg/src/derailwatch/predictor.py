"""Two-step derailment prediction: summary generation, then probability.

The pipeline renders an anonymized prefix transcript, asks the gateway for
a trajectory summary, feeds that summary to the predictor prompt, and
parses the returned probability. Threshold classification and the tiered
intervention bands live here too.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterable

from .errors import (
    ContextOverflowError,
    EmptyPrefixError,
    ParseFailureError,
)
from .gateway import ChatRequest, estimate_tokens, parse_probability
from .model import Comment, ConversationThread, prefix_before_toxicity
from .prompts import (
    TEMPLATE_VERSION,
    ScdStrategy,
    build_predictor_prompt,
    build_scd_prompt,
    render_transcript,
)

DEFAULT_MODEL_NAME = "llama-3.1-70b"

# Rendered line overhead per comment beyond the body: alias, role, spacing.
_PER_COMMENT_OVERHEAD_TOKENS = 12


class InterventionAction(Enum):
    NO_ACTION = "no_action"
    BOT_REMINDER = "bot_reminder"
    MODERATOR_ALERT = "moderator_alert"


@dataclass(frozen=True)
class InterventionPolicy:
    low_threshold: float
    high_threshold: float

    def __post_init__(self):
        if not (0.0 <= self.low_threshold < self.high_threshold <= 1.0):
            raise ValueError(
                "thresholds must satisfy 0 <= low < high <= 1, got "
                f"{self.low_threshold}, {self.high_threshold}"
            )


@dataclass(frozen=True)
class DerailmentPrediction:
    repo: str
    number: int
    strategy: ScdStrategy
    scd_summary: str
    probability: float
    template_version: str
    created_at: datetime
    transcript: str
    raw_scd_response: str
    raw_probability_response: str
    elided_comments: int

    @property
    def thread_ref(self) -> str:
        return f"{self.repo}#{self.number}"

    def to_dict(self) -> dict:
        return {
            "repo": self.repo,
            "number": self.number,
            "strategy": self.strategy.value,
            "scd_summary": self.scd_summary,
            "probability": self.probability,
            "template_version": self.template_version,
            "created_at": self.created_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "transcript": self.transcript,
            "raw_scd_response": self.raw_scd_response,
            "raw_probability_response": self.raw_probability_response,
            "elided_comments": self.elided_comments,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DerailmentPrediction":
        return cls(
            repo=data["repo"],
            number=data["number"],
            strategy=ScdStrategy(data["strategy"]),
            scd_summary=data["scd_summary"],
            probability=data["probability"],
            template_version=data["template_version"],
            created_at=datetime.strptime(
                data["created_at"], "%Y-%m-%dT%H:%M:%SZ"
            ).replace(tzinfo=timezone.utc),
            transcript=data["transcript"],
            raw_scd_response=data["raw_scd_response"],
            raw_probability_response=data["raw_probability_response"],
            elided_comments=data["elided_comments"],
        )


def classify(probability: float, threshold: float) -> bool:
    """Positive iff probability >= threshold (inclusive)."""
    return probability >= threshold


def recommend_action(
    probability: float, policy: InterventionPolicy
) -> InterventionAction:
    if probability >= policy.high_threshold:
        return InterventionAction.MODERATOR_ALERT
    if probability >= policy.low_threshold:
        return InterventionAction.BOT_REMINDER
    return InterventionAction.NO_ACTION


def _comment_cost(comment: Comment) -> int:
    return estimate_tokens(comment.body) + _PER_COMMENT_OVERHEAD_TOKENS


def truncate_transcript(
    prefix: list[Comment], budget_tokens: int
) -> tuple[list[Comment], int]:
    """Keep the initiating post plus the longest recent suffix in budget.

    Returns (reduced prefix, number of elided comments). Middles are
    dropped first: the opening post and latest turns carry the trajectory.
    """
    if budget_tokens <= 0:
        raise ValueError("budget must be positive")
    total = sum(_comment_cost(c) for c in prefix)
    if total <= budget_tokens:
        return list(prefix), 0
    remaining = budget_tokens - _comment_cost(prefix[0])
    if remaining < 0:
        raise ContextOverflowError(
            _comment_cost(prefix[0]), budget_tokens, step="truncate"
        )
    kept_suffix: list[Comment] = []
    for comment in reversed(prefix[1:]):
        cost = _comment_cost(comment)
        if cost > remaining:
            break
        kept_suffix.append(comment)
        remaining -= cost
    kept_suffix.reverse()
    elided = len(prefix) - 1 - len(kept_suffix)
    return [prefix[0]] + kept_suffix, elided


def _strip_surrounding_quotes(text: str) -> str:
    stripped = text.strip()
    if len(stripped) >= 2 and stripped[0] == '"' and stripped[-1] == '"':
        return stripped[1:-1].strip()
    return stripped


def _is_bot(comment: Comment) -> bool:
    return comment.author_handle.endswith("[bot]")


def predict(
    thread: ConversationThread,
    strategy: ScdStrategy,
    gateway,
    model_name: str = DEFAULT_MODEL_NAME,
    max_context_tokens: int = 8192,
    drop_bot_comments: bool = False,
    now: datetime | None = None,
) -> DerailmentPrediction:
    """Run the summary -> probability pipeline on a thread's pre-toxicity prefix.

    ``now`` defaults to the timestamp of the last comment being scored so
    that scripted-mock runs are byte-reproducible; live services pass the
    wall clock explicitly.
    """
    prefix = prefix_before_toxicity(thread)
    if drop_bot_comments:
        prefix = [prefix[0]] + [c for c in prefix[1:] if not _is_bot(c)]
    if not prefix:
        raise EmptyPrefixError(f"{thread.ref} has no comments before toxicity")

    scd_bundle = build_scd_prompt(strategy, render_transcript(prefix))
    overhead = estimate_tokens(scd_bundle.user_text) - estimate_tokens(
        render_transcript(prefix).text
    )
    elided = 0
    if estimate_tokens(scd_bundle.user_text) > max_context_tokens:
        budget = max_context_tokens - overhead
        try:
            prefix, elided = truncate_transcript(prefix, budget)
        except ContextOverflowError as exc:
            raise ContextOverflowError(exc.estimated, exc.limit, step="scd") from exc
        scd_bundle = build_scd_prompt(strategy, render_transcript(prefix))

    transcript = render_transcript(prefix)
    scd_request = ChatRequest(
        model_name=model_name,
        messages=(("user", scd_bundle.user_text),),
        max_context_tokens=max_context_tokens,
    )
    try:
        raw_scd = gateway.complete(scd_request)
    except ContextOverflowError as exc:
        raise ContextOverflowError(exc.estimated, exc.limit, step="scd") from exc
    scd_summary = _strip_surrounding_quotes(raw_scd)

    predictor_bundle = build_predictor_prompt(scd_summary)
    predictor_request = ChatRequest(
        model_name=model_name,
        messages=(("user", predictor_bundle.user_text),),
        max_context_tokens=max_context_tokens,
    )
    try:
        raw_probability = gateway.complete(predictor_request)
    except ContextOverflowError as exc:
        raise ContextOverflowError(exc.estimated, exc.limit, step="predict") from exc
    try:
        probability = parse_probability(raw_probability)
    except ParseFailureError as exc:
        raise ParseFailureError(exc.raw_text, step="predict") from exc

    if now is None:
        now = prefix[-1].created_at
    return DerailmentPrediction(
        repo=thread.repo,
        number=thread.number,
        strategy=strategy,
        scd_summary=scd_summary,
        probability=probability,
        template_version=TEMPLATE_VERSION,
        created_at=now,
        transcript=transcript.text,
        raw_scd_response=raw_scd,
        raw_probability_response=raw_probability,
        elided_comments=elided,
    )


def save_predictions(
    predictions: Iterable[DerailmentPrediction], path: str | Path
) -> None:
    ordered = sorted(predictions, key=lambda p: (p.repo, p.number))
    with open(path, "w", encoding="utf-8") as fh:
        for prediction in ordered:
            fh.write(json.dumps(prediction.to_dict(), ensure_ascii=False) + "\n")


def load_predictions(path: str | Path) -> list[DerailmentPrediction]:
    predictions = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            predictions.append(DerailmentPrediction.from_dict(json.loads(line)))
    return predictions
