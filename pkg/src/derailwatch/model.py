"""Typed domain model for GitHub conversations with canonical JSONL persistence.

A conversation thread is the initiating issue/PR post (``comments[0]``)
followed by the reply comments in timestamp order. Annotations (toxicity,
tone features, derailment points, triggers) live directly on the comments
so that a single JSONL file carries both raw and annotated corpora.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterable

from .errors import (
    CorpusFormatError,
    EmptyThreadError,
    FirstCommentToxicError,
    UnknownAssociationError,
)


class AuthorRole(Enum):
    PROJECT_CONTRIBUTOR = "project_contributor"
    EXTERNAL_PARTICIPANT = "external_participant"


class TBDF(Enum):
    """Uncivil tone-bearing discussion features."""

    BITTER_FRUSTRATION = "bitter_frustration"
    IMPATIENCE = "impatience"
    MOCKING = "mocking"
    IRONY = "irony"
    VULGARITY = "vulgarity"
    THREAT = "threat"
    ENTITLEMENT = "entitlement"
    INSULTING = "insulting"
    IDENTITY_ATTACK_NAME_CALLING = "identity_attack_name_calling"


class TriggerType(Enum):
    FAILED_TOOL_CODE_ERROR = "failed_tool_code_error"
    TECHNICAL_DISAGREEMENT = "technical_disagreement"
    COMMUNICATION_BREAKDOWN = "communication_breakdown"
    POLITICS_IDEOLOGY = "politics_ideology"
    OTHER = "other"


class ThreadKind(Enum):
    ISSUE = "issue"
    PULL_REQUEST = "pull_request"


class CorpusPartition(Enum):
    TOXIC = "toxic"
    DERAILED_TOXIC = "derailed_toxic"
    ABRUPT_TOXIC = "abrupt_toxic"
    NON_TOXIC = "non_toxic"


# GitHub author_association values that count as project contributors.
_CONTRIBUTOR_ASSOCIATIONS = {"OWNER", "COLLABORATOR", "MEMBER", "CONTRIBUTOR"}


def classify_role(author_association: str) -> AuthorRole:
    """Map a raw GitHub author association onto the contributor/external split.

    Case-insensitive. Unknown associations raise rather than silently
    defaulting, so new GitHub roles surface instead of skewing stats.
    """
    normalized = author_association.strip().upper()
    if normalized in _CONTRIBUTOR_ASSOCIATIONS:
        return AuthorRole.PROJECT_CONTRIBUTOR
    if normalized == "NONE":
        return AuthorRole.EXTERNAL_PARTICIPANT
    raise UnknownAssociationError(author_association)


@dataclass(frozen=True)
class Comment:
    id: str
    author_handle: str
    author_association: str
    body: str
    created_at: datetime
    is_toxic: bool = False
    tbdfs: frozenset[TBDF] = frozenset()
    is_derailment_point: bool = False

    def __post_init__(self):
        if self.created_at.tzinfo is None:
            object.__setattr__(
                self, "created_at", self.created_at.replace(tzinfo=timezone.utc)
            )
        else:
            object.__setattr__(
                self, "created_at", self.created_at.astimezone(timezone.utc)
            )
        # seconds precision: drop sub-second noise from mixed sources
        object.__setattr__(self, "created_at", self.created_at.replace(microsecond=0))
        object.__setattr__(self, "tbdfs", frozenset(self.tbdfs))

    @property
    def role(self) -> AuthorRole:
        return classify_role(self.author_association)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "author_handle": self.author_handle,
            "author_association": self.author_association,
            "body": self.body,
            "created_at": self.created_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "is_toxic": self.is_toxic,
            "tbdfs": sorted(t.value for t in self.tbdfs),
            "is_derailment_point": self.is_derailment_point,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Comment":
        return cls(
            id=data["id"],
            author_handle=data["author_handle"],
            author_association=data["author_association"],
            body=data["body"],
            created_at=datetime.strptime(
                data["created_at"], "%Y-%m-%dT%H:%M:%SZ"
            ).replace(tzinfo=timezone.utc),
            is_toxic=data["is_toxic"],
            tbdfs=frozenset(TBDF(t) for t in data["tbdfs"]),
            is_derailment_point=data["is_derailment_point"],
        )


@dataclass(frozen=True)
class ConversationThread:
    repo: str
    number: int
    kind: ThreadKind
    title: str
    labels: tuple[str, ...]
    comments: tuple[Comment, ...]
    locked_reason: str | None = None
    trigger: TriggerType | None = None

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "comments", tuple(self.comments))

    @property
    def is_toxic_thread(self) -> bool:
        return any(c.is_toxic for c in self.comments)

    @property
    def first_toxic_index(self) -> int | None:
        for i, c in enumerate(self.comments):
            if c.is_toxic:
                return i
        return None

    @property
    def derailment_index(self) -> int | None:
        for i, c in enumerate(self.comments):
            if c.is_derailment_point:
                return i
        return None

    @property
    def valid_for_derailment_analysis(self) -> bool:
        """Threads whose initiating post is already toxic carry no usable prefix."""
        return bool(self.comments) and not self.comments[0].is_toxic

    @property
    def ref(self) -> str:
        return f"{self.repo}#{self.number}"

    def validate(self) -> list[str]:
        """Return invariant-violation messages (empty list = valid)."""
        problems: list[str] = []
        if not self.comments:
            problems.append("thread has no comments")
            return problems
        if self.number <= 0:
            problems.append(f"thread number must be positive, got {self.number}")
        for prev, cur in zip(self.comments, self.comments[1:]):
            if cur.created_at < prev.created_at:
                problems.append(
                    f"comment {cur.id} timestamp precedes comment {prev.id}"
                )
        for c in self.comments:
            if c.is_derailment_point and not c.tbdfs:
                problems.append(
                    f"derailment point comment {c.id} has no tone features"
                )
        d, t = self.derailment_index, self.first_toxic_index
        if d is not None and t is not None and d >= t:
            problems.append(
                f"derailment index {d} not before first toxic index {t}"
            )
        return problems

    def to_dict(self) -> dict:
        return {
            "repo": self.repo,
            "number": self.number,
            "kind": self.kind.value,
            "title": self.title,
            "labels": list(self.labels),
            "locked_reason": self.locked_reason,
            "trigger": self.trigger.value if self.trigger else None,
            "comments": [c.to_dict() for c in self.comments],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConversationThread":
        return cls(
            repo=data["repo"],
            number=data["number"],
            kind=ThreadKind(data["kind"]),
            title=data["title"],
            labels=tuple(data["labels"]),
            locked_reason=data["locked_reason"],
            trigger=TriggerType(data["trigger"]) if data["trigger"] else None,
            comments=tuple(Comment.from_dict(c) for c in data["comments"]),
        )


def prefix_before_toxicity(thread: ConversationThread) -> list[Comment]:
    """Comments strictly before the first toxic one; the whole thread if none."""
    if not thread.comments:
        raise EmptyThreadError(f"{thread.ref} has no comments")
    if thread.comments[0].is_toxic:
        raise FirstCommentToxicError(
            f"{thread.ref}: initiating comment is toxic, no prefix exists"
        )
    k = thread.first_toxic_index
    if k is None:
        return list(thread.comments)
    return list(thread.comments[:k])


def partition(thread: ConversationThread) -> CorpusPartition:
    if not thread.is_toxic_thread:
        return CorpusPartition.NON_TOXIC
    t = thread.first_toxic_index
    d = thread.derailment_index
    if d is not None and t is not None and d < t:
        return CorpusPartition.DERAILED_TOXIC
    return CorpusPartition.ABRUPT_TOXIC


def load_corpus(path: str | Path) -> list[ConversationThread]:
    """Load a JSONL corpus, validating every thread's invariants.

    Violations report the 1-based line number they occurred on.
    """
    threads: list[ConversationThread] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(line_number, f"malformed JSON: {exc}") from exc
            try:
                thread = ConversationThread.from_dict(data)
            except (KeyError, ValueError, TypeError) as exc:
                raise CorpusFormatError(line_number, f"schema violation: {exc}") from exc
            problems = thread.validate()
            if problems:
                raise CorpusFormatError(line_number, "; ".join(problems))
            threads.append(thread)
    return threads


def save_corpus(threads: Iterable[ConversationThread], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for thread in threads:
            fh.write(json.dumps(thread.to_dict(), ensure_ascii=False) + "\n")
