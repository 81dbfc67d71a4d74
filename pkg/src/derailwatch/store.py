"""Event-sourced persistence for the moderation service.

State is an append-only JSONL event log plus an in-memory index; replaying
the log from empty reconstructs identical service state. Desk-scale by
design: flat files, trivially diffable, no external database.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from .model import ConversationThread
from .predictor import DerailmentPrediction

logger = logging.getLogger("derailwatch.store")


class ErrorCategory(Enum):
    OVERESTIMATES_EFFECT = "overestimates_effect"
    TONE_MISREAD = "tone_misread"
    LOCK_CLOSE_CONFOUND = "lock_close_confound"
    UNDERESTIMATED_TONE = "underestimated_tone"
    CONTEXT_TOO_LONG = "context_too_long"
    CIVILITY_JUXTAPOSITION = "civility_juxtaposition"


DISPOSITION_ACTIONS = ("no_action", "bot_reminder", "moderator_alert", "dismissed")


@dataclass(frozen=True)
class Disposition:
    action_taken: str
    note: str
    actor: str
    at: datetime
    error_category: ErrorCategory | None = None

    def __post_init__(self):
        if self.action_taken not in DISPOSITION_ACTIONS:
            raise ValueError(f"unknown disposition action: {self.action_taken!r}")

    def to_dict(self) -> dict:
        return {
            "action_taken": self.action_taken,
            "error_category": self.error_category.value
            if self.error_category
            else None,
            "note": self.note,
            "actor": self.actor,
            "at": self.at.strftime("%Y-%m-%dT%H:%M:%SZ"),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Disposition":
        return cls(
            action_taken=data["action_taken"],
            error_category=ErrorCategory(data["error_category"])
            if data["error_category"]
            else None,
            note=data["note"],
            actor=data["actor"],
            at=datetime.strptime(data["at"], "%Y-%m-%dT%H:%M:%SZ").replace(
                tzinfo=timezone.utc
            ),
        )


def make_thread_id(repo: str, number: int) -> str:
    # "~" cannot appear in GitHub owner/repo names, so this is collision-free
    # and URL-path safe.
    return f"{repo.replace('/', '~')}~{number}"


@dataclass
class MonitoredThread:
    thread: ConversationThread
    predictions: list[DerailmentPrediction] = field(default_factory=list)
    dispositions: list[Disposition] = field(default_factory=list)
    updated_at: datetime = field(
        default_factory=lambda: datetime.now(timezone.utc).replace(microsecond=0)
    )

    @property
    def id(self) -> str:
        return make_thread_id(self.thread.repo, self.thread.number)

    @property
    def latest_prediction(self) -> DerailmentPrediction | None:
        return self.predictions[-1] if self.predictions else None

    @property
    def latest_disposition(self) -> Disposition | None:
        return self.dispositions[-1] if self.dispositions else None

    @property
    def is_dismissed(self) -> bool:
        latest = self.latest_disposition
        return latest is not None and latest.action_taken == "dismissed"


class ModerationStore:
    """Append-only event log with a single serialized writer."""

    def __init__(self, store_dir: str | Path):
        self.store_dir = Path(store_dir)
        self.store_dir.mkdir(parents=True, exist_ok=True)
        self.log_path = self.store_dir / "events.jsonl"
        self._lock = threading.Lock()
        self._threads: dict[str, MonitoredThread] = {}
        if self.log_path.exists():
            self._replay()

    def _replay(self) -> None:
        for line in self.log_path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                self._apply(json.loads(line))

    def _apply(self, event: dict) -> None:
        at = datetime.strptime(event["at"], "%Y-%m-%dT%H:%M:%SZ").replace(
            tzinfo=timezone.utc
        )
        if event["type"] == "thread_upsert":
            thread = ConversationThread.from_dict(event["thread"])
            thread_id = make_thread_id(thread.repo, thread.number)
            existing = self._threads.get(thread_id)
            if existing is None:
                self._threads[thread_id] = MonitoredThread(
                    thread=thread, updated_at=at
                )
            else:
                existing.thread = thread
                existing.updated_at = at
        elif event["type"] == "prediction":
            record = self._threads[event["thread_id"]]
            record.predictions.append(
                DerailmentPrediction.from_dict(event["prediction"])
            )
            record.updated_at = at
        elif event["type"] == "disposition":
            record = self._threads[event["thread_id"]]
            record.dispositions.append(Disposition.from_dict(event["disposition"]))
            record.updated_at = at
        else:
            raise ValueError(f"unknown event type: {event['type']!r}")

    def _append(self, event: dict) -> None:
        with open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")

    @staticmethod
    def _stamp(at: datetime | None) -> str:
        at = at or datetime.now(timezone.utc)
        return at.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")

    def upsert_thread(
        self, thread: ConversationThread, at: datetime | None = None
    ) -> MonitoredThread:
        """Idempotent on (repo, number); re-posting refreshes comments but
        preserves predictions and dispositions."""
        event = {
            "type": "thread_upsert",
            "at": self._stamp(at),
            "thread": thread.to_dict(),
        }
        with self._lock:
            self._append(event)
            self._apply(event)
            return self._threads[make_thread_id(thread.repo, thread.number)]

    def add_prediction(
        self,
        thread_id: str,
        prediction: DerailmentPrediction,
        at: datetime | None = None,
    ) -> None:
        event = {
            "type": "prediction",
            "at": self._stamp(at),
            "thread_id": thread_id,
            "prediction": prediction.to_dict(),
        }
        with self._lock:
            if thread_id not in self._threads:
                raise KeyError(thread_id)
            self._append(event)
            self._apply(event)

    def add_disposition(
        self, thread_id: str, disposition: Disposition, at: datetime | None = None
    ) -> None:
        event = {
            "type": "disposition",
            "at": self._stamp(at),
            "thread_id": thread_id,
            "disposition": disposition.to_dict(),
        }
        with self._lock:
            record = self._threads.get(thread_id)
            if record is None:
                raise KeyError(thread_id)
            if not record.predictions:
                raise ValueError("disposition requires a prior prediction")
            self._append(event)
            self._apply(event)
        logger.info(
            "disposition thread=%s action=%s category=%s actor=%s",
            thread_id,
            disposition.action_taken,
            disposition.error_category.value if disposition.error_category else "-",
            disposition.actor,
        )

    def get(self, thread_id: str) -> MonitoredThread | None:
        return self._threads.get(thread_id)

    def all_threads(self) -> list[MonitoredThread]:
        return sorted(self._threads.values(), key=lambda r: r.id)

    def flagged(self, threshold: float) -> list[MonitoredThread]:
        """Scored, non-dismissed threads at or above the threshold,
        highest probability first, recency as the tie-breaker."""
        rows = [
            record
            for record in self._threads.values()
            if record.latest_prediction is not None
            and record.latest_prediction.probability >= threshold
            and not record.is_dismissed
        ]
        rows.sort(
            key=lambda r: (
                -r.latest_prediction.probability,
                -r.updated_at.timestamp(),
                r.id,
            )
        )
        return rows
