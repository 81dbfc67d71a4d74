"""GitHub API client: thread fetching, locked-thread listing, and the
seeded non-toxic neighbor-sampling protocol.

The client runs against either a live HTTP transport or a replay
transport backed by a directory of recorded JSON responses keyed by
request-path hash, which is the test substrate.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import time
from dataclasses import dataclass
from pathlib import Path

import requests

from .errors import NotFoundError, RateLimitedError, TransientError
from .model import Comment, ConversationThread, ThreadKind

GHOST_HANDLE = "ghost"

_ENGLISH_STOPWORDS = frozenset(
    "the a an is are to and of in it this that for you i on not with have be".split()
)


@dataclass
class IngestConfig:
    api_base_url: str = "https://api.github.com"
    auth_token: str = ""
    request_timeout: float = 30.0
    max_retries: int = 3
    rate_limit_pause: float = 1.0

    def __post_init__(self):
        if self.request_timeout <= 0:
            raise ValueError("request_timeout must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be non-negative")

    @classmethod
    def from_env(cls) -> "IngestConfig":
        return cls(
            api_base_url=os.environ.get("GITHUB_API_BASE", "https://api.github.com"),
            auth_token=os.environ.get("GITHUB_TOKEN", ""),
        )


@dataclass(frozen=True)
class EligibilityRule:
    min_comments: int = 2
    exclude_locked_reasons: frozenset[str] = frozenset({"too heated"})
    allow_locked_if: str = "resolved"
    english_only: bool = True

    def __post_init__(self):
        if self.min_comments < 1:
            raise ValueError("min_comments must be >= 1")


def is_probably_english(text: str) -> bool:
    """ASCII-letter ratio plus stopword hits; approximate by design."""
    letters = [ch for ch in text if ch.isalpha()]
    if not letters:
        return True
    ascii_ratio = sum(1 for ch in letters if ch.isascii()) / len(letters)
    if ascii_ratio < 0.8:
        return False
    words = {w.strip(".,!?;:()[]\"'").lower() for w in text.split()}
    return bool(words & _ENGLISH_STOPWORDS)


def is_eligible(thread: ConversationThread, rule: EligibilityRule) -> bool:
    # min_comments counts replies, matching GitHub's comment counter
    # (the initiating post is not a "comment" there).
    if len(thread.comments) - 1 < rule.min_comments:
        return False
    if thread.locked_reason is not None:
        if thread.locked_reason in rule.exclude_locked_reasons:
            return False
        if thread.locked_reason != rule.allow_locked_if:
            return False
    if rule.english_only:
        sample_text = " ".join(c.body for c in thread.comments[:3])
        if not is_probably_english(sample_text):
            return False
    return True


def _request_key(path: str, params: dict | None) -> str:
    query = "&".join(f"{k}={v}" for k, v in sorted((params or {}).items()))
    raw = f"{path}?{query}" if query else path
    return hashlib.sha256(raw.encode("utf-8")).hexdigest()


class ReplayTransport:
    """Serves recorded responses from a fixture directory.

    Each fixture file is ``<sha256 of path?query>.json`` holding
    ``{"status": int, "body": ...}``. Missing fixtures answer 404 so
    neighbor scans can skip deleted thread numbers.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.requests_seen: list[str] = []

    def get(self, path: str, params: dict | None = None) -> tuple[int, object]:
        key = _request_key(path, params)
        self.requests_seen.append(path)
        fixture = self.directory / f"{key}.json"
        if not fixture.exists():
            return 404, {"message": "Not Found"}
        data = json.loads(fixture.read_text(encoding="utf-8"))
        return data["status"], data["body"]

    @staticmethod
    def record(directory: str | Path, path: str, params: dict | None, status: int, body) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        fixture = directory / f"{_request_key(path, params)}.json"
        fixture.write_text(
            json.dumps({"status": status, "body": body}, indent=2), encoding="utf-8"
        )
        return fixture


class HttpTransport:
    """Live GitHub API transport with bounded retries and backoff."""

    def __init__(self, config: IngestConfig, session: requests.Session | None = None):
        self.config = config
        self._session = session or requests.Session()
        self._sleep = time.sleep

    def get(self, path: str, params: dict | None = None) -> tuple[int, object]:
        url = self.config.api_base_url.rstrip("/") + path
        headers = {"Accept": "application/vnd.github+json"}
        if self.config.auth_token:
            headers["Authorization"] = f"Bearer {self.config.auth_token}"
        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            if attempt:
                self._sleep(self.config.rate_limit_pause * (2 ** (attempt - 1)))
            try:
                response = self._session.get(
                    url,
                    headers=headers,
                    params=params,
                    timeout=self.config.request_timeout,
                )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if response.status_code in (403, 429):
                retry_after = response.headers.get("Retry-After")
                if retry_after is not None and attempt < self.config.max_retries:
                    self._sleep(float(retry_after))
                    continue
                raise RateLimitedError(
                    f"GitHub rate limit / forbidden on {path}",
                    retry_after=float(retry_after) if retry_after else None,
                )
            if response.status_code >= 500:
                last_error = TransientError(
                    f"HTTP {response.status_code} on {path}"
                )
                continue
            return response.status_code, response.json()
        raise TransientError(f"exhausted retries on {path}: {last_error}")


def _author_of(payload: dict) -> tuple[str, str]:
    user = payload.get("user")
    if not user:
        return GHOST_HANDLE, "NONE"
    return user["login"], payload.get("author_association", "NONE")


class GitHubClient:
    def __init__(self, transport):
        self.transport = transport

    @classmethod
    def from_config(cls, config: IngestConfig) -> "GitHubClient":
        return cls(HttpTransport(config))

    def fetch_thread(self, repo: str, number: int) -> ConversationThread:
        status, issue = self.transport.get(f"/repos/{repo}/issues/{number}")
        if status == 404:
            raise NotFoundError(f"{repo}#{number} not found")
        if status != 200:
            raise TransientError(f"HTTP {status} fetching {repo}#{number}")

        handle, association = _author_of(issue)
        initiating = Comment(
            id=f"issue-{issue['id']}",
            author_handle=handle,
            author_association=association,
            body=issue.get("body") or "",
            created_at=_parse_time(issue["created_at"]),
        )
        replies = []
        for payload in self._paginate(f"/repos/{repo}/issues/{number}/comments"):
            handle, association = _author_of(payload)
            replies.append(
                Comment(
                    id=f"comment-{payload['id']}",
                    author_handle=handle,
                    author_association=association,
                    body=payload.get("body") or "",
                    created_at=_parse_time(payload["created_at"]),
                )
            )
        # timestamp order with id as the tie-breaker
        replies.sort(key=lambda c: (c.created_at, c.id))
        return ConversationThread(
            repo=repo,
            number=number,
            kind=ThreadKind.PULL_REQUEST
            if "pull_request" in issue
            else ThreadKind.ISSUE,
            title=issue.get("title") or "",
            labels=tuple(label["name"] for label in issue.get("labels", [])),
            locked_reason=issue.get("active_lock_reason")
            if issue.get("locked")
            else None,
            comments=tuple([initiating] + replies),
        )

    def _paginate(self, path: str, params: dict | None = None):
        page = 1
        per_page = 100
        while True:
            merged = dict(params or {}, per_page=per_page, page=page)
            status, body = self.transport.get(path, merged)
            if status == 404:
                raise NotFoundError(f"{path} not found")
            if status != 200:
                raise TransientError(f"HTTP {status} on {path}")
            if not body:
                return
            yield from body
            if len(body) < per_page:
                return
            page += 1

    def list_locked_threads(
        self, repo: str, reasons: frozenset[str] | set[str]
    ) -> list[tuple[int, str]]:
        if not reasons:
            return []
        locked = []
        for issue in self._paginate(f"/repos/{repo}/issues", {"state": "all"}):
            reason = issue.get("active_lock_reason")
            if issue.get("locked") and reason in reasons:
                locked.append((issue["number"], reason))
        return sorted(locked)

    def sample_neighbors(
        self,
        repo: str,
        anchor_number: int,
        window: int = 15,
        pick: int = 4,
        rule: EligibilityRule | None = None,
        seed: int = 0,
    ) -> list[ConversationThread]:
        """Uniform seeded sample of eligible threads numbered within
        ``window`` of the anchor (joint issue/PR number sequence; gaps
        from deleted numbers are skipped)."""
        if rule is None:
            rule = EligibilityRule()
        eligible = []
        for number in range(anchor_number - window, anchor_number + window + 1):
            if number == anchor_number or number < 1:
                continue
            try:
                thread = self.fetch_thread(repo, number)
            except NotFoundError:
                continue
            if is_eligible(thread, rule):
                eligible.append(thread)
        eligible.sort(key=lambda t: t.number)
        if len(eligible) <= pick:
            return eligible
        chosen = random.Random(seed).sample(eligible, pick)
        return sorted(chosen, key=lambda t: t.number)


def _parse_time(value: str):
    from datetime import datetime, timezone

    return datetime.strptime(value, "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)
