"""Transport-agnostic chat-completion gateway.

Two backends share one interface: an HTTP client speaking the de-facto
chat-completion wire shape (messages array in, choices[0].message.content
out), and a scripted mock that makes whole pipelines deterministic for
tests and offline runs.
"""

from __future__ import annotations

import json
import math
import os
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import requests

from .errors import (
    ContextOverflowError,
    GatewayError,
    ParseFailureError,
    ScriptExhaustedError,
)

DEFAULT_MAX_CONTEXT_TOKENS = 8192


def estimate_tokens(text: str) -> int:
    """Conservative character heuristic; monotone in text length."""
    return math.ceil(len(text) / 4)


@dataclass(frozen=True)
class ChatRequest:
    model_name: str
    messages: tuple[tuple[str, str], ...]
    temperature: float = 0.0
    max_context_tokens: int = DEFAULT_MAX_CONTEXT_TOKENS

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")
        if not self.messages:
            raise ValueError("messages must be non-empty")
        object.__setattr__(
            self, "messages", tuple((role, text) for role, text in self.messages)
        )

    @property
    def total_text(self) -> str:
        return "\n".join(text for _, text in self.messages)

    def check_context(self) -> None:
        estimated = estimate_tokens(self.total_text)
        if estimated > self.max_context_tokens:
            raise ContextOverflowError(estimated, self.max_context_tokens)


@dataclass
class HttpConfig:
    base_url: str
    api_key: str = ""
    request_timeout: float = 60.0
    max_retries: int = 3
    backoff_base: float = 1.0

    @classmethod
    def from_env(cls) -> "HttpConfig":
        return cls(
            base_url=os.environ.get("LLM_API_BASE", "http://localhost:8000/v1"),
            api_key=os.environ.get("LLM_API_KEY", ""),
        )


class HttpGateway:
    """Chat-completion client with bounded retries and non-decreasing backoff."""

    def __init__(self, config: HttpConfig, session: requests.Session | None = None):
        self.config = config
        self._session = session or requests.Session()
        self._sleep = time.sleep

    def complete(self, request: ChatRequest) -> str:
        request.check_context()
        url = self.config.base_url.rstrip("/") + "/chat/completions"
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        payload = {
            "model": request.model_name,
            "temperature": request.temperature,
            "messages": [
                {"role": role, "content": text} for role, text in request.messages
            ],
        }
        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            if attempt:
                self._sleep(self.config.backoff_base * (2 ** (attempt - 1)))
            try:
                response = self._session.post(
                    url,
                    headers=headers,
                    json=payload,
                    timeout=self.config.request_timeout,
                )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if response.status_code >= 500 or response.status_code == 429:
                last_error = GatewayError(
                    f"upstream returned HTTP {response.status_code}"
                )
                continue
            if response.status_code != 200:
                raise GatewayError(
                    f"upstream returned HTTP {response.status_code}: {response.text[:200]}"
                )
            try:
                return response.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, ValueError) as exc:
                raise GatewayError(f"malformed completion response: {exc}") from exc
        raise GatewayError(f"exhausted retries: {last_error}")


@dataclass
class ScriptEntry:
    match_substring: str
    response: str
    consumed: bool = False


class ScriptedMock:
    """Deterministic gateway: canned responses keyed by request substring.

    Entries with a matcher are selected by content, so parallel callers
    get per-conversation determinism; empty matchers are consumed in
    script order.
    """

    def __init__(self, script: list[tuple[str, str]]):
        self._entries = [ScriptEntry(m, r) for m, r in script]
        self._lock = threading.Lock()

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "ScriptedMock":
        script = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            data = json.loads(line)
            script.append((data.get("match_substring", ""), data["response"]))
        return cls(script)

    def complete(self, request: ChatRequest) -> str:
        request.check_context()
        text = request.total_text
        with self._lock:
            for entry in self._entries:
                if entry.consumed:
                    continue
                if not entry.match_substring or entry.match_substring in text:
                    entry.consumed = True
                    return entry.response
        raise ScriptExhaustedError("no unconsumed scripted response matches request")


_STRICT_PROB_RE = re.compile(r"^(?:\d+\.?\d*|\.\d+)$")
_NUMBER_RE = re.compile(r"-?(?:\d+\.\d+|\.\d+|\d+)")


def parse_probability(text: str, lenient: bool = True) -> float:
    """Probability in [0,1] from model output, rounded to two places.

    Strict pass requires the whole trimmed text to be one decimal literal;
    the lenient fallback takes the first in-range literal anywhere.
    """
    trimmed = text.strip()
    if _STRICT_PROB_RE.match(trimmed):
        value = float(trimmed)
        if 0.0 <= value <= 1.0:
            return round(value, 2)
    if lenient:
        for token in _NUMBER_RE.findall(text):
            value = float(token)
            if 0.0 <= value <= 1.0:
                return round(value, 2)
    raise ParseFailureError(text)


_BINARY_RE = re.compile(r"^(yes|no)\b", re.IGNORECASE)


def parse_binary(text: str) -> bool:
    match = _BINARY_RE.match(text.strip())
    if not match:
        raise ParseFailureError(text)
    return match.group(1).lower() == "yes"
