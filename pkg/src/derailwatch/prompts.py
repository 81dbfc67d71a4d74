"""Prompt construction: anonymized transcripts, summary-generation prompts,
the derailment predictor prompt, and the toxicity annotation prompt.

All builders are pure string assembly over versioned plain-text templates,
so byte-identical inputs always produce byte-identical prompts. Bump
TEMPLATE_VERSION whenever any template file changes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from .errors import EmptyPrefixError, EmptySummaryError
from .model import AuthorRole, Comment

TEMPLATE_VERSION = "1.0.0"

DEFAULT_FEWSHOT_EXEMPLAR_COUNT = 2

_ROLE_LABELS = {
    AuthorRole.PROJECT_CONTRIBUTOR: "ProjectContributor",
    AuthorRole.EXTERNAL_PARTICIPANT: "ExternalParticipant",
}


class ScdStrategy(Enum):
    GENERIC = "generic"
    FEW_SHOT = "fewshot"
    LEAST_TO_MOST = "ltm"


@dataclass(frozen=True)
class RenderedTranscript:
    text: str
    alias_map: dict[str, str]


@dataclass(frozen=True)
class PromptBundle:
    user_text: str
    template_version: str
    system_text: str | None = None
    strategy: ScdStrategy | None = None


def _template_dir() -> Path:
    return Path(str(resources.files("derailwatch"))) / "data" / "templates"


def _load_template(name: str) -> str:
    return (_template_dir() / name).read_text(encoding="utf-8")


def render_transcript(prefix: list[Comment]) -> RenderedTranscript:
    """Anonymized "@USERk (role): body" lines, one comment per line group.

    Aliases follow first appearance; @-mentions of participants are
    rewritten to their alias, mentions of non-participants stay verbatim.
    """
    if not prefix:
        raise EmptyPrefixError("cannot render an empty comment prefix")
    alias_map: dict[str, str] = {}
    for comment in prefix:
        if comment.author_handle not in alias_map:
            alias_map[comment.author_handle] = f"@USER{len(alias_map) + 1}"
    lines = []
    for comment in prefix:
        body = comment.body
        # Longest handles first so "@bob-2" never matches the "bob" rule.
        for handle in sorted(alias_map, key=len, reverse=True):
            body = re.sub(rf"@{re.escape(handle)}(?![\w-])", alias_map[handle], body)
        alias = alias_map[comment.author_handle]
        role = _ROLE_LABELS[comment.role]
        lines.append(f"{alias} ({role}): {body}")
    return RenderedTranscript(text="\n\n".join(lines), alias_map=alias_map)


def build_scd_prompt(
    strategy: ScdStrategy,
    transcript: RenderedTranscript,
    exemplar_count: int = DEFAULT_FEWSHOT_EXEMPLAR_COUNT,
) -> PromptBundle:
    if strategy == ScdStrategy.LEAST_TO_MOST:
        text = _load_template("ltm.txt")
    elif strategy == ScdStrategy.FEW_SHOT:
        parts = [_load_template("fewshot_intro.txt")]
        for i in range(1, exemplar_count + 1):
            exemplar = _load_template(f"fewshot_example_{i}.txt").strip()
            parts.append(f'Example {i}: "{exemplar}"\n')
        parts.append(_load_template("fewshot_outro.txt"))
        text = "\n".join(parts)
    else:
        text = _load_template("generic.txt")
    return PromptBundle(
        user_text=text.replace("{{transcript}}", transcript.text),
        template_version=TEMPLATE_VERSION,
        strategy=strategy,
    )


def build_predictor_prompt(scd_summary: str) -> PromptBundle:
    if not scd_summary.strip():
        raise EmptySummaryError("predictor prompt needs a non-empty summary")
    text = _load_template("predictor.txt").replace("{{summary}}", scd_summary)
    return PromptBundle(user_text=text, template_version=TEMPLATE_VERSION)


def build_toxicity_annotation_prompt(
    comment: Comment, context_prefix: list[Comment]
) -> PromptBundle:
    """Binary toxic/not-toxic judgment prompt for one comment in context.

    ``context_prefix`` holds all comments up to and including the target,
    so the alias map covers the target's author too.
    """
    if not context_prefix or context_prefix[-1].id != comment.id:
        context_prefix = list(context_prefix) + [comment]
    rendered = render_transcript(context_prefix)
    lines = rendered.text.split("\n\n")
    target_line = lines[-1]
    prior = "\n\n".join(lines[:-1]) if len(lines) > 1 else "(no prior comments)"
    text = (
        _load_template("annotation.txt")
        .replace("{{context}}", prior)
        .replace("{{comment}}", target_line)
    )
    return PromptBundle(user_text=text, template_version=TEMPLATE_VERSION)
