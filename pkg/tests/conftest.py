import json
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

from derailwatch.model import Comment, ConversationThread, ThreadKind, load_corpus

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"
REPLAY = FIXTURES / "github_replay"


def ts(day: int, hour: int, minute: int = 0, second: int = 0) -> datetime:
    return datetime(2024, 3, day, hour, minute, second, tzinfo=timezone.utc)


def make_comment(
    i,
    body="the build runs fine here",
    author="alice",
    association="CONTRIBUTOR",
    created_at=None,
    is_toxic=False,
    tbdfs=frozenset(),
    is_derailment_point=False,
):
    return Comment(
        id=f"c{i}",
        author_handle=author,
        author_association=association,
        body=body,
        created_at=created_at or ts(1, 9) + timedelta(hours=i),
        is_toxic=is_toxic,
        tbdfs=tbdfs,
        is_derailment_point=is_derailment_point,
    )


def make_thread(comments, repo="octo/demo", number=1, kind=ThreadKind.ISSUE,
                title="A thread", labels=(), locked_reason=None, trigger=None):
    return ConversationThread(
        repo=repo,
        number=number,
        kind=kind,
        title=title,
        labels=tuple(labels),
        comments=tuple(comments),
        locked_reason=locked_reason,
        trigger=trigger,
    )


@pytest.fixture(scope="session")
def analytics_corpus():
    return load_corpus(FIXTURES / "analytics_corpus.jsonl")


@pytest.fixture(scope="session")
def eval_corpus():
    return load_corpus(FIXTURES / "eval_corpus.jsonl")


@pytest.fixture(scope="session")
def labeled_comments():
    return json.loads((FIXTURES / "textfeat_labeled.json").read_text(encoding="utf-8"))


@pytest.fixture()
def prompt_prefix():
    """The three-comment prefix the golden prompt files were rendered from."""
    return [
        make_comment(0, body="The installer fails on the second step. Logs attached.",
                     author="alice", association="CONTRIBUTOR", created_at=ts(1, 9)),
        make_comment(1, body="Same here. @alice did you try clearing the cache?",
                     author="bob-2", association="NONE", created_at=ts(1, 10)),
        make_comment(2, body="Yes @bob-2, and it still fails. @carol might know more.",
                     author="alice", association="CONTRIBUTOR", created_at=ts(1, 11)),
    ]
