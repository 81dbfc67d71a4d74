"""Deterministic linguistic feature extraction for GitHub comment text.

Tokenization and lemmatization are intentionally shallow and rule-based:
the accuracy contract is the hand-labeled test fixture, not general
English. Markdown handling covers only code fences, inline code,
blockquote markers, and URLs.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .model import Comment

_FENCED_CODE_RE = re.compile(r"```.*?```", re.DOTALL)
_INLINE_CODE_RE = re.compile(r"`[^`\n]*`")
_URL_RE = re.compile(r"https?://\S+")
_WORD_RE = re.compile(r"[^\W\d_]+(?:'[^\W\d_]+)*", re.UNICODE)
_MENTION_RE = re.compile(r"(?<![\w.@])@([a-zA-Z0-9][a-zA-Z0-9-]{0,38})")
_QUOTE_LINE_RE = re.compile(r"^ {0,3}>")

# Irregular forms resolved before suffix stripping.
_IRREGULAR = {
    "n't": "not",
    "'re": "be",
    "'s": "be",
    "'m": "be",
    "'ve": "have",
    "'ll": "will",
    "'d": "would",
    "am": "be",
    "is": "be",
    "are": "be",
    "was": "be",
    "were": "be",
    "been": "be",
    "being": "be",
    "wo": "will",
    "ca": "can",
    "said": "say",
    "told": "tell",
    "did": "do",
    "does": "do",
    "done": "do",
    "doing": "do",
    "has": "have",
    "had": "have",
    "having": "have",
    "these": "this",
    "those": "that",
}

# Never strip a trailing -s from these even though they match the rule shape.
_NO_STRIP_S = {"this", "his", "its", "yes", "thus", "always", "perhaps", "news"}

# Nouns and closed-class words that merely end in -ing.
_NO_STRIP_ING = {
    "nothing",
    "something",
    "anything",
    "everything",
    "thing",
    "during",
    "morning",
    "evening",
    "string",
    "king",
    "spring",
    "bring",
    "sing",
    "wing",
    "ring",
}


def strip_markdown(body: str) -> str:
    """Remove code fences, inline code spans, and URLs."""
    text = _FENCED_CODE_RE.sub(" ", body)
    text = _INLINE_CODE_RE.sub(" ", text)
    text = _URL_RE.sub(" ", text)
    return text


def _split_contraction(token: str) -> list[str]:
    if token.endswith("n't") and len(token) > 3:
        return [token[:-3], "n't"]
    if "'" in token:
        base, _, suffix = token.partition("'")
        if base and suffix:
            return [base, "'" + suffix]
    return [token]


def lemmatize(token: str) -> str:
    if token in _IRREGULAR:
        return _IRREGULAR[token]
    word = token
    if word.endswith("ing") and len(word) >= 5 and word not in _NO_STRIP_ING:
        word = word[:-3]
        if len(word) >= 3 and word[-1] == word[-2]:
            word = word[:-1]
        return word
    if word.endswith("ied") and len(word) >= 4:
        return word[:-3] + "y"
    if word.endswith("ed") and len(word) >= 4 and not word.endswith("eed"):
        word = word[:-2]
        if len(word) >= 3 and word[-1] == word[-2]:
            word = word[:-1]
        if len(word) < 3:
            return word + "e"
        return word
    if word.endswith("ies") and len(word) >= 5:
        return word[:-3] + "y"
    if (
        word.endswith("s")
        and len(word) >= 4
        and not word.endswith(("ss", "us", "is"))
        and word not in _NO_STRIP_S
    ):
        return word[:-1]
    return word


def tokenize_lemmatize(body: str) -> list[str]:
    """Lowercase lemma tokens of the prose portion of a comment body."""
    text = strip_markdown(body).lower()
    lemmas: list[str] = []
    for raw in _WORD_RE.findall(text):
        for piece in _split_contraction(raw):
            lemmas.append(lemmatize(piece))
    return lemmas


def detect_mentions(body: str) -> list[str]:
    """@handles outside code, deduplicated in order of first appearance."""
    text = _FENCED_CODE_RE.sub(" ", body)
    text = _INLINE_CODE_RE.sub(" ", text)
    seen: list[str] = []
    for handle in _MENTION_RE.findall(text):
        if handle not in seen:
            seen.append(handle)
    return seen


def detect_quote(body: str) -> bool:
    """True iff any line outside code fences is a Markdown blockquote."""
    text = _FENCED_CODE_RE.sub(" ", body)
    return any(_QUOTE_LINE_RE.match(line) for line in text.splitlines())


def _load_wordlist(path: Path) -> frozenset[str]:
    words = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def _data_dir() -> Path:
    return Path(str(resources.files("derailwatch"))) / "data" / "lexicons"


@dataclass(frozen=True)
class LexiconSet:
    second_person: frozenset[str]
    first_person: frozenset[str]
    wh_question: frozenset[str]
    negation: frozenset[str]
    reasoning: frozenset[str]
    emphasis: frozenset[str]
    communication_verbs: frozenset[str]

    def __post_init__(self):
        for name in (
            "second_person",
            "first_person",
            "wh_question",
            "negation",
            "reasoning",
            "emphasis",
            "communication_verbs",
        ):
            if not getattr(self, name):
                raise ValueError(f"lexicon {name!r} is empty")

    @classmethod
    def from_dir(cls, directory: str | Path) -> "LexiconSet":
        directory = Path(directory)
        return cls(
            second_person=_load_wordlist(directory / "second_person.txt"),
            first_person=_load_wordlist(directory / "first_person.txt"),
            wh_question=_load_wordlist(directory / "wh_question.txt"),
            negation=_load_wordlist(directory / "negation.txt"),
            reasoning=_load_wordlist(directory / "reasoning.txt"),
            emphasis=_load_wordlist(directory / "emphasis.txt"),
            communication_verbs=_load_wordlist(directory / "communication_verbs.txt"),
        )

    @classmethod
    def default(cls) -> "LexiconSet":
        return cls.from_dir(_data_dir())


@dataclass(frozen=True)
class FeatureVector:
    has_second_person: bool
    has_first_person: bool
    has_wh: bool
    has_negation: bool
    has_reasoning: bool
    has_emphasis: bool
    has_comm_verb: bool
    mentions: tuple[str, ...]
    has_quote: bool
    token_count: int


def extract_features(comment: Comment | str, lexicons: LexiconSet) -> FeatureVector:
    body = comment if isinstance(comment, str) else comment.body
    lemmas = set(tokenize_lemmatize(body))
    return FeatureVector(
        has_second_person=bool(lemmas & lexicons.second_person),
        has_first_person=bool(lemmas & lexicons.first_person),
        has_wh=bool(lemmas & lexicons.wh_question),
        has_negation=bool(lemmas & lexicons.negation),
        has_reasoning=bool(lemmas & lexicons.reasoning),
        has_emphasis=bool(lemmas & lexicons.emphasis),
        has_comm_verb=bool(lemmas & lexicons.communication_verbs),
        mentions=tuple(detect_mentions(body)),
        has_quote=detect_quote(body),
        token_count=len(tokenize_lemmatize(body)),
    )


def default_unigram_exclusions() -> frozenset[str]:
    return _load_wordlist(_data_dir() / "unigram_exclusions.txt")


def top_unigrams(
    bodies: list[str], n: int = 200, exclusions: frozenset[str] | None = None
) -> list[tuple[str, int]]:
    """Most frequent lemma unigrams, ties broken alphabetically."""
    if exclusions is None:
        exclusions = default_unigram_exclusions()
    counts: Counter[str] = Counter()
    for body in bodies:
        for lemma in tokenize_lemmatize(body):
            if lemma not in exclusions:
                counts[lemma] += 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:n]


def trigrams(body: str) -> list[tuple[tuple[str, str, str], int]]:
    """Frequency-ranked lemma trigrams of one comment, ties alphabetical."""
    lemmas = tokenize_lemmatize(body)
    counts: Counter[tuple[str, str, str]] = Counter(
        (lemmas[i], lemmas[i + 1], lemmas[i + 2]) for i in range(len(lemmas) - 2)
    )
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
