"""Forecasting and proactively moderating conversational derailment in
GitHub issue and pull-request threads."""

from .analytics import CorpusStats, Ratio, TimingBucket, compute_stats, timing_bucket
from .evaluation import (
    UNDEFINED,
    ConfusionCounts,
    EvaluationReport,
    cohens_kappa,
    f1,
    is_undefined,
    labels_from_corpus,
    precision,
    recall,
    render_report,
    sweep,
)
from .gateway import (
    ChatRequest,
    HttpConfig,
    HttpGateway,
    ScriptedMock,
    parse_binary,
    parse_probability,
)
from .ingest import EligibilityRule, GitHubClient, IngestConfig, ReplayTransport
from .model import (
    TBDF,
    AuthorRole,
    Comment,
    ConversationThread,
    CorpusPartition,
    ThreadKind,
    TriggerType,
    classify_role,
    load_corpus,
    partition,
    prefix_before_toxicity,
    save_corpus,
)
from .predictor import (
    DerailmentPrediction,
    InterventionAction,
    InterventionPolicy,
    classify,
    predict,
    recommend_action,
    truncate_transcript,
)
from .prompts import (
    TEMPLATE_VERSION,
    PromptBundle,
    RenderedTranscript,
    ScdStrategy,
    build_predictor_prompt,
    build_scd_prompt,
    build_toxicity_annotation_prompt,
    render_transcript,
)
from .store import Disposition, ErrorCategory, ModerationStore, make_thread_id
from .textfeat import (
    FeatureVector,
    LexiconSet,
    detect_mentions,
    detect_quote,
    extract_features,
    tokenize_lemmatize,
    top_unigrams,
    trigrams,
)

__version__ = "0.1.0"
