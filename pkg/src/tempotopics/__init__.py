"""Temporal topic exploration engine.

Pipeline: preprocess a timestamped corpus, load a temporal topic-word
probability tensor, evaluate temporal topic quality, rank temporally salient
words, retrieve and diversify matching documents, and drive LLM-backed
labeling, summarization, and grounded chat.
"""

from .artifacts import BetaTensor, load_beta, load_beta_dir, save_beta
from .errors import TempoTopicsError
from .ingest import (
    BigramPhraser,
    CorpusPreprocessor,
    ProcessedCorpus,
    RawDocument,
    bin_timestamps,
    preprocess_corpus,
    tokenize,
)
from .llm import (
    GroundedSession,
    KeywordTrajectory,
    LlmCache,
    LlmClient,
    LlmConfig,
    LlmRequest,
    cache_key,
    chat_reply,
    label_topic,
    summarize,
)
from .metrics import CooccurrenceStats, TemporalQuality, cooccurrence_stats, npmi, ttq
from .retrieval import CorpusIndex, build_index, highlight, mmr_select
from .saliency import SaliencyConfig, SaliencyScore, rank_salient

__version__ = "0.1.0"

__all__ = [
    "BetaTensor",
    "BigramPhraser",
    "CooccurrenceStats",
    "CorpusIndex",
    "CorpusPreprocessor",
    "GroundedSession",
    "KeywordTrajectory",
    "LlmCache",
    "LlmClient",
    "LlmConfig",
    "LlmRequest",
    "ProcessedCorpus",
    "RawDocument",
    "SaliencyConfig",
    "SaliencyScore",
    "TemporalQuality",
    "TempoTopicsError",
    "bin_timestamps",
    "build_index",
    "cache_key",
    "chat_reply",
    "cooccurrence_stats",
    "highlight",
    "label_topic",
    "load_beta",
    "load_beta_dir",
    "mmr_select",
    "npmi",
    "preprocess_corpus",
    "rank_salient",
    "save_beta",
    "summarize",
    "tokenize",
    "ttq",
]
