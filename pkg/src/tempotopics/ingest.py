"""Corpus ingestion: tokenization, bigram phrase detection, timestamp binning.

Turns raw timestamped documents into a :class:`ProcessedCorpus` whose files
(`tokens.jsonl`, `vocab.txt`, `timestamps.txt`, `stats.json`) are byte-stable
for identical inputs and configuration.
"""

from __future__ import annotations

import hashlib
import json
import unicodedata
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from .errors import DuplicateId, EmptyCorpus

TOKENS_FILE = "tokens.jsonl"
VOCAB_FILE = "vocab.txt"
TIMESTAMPS_FILE = "timestamps.txt"
STATS_FILE = "stats.json"


@dataclass(frozen=True)
class RawDocument:
    """One input record: unique id, raw text, and a timestamp label."""

    id: str
    text: str
    timestamp: str


@dataclass
class ProcessedDocument:
    id: str
    tokens: list[str]
    time_index: int


@dataclass
class ProcessedCorpus:
    """Tokenized documents plus vocabulary and ordered timestamp bins.

    ``vocab`` is ordered; a term's position is its integer id. ``timestamps``
    is sorted ascending and a document's ``time_index`` points into it.
    """

    documents: list[ProcessedDocument]
    vocab: list[str]
    timestamps: list[str]
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        self._term_ids = {term: i for i, term in enumerate(self.vocab)}

    @property
    def num_docs(self) -> int:
        return len(self.documents)

    @property
    def num_times(self) -> int:
        return len(self.timestamps)

    def term_id(self, term: str) -> Optional[int]:
        return self._term_ids.get(term)

    def __contains__(self, term: str) -> bool:
        return term in self._term_ids

    def checksum(self) -> str:
        """SHA-256 over the canonical serialized corpus files."""
        h = hashlib.sha256()
        h.update(self._tokens_bytes())
        h.update(self._vocab_bytes())
        h.update(self._timestamps_bytes())
        return h.hexdigest()

    def _tokens_bytes(self) -> bytes:
        lines = []
        for doc in self.documents:
            record = {"id": doc.id, "tokens": doc.tokens, "time_index": doc.time_index}
            lines.append(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
        return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""

    def _vocab_bytes(self) -> bytes:
        return ("\n".join(self.vocab) + "\n").encode("utf-8") if self.vocab else b""

    def _timestamps_bytes(self) -> bytes:
        return ("\n".join(self.timestamps) + "\n").encode("utf-8") if self.timestamps else b""

    def save(self, out_dir: str | Path) -> Path:
        """Write the four corpus files; identical corpora produce identical bytes."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / TOKENS_FILE).write_bytes(self._tokens_bytes())
        (out / VOCAB_FILE).write_bytes(self._vocab_bytes())
        (out / TIMESTAMPS_FILE).write_bytes(self._timestamps_bytes())
        stats = dict(self.stats) if self.stats else self.compute_stats()
        (out / STATS_FILE).write_text(
            json.dumps(stats, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        return out

    @classmethod
    def load(cls, in_dir: str | Path) -> "ProcessedCorpus":
        src = Path(in_dir)
        documents = []
        with open(src / TOKENS_FILE, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                documents.append(
                    ProcessedDocument(rec["id"], list(rec["tokens"]), int(rec["time_index"]))
                )
        vocab = (src / VOCAB_FILE).read_text(encoding="utf-8").splitlines()
        timestamps = (src / TIMESTAMPS_FILE).read_text(encoding="utf-8").splitlines()
        stats_path = src / STATS_FILE
        stats = json.loads(stats_path.read_text(encoding="utf-8")) if stats_path.exists() else {}
        return cls(documents=documents, vocab=vocab, timestamps=timestamps, stats=stats)

    def compute_stats(self) -> dict:
        lengths = [len(d.tokens) for d in self.documents]
        per_bin = Counter(d.time_index for d in self.documents)
        n = len(lengths)
        avg = sum(lengths) / n if n else 0.0
        var = sum((x - avg) ** 2 for x in lengths) / n if n else 0.0
        return {
            "num_docs": n,
            "num_timestamps": len(self.timestamps),
            "vocab_size": len(self.vocab),
            "avg_len": round(avg, 4),
            "std_len": round(var**0.5, 4),
            "docs_per_bin": {
                self.timestamps[t]: per_bin.get(t, 0) for t in range(len(self.timestamps))
            },
        }


def _strip_punctuation(token: str) -> str:
    # Leading/trailing Unicode punctuation only; underscore stays (phrase glue).
    start, end = 0, len(token)
    while start < end and _is_punct(token[start]):
        start += 1
    while end > start and _is_punct(token[end - 1]):
        end -= 1
    return token[start:end]


def _is_punct(ch: str) -> bool:
    return ch != "_" and unicodedata.category(ch).startswith("P")


def tokenize(
    text: str,
    stopwords: frozenset[str] | set[str] = frozenset(),
    remove_punctuation: bool = True,
    min_chars: int = 3,
) -> list[str]:
    """Lowercase, whitespace-split, strip edge punctuation, filter short terms
    and stopwords. Order of surviving terms is preserved.
    """
    out = []
    for raw in text.lower().split():
        term = _strip_punctuation(raw) if remove_punctuation else raw
        if len(term) < min_chars:
            continue
        if term in stopwords:
            continue
        out.append(term)
    return out


def collocation_score(
    pair_count: int, count_a: int, count_b: int, distinct_terms: int, min_count: int
) -> float:
    """Classical collocation score: (c_ab - min_count) * U / (c_a * c_b)."""
    return (pair_count - min_count) * distinct_terms / (count_a * count_b)


class BigramPhraser(BaseEstimator, TransformerMixin):
    """Detect collocations in token streams and merge them into ``a_b`` tokens.

    ``fit`` counts unigrams and adjacent pairs; a pair is merged when its
    joint count reaches ``min_count`` and its collocation score reaches
    ``threshold``. ``transform`` rewrites streams in a single greedy
    left-to-right pass, so merged pairs never overlap.
    """

    def __init__(self, min_count: int = 5, threshold: float = 20.0):
        self.min_count = min_count
        self.threshold = threshold

    def fit(self, X: Sequence[Sequence[str]], y=None):
        unigram = Counter()
        pairs = Counter()
        for stream in X:
            unigram.update(stream)
            pairs.update(zip(stream, stream[1:]))
        self.unigram_counts_ = unigram
        self.pair_counts_ = pairs
        self.distinct_terms_ = len(unigram)
        self.phrase_scores_ = {
            pair: collocation_score(
                c, unigram[pair[0]], unigram[pair[1]], self.distinct_terms_, self.min_count
            )
            for pair, c in pairs.items()
            if c >= self.min_count
        }
        self.merged_ = {
            pair for pair, score in self.phrase_scores_.items() if score >= self.threshold
        }
        return self

    def transform(self, X: Sequence[Sequence[str]]) -> list[list[str]]:
        return [self.merge_stream(stream) for stream in X]

    def merge_stream(self, stream: Sequence[str]) -> list[str]:
        merged = getattr(self, "merged_", set())
        out = []
        i = 0
        n = len(stream)
        while i < n:
            if i + 1 < n and (stream[i], stream[i + 1]) in merged:
                out.append(f"{stream[i]}_{stream[i + 1]}")
                i += 2
            else:
                out.append(stream[i])
                i += 1
        return out


def bin_timestamps(raw_labels: Iterable[str]) -> tuple[list[str], dict[str, int]]:
    """Sort distinct labels ascending and assign contiguous indices from 0.

    All-integer label sets sort numerically, everything else lexicographically.
    """
    distinct = set(raw_labels)
    if not distinct:
        raise ValueError("at least one timestamp label required")
    try:
        ordered = sorted(distinct, key=int)
    except ValueError:
        ordered = sorted(distinct)
    return ordered, {label: i for i, label in enumerate(ordered)}


class CorpusPreprocessor(BaseEstimator, TransformerMixin):
    """End-to-end preprocessing: tokenize, merge bigrams, prune vocabulary,
    drop short documents, and bin timestamps.

    Parameters mirror the upstream preprocessing script's knobs. Vocabulary
    pruning keeps terms with document frequency >= ``min_doc_freq`` and, when
    ``max_vocab`` is set, the ``max_vocab`` most document-frequent terms. Term
    ids are assigned by descending corpus frequency, ties lexicographic.
    """

    def __init__(
        self,
        stopwords: Optional[set[str]] = None,
        min_count_bigram: int = 5,
        threshold_bigram: float = 20.0,
        remove_punctuation: bool = True,
        min_chars: int = 3,
        min_words_docs: int = 3,
        max_vocab: Optional[int] = None,
        min_doc_freq: Optional[int] = None,
    ):
        self.stopwords = stopwords
        self.min_count_bigram = min_count_bigram
        self.threshold_bigram = threshold_bigram
        self.remove_punctuation = remove_punctuation
        self.min_chars = min_chars
        self.min_words_docs = min_words_docs
        self.max_vocab = max_vocab
        self.min_doc_freq = min_doc_freq

    def _check_params(self):
        if self.min_count_bigram < 1:
            raise ValueError("min_count_bigram must be >= 1")
        if self.threshold_bigram <= 0:
            raise ValueError("threshold_bigram must be > 0")
        if self.min_chars < 1:
            raise ValueError("min_chars must be >= 1")
        if self.min_words_docs < 1:
            raise ValueError("min_words_docs must be >= 1")

    def tokenize_doc(self, text: str) -> list[str]:
        return tokenize(
            text,
            stopwords=frozenset(self.stopwords or ()),
            remove_punctuation=self.remove_punctuation,
            min_chars=self.min_chars,
        )

    def fit(self, docs: Sequence[RawDocument], y=None):
        self._check_params()
        if not docs:
            raise EmptyCorpus("no input documents")
        seen = set()
        for doc in docs:
            if doc.id in seen:
                raise DuplicateId(f"duplicate document id: {doc.id!r}")
            seen.add(doc.id)

        streams = [self.tokenize_doc(doc.text) for doc in docs]
        self.phraser_ = BigramPhraser(
            min_count=self.min_count_bigram, threshold=self.threshold_bigram
        ).fit(streams)
        merged_streams = self.phraser_.transform(streams)

        df = Counter()
        for stream in merged_streams:
            df.update(set(stream))
        kept = set(df)
        if self.min_doc_freq is not None:
            kept = {t for t in kept if df[t] >= self.min_doc_freq}
        if self.max_vocab is not None and len(kept) > self.max_vocab:
            by_df = sorted(kept, key=lambda t: (-df[t], t))
            kept = set(by_df[: self.max_vocab])
        self.kept_terms_ = kept
        self.timestamps_, self.time_map_ = bin_timestamps(doc.timestamp for doc in docs)
        return self

    def transform(self, docs: Sequence[RawDocument]) -> ProcessedCorpus:
        streams = self.phraser_.transform([self.tokenize_doc(doc.text) for doc in docs])
        documents = []
        for doc, stream in zip(docs, streams):
            tokens = [t for t in stream if t in self.kept_terms_]
            if len(tokens) < self.min_words_docs:
                continue
            if doc.timestamp not in self.time_map_:
                raise KeyError(f"timestamp label not seen during fit: {doc.timestamp!r}")
            documents.append(ProcessedDocument(doc.id, tokens, self.time_map_[doc.timestamp]))
        if not documents:
            raise EmptyCorpus("no document survived preprocessing")

        # Restrict vocab to surviving documents and re-bin their timestamps so
        # closure holds: every vocab term occurs, every bin is populated.
        term_freq = Counter()
        for d in documents:
            term_freq.update(d.tokens)
        vocab = sorted(term_freq, key=lambda t: (-term_freq[t], t))
        timestamps, time_map = bin_timestamps(
            self.timestamps_[d.time_index] for d in documents
        )
        for d in documents:
            d.time_index = time_map[self.timestamps_[d.time_index]]
        corpus = ProcessedCorpus(documents=documents, vocab=vocab, timestamps=timestamps)
        corpus.stats = corpus.compute_stats()
        return corpus


def preprocess_corpus(docs: Sequence[RawDocument], **params) -> ProcessedCorpus:
    """One-shot convenience wrapper around :class:`CorpusPreprocessor`."""
    pre = CorpusPreprocessor(**params)
    return pre.fit(docs).transform(docs)


def read_docs_jsonl(path: str | Path) -> list[RawDocument]:
    """Read one JSON object per line with ``id``, ``text``, ``timestamp`` fields."""
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            try:
                doc = RawDocument(str(rec["id"]), str(rec["text"]), str(rec["timestamp"]))
            except KeyError as exc:
                raise ValueError(f"{path}:{lineno}: missing field {exc}") from None
            if not doc.text.strip():
                raise ValueError(f"{path}:{lineno}: empty text for id {doc.id!r}")
            docs.append(doc)
    return docs


def read_stopwords(path: str | Path) -> set[str]:
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.strip()
        if word:
            words.add(word.lower())
    return words
