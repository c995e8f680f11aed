"""Word-timestamp document retrieval.

An inverted index maps term -> time -> sorted document ids. Candidate
documents are ranked by their TF-IDF weight for the query word, diversified
with maximal marginal relevance over exact cosine similarity, and annotated
with byte-offset highlight spans on the original text.
"""

from __future__ import annotations

import pickle
import re
from dataclasses import dataclass
from math import log, sqrt
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .errors import IndexOutOfRange
from .ingest import ProcessedCorpus

INDEX_CACHE_FILE = "index.cache"
INDEX_CACHE_MAGIC = b"TTIDX1\n"

DEFAULT_LAMBDA = 0.7
DEFAULT_SELECT = 20
DEFAULT_CANDIDATE_CAP = 200

SparseVector = dict[str, float]


@dataclass
class RetrievalResult:
    id: str
    relevance: float
    highlights: list[tuple[int, int]]
    text: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "relevance": self.relevance,
            "highlights": [list(span) for span in self.highlights],
            "text": self.text,
        }


def tfidf_vectors(corpus: ProcessedCorpus) -> dict[str, SparseVector]:
    """L2-normalized TF-IDF vector per document (tf raw count, idf ln(D/df))."""
    df: dict[str, int] = {}
    for doc in corpus.documents:
        for term in set(doc.tokens):
            df[term] = df.get(term, 0) + 1
    d = corpus.num_docs
    idf = {term: log(d / count) for term, count in df.items()}

    vectors: dict[str, SparseVector] = {}
    for doc in corpus.documents:
        counts: dict[str, int] = {}
        for term in doc.tokens:
            counts[term] = counts.get(term, 0) + 1
        vec = {term: count * idf[term] for term, count in counts.items()}
        norm = sqrt(sum(w * w for w in vec.values()))
        if norm > 0:
            vec = {term: w / norm for term, w in vec.items()}
        vectors[doc.id] = vec
    return vectors


def cosine(u: SparseVector, v: SparseVector) -> float:
    if len(v) < len(u):
        u, v = v, u
    return sum(w * v[t] for t, w in u.items() if t in v)


def mmr_select(
    query_vec: SparseVector,
    candidate_vecs: Mapping[str, SparseVector],
    lam: float = DEFAULT_LAMBDA,
    m: int = DEFAULT_SELECT,
) -> list[str]:
    """Greedy maximal marginal relevance selection.

    Each step picks argmax of ``lam * cos(d, query) - (1 - lam) * max_sim``
    where ``max_sim`` is the highest cosine to an already selected document
    (0 while nothing is selected). Ties fall back to higher query relevance,
    then ascending doc id, which keeps the first pick at the relevance argmax
    for every lambda.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must be in [0, 1]")
    if m < 1:
        raise ValueError("m must be >= 1")
    relevance = {d: cosine(vec, query_vec) for d, vec in candidate_vecs.items()}
    remaining = sorted(candidate_vecs)
    selected: list[str] = []
    while remaining and len(selected) < m:
        best = None
        best_key = None
        for d in remaining:
            if selected:
                penalty = max(cosine(candidate_vecs[d], candidate_vecs[s]) for s in selected)
            else:
                penalty = 0.0
            score = lam * relevance[d] - (1.0 - lam) * penalty
            key = (-score, -relevance[d], d)
            if best_key is None or key < best_key:
                best, best_key = d, key
        selected.append(best)
        remaining.remove(best)
    return selected


def highlight(text: str, term: str) -> list[tuple[int, int]]:
    """Byte spans of all case-insensitive token-boundary occurrences.

    A stored bigram ``a_b`` matches both the ``a_b`` and ``a b`` surface
    forms. Offsets index into the UTF-8 encoding of ``text``.
    """
    if not term:
        raise ValueError("term must be non-empty")
    parts = [re.escape(p) for p in term.split("_") if p]
    if not parts:
        return []
    pattern = re.compile(
        r"(?<!\w)" + r"[_\s]+".join(parts) + r"(?!\w)", re.IGNORECASE | re.UNICODE
    )
    spans = [(m.start(), m.end()) for m in pattern.finditer(text)]
    if not spans:
        return []
    # Map character offsets to byte offsets in one pass.
    byte_at = [0] * (len(text) + 1)
    total = 0
    for i, ch in enumerate(text):
        total += len(ch.encode("utf-8"))
        byte_at[i + 1] = total
    return [(byte_at[s], byte_at[e]) for s, e in spans]


class CorpusIndex:
    """Inverted index plus TF-IDF vectors over one processed corpus.

    ``fit`` builds everything in memory; ``build`` additionally round-trips
    the inverted index through the on-disk cache keyed by corpus checksum.
    """

    def __init__(self, corpus: ProcessedCorpus, texts: Optional[Mapping[str, str]] = None):
        self.corpus = corpus
        self.texts = dict(texts) if texts else None
        self.postings: dict[str, dict[int, list[str]]] = {}
        self.vectors: dict[str, SparseVector] = {}
        self.built_from = corpus.checksum()
        self.loaded_from_cache = False

    @classmethod
    def build(
        cls,
        corpus: ProcessedCorpus,
        cache_dir: Optional[str | Path] = None,
        texts: Optional[Mapping[str, str]] = None,
    ) -> "CorpusIndex":
        index = cls(corpus, texts=texts)
        cache_path = Path(cache_dir) / INDEX_CACHE_FILE if cache_dir else None
        if cache_path is not None and cache_path.exists():
            cached = index._read_cache(cache_path)
            if cached is not None:
                index.postings = cached
                index.loaded_from_cache = True
        if not index.loaded_from_cache:
            index.postings = index._build_postings()
            if cache_path is not None:
                index._write_cache(cache_path)
        index.vectors = tfidf_vectors(corpus)
        return index

    def fit(self) -> "CorpusIndex":
        self.postings = self._build_postings()
        self.vectors = tfidf_vectors(self.corpus)
        return self

    def _build_postings(self) -> dict[str, dict[int, list[str]]]:
        postings: dict[str, dict[int, list[str]]] = {}
        for doc in self.corpus.documents:
            for term in set(doc.tokens):
                postings.setdefault(term, {}).setdefault(doc.time_index, []).append(doc.id)
        for by_time in postings.values():
            for ids in by_time.values():
                ids.sort()
        return postings

    def _read_cache(self, path: Path) -> Optional[dict]:
        try:
            blob = path.read_bytes()
            if not blob.startswith(INDEX_CACHE_MAGIC):
                return None
            rest = blob[len(INDEX_CACHE_MAGIC) :]
            newline = rest.index(b"\n")
            checksum = rest[:newline].decode("ascii")
            if checksum != self.built_from:
                return None
            return pickle.loads(rest[newline + 1 :])
        except (OSError, ValueError, pickle.UnpicklingError, EOFError):
            return None

    def _write_cache(self, path: Path) -> None:
        payload = (
            INDEX_CACHE_MAGIC
            + self.built_from.encode("ascii")
            + b"\n"
            + pickle.dumps(self.postings, protocol=4)
        )
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(payload)
        tmp.replace(path)

    def text_of(self, doc_id: str) -> str:
        if self.texts is not None and doc_id in self.texts:
            return self.texts[doc_id]
        doc = next(d for d in self.corpus.documents if d.id == doc_id)
        return " ".join(doc.tokens)

    def _check_time(self, t: int) -> None:
        if not 0 <= t < self.corpus.num_times:
            raise IndexOutOfRange(f"time {t} outside [0, {self.corpus.num_times})")

    def word_weight(self, doc_id: str, word: str) -> float:
        return self.vectors.get(doc_id, {}).get(word, 0.0)

    def candidates(self, word: str, t: int, cap: int = DEFAULT_CANDIDATE_CAP) -> list[str]:
        """Posting list for (word, t), best TF-IDF weight first, capped."""
        self._check_time(t)
        if cap < 1:
            raise ValueError("cap must be >= 1")
        ids = self.postings.get(word, {}).get(t, [])
        ranked = sorted(ids, key=lambda d: (-self.word_weight(d, word), d))
        return ranked[:cap]

    def retrieve(
        self,
        word: str,
        t: int,
        k_candidates: int = DEFAULT_CANDIDATE_CAP,
        lam: float = DEFAULT_LAMBDA,
        m: int = DEFAULT_SELECT,
        query: str = "word_axis",
    ) -> list[RetrievalResult]:
        """Candidate lookup, MMR diversification, then highlighting."""
        ids = self.candidates(word, t, k_candidates)
        if not ids:
            return []
        vecs = {d: self.vectors[d] for d in ids}
        if query == "centroid":
            query_vec: SparseVector = {}
            for vec in vecs.values():
                for term, w in vec.items():
                    query_vec[term] = query_vec.get(term, 0.0) + w
            norm = sqrt(sum(w * w for w in query_vec.values()))
            if norm > 0:
                query_vec = {term: w / norm for term, w in query_vec.items()}
        else:
            query_vec = {word: 1.0}
        chosen = mmr_select(query_vec, vecs, lam=lam, m=m)
        results = []
        for d in chosen:
            text = self.text_of(d)
            results.append(
                RetrievalResult(
                    id=d,
                    relevance=cosine(vecs[d], query_vec),
                    highlights=highlight(text, word),
                    text=text,
                )
            )
        return results


def build_index(
    corpus: ProcessedCorpus,
    cache_dir: Optional[str | Path] = None,
    texts: Optional[Mapping[str, str]] = None,
) -> CorpusIndex:
    """Build (or load from cache) the retrieval index for a corpus."""
    return CorpusIndex.build(corpus, cache_dir=cache_dir, texts=texts)
