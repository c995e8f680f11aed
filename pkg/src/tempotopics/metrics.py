"""Temporal topic quality: NPMI coherence across adjacent time steps (TTC),
top-word smoothness (TTS), and their per-topic product (TTQ).

Co-occurrence uses boolean whole-document windows: a pair co-occurs in a
document iff both terms appear in it at least once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log

from .artifacts import BetaTensor
from .errors import UndefinedTerm, UnknownTerm
from .ingest import ProcessedCorpus

DEFAULT_TOP_N = 10


@dataclass
class CooccurrenceStats:
    """Document frequencies and joint document frequencies over a term subset."""

    total_docs: int
    df: dict[str, int]
    jdf: dict[frozenset[str], int] = field(default_factory=dict)

    def joint(self, a: str, b: str) -> int:
        return self.jdf.get(frozenset((a, b)), 0)


def cooccurrence_stats(corpus: ProcessedCorpus, terms: set[str]) -> CooccurrenceStats:
    """Count df and pairwise jdf for ``terms`` over whole-document windows."""
    unknown = [t for t in terms if t not in corpus]
    if unknown:
        raise UnknownTerm(f"terms not in vocabulary: {sorted(unknown)[:5]}")
    df: dict[str, int] = {t: 0 for t in terms}
    jdf: dict[frozenset[str], int] = {}
    for doc in corpus.documents:
        present = sorted(terms.intersection(doc.tokens))
        for term in present:
            df[term] += 1
        for i, a in enumerate(present):
            for b in present[i + 1 :]:
                key = frozenset((a, b))
                jdf[key] = jdf.get(key, 0) + 1
    return CooccurrenceStats(total_docs=corpus.num_docs, df=df, jdf=jdf)


def npmi(stats: CooccurrenceStats, a: str, b: str) -> float:
    """Normalized PMI in [-1, 1].

    Conventions: identical terms score 1; disjoint supports score -1; a pair
    whose joint frequency equals both marginals scores exactly 1 (the formula
    limit), avoiding float noise at the boundary.
    """
    df_a = stats.df.get(a, 0)
    df_b = stats.df.get(b, 0)
    if df_a == 0:
        raise UndefinedTerm(f"term {a!r} has zero document frequency")
    if df_b == 0:
        raise UndefinedTerm(f"term {b!r} has zero document frequency")
    if a == b:
        return 1.0
    joint = stats.joint(a, b)
    if joint == 0:
        return -1.0
    if joint == df_a and joint == df_b:
        return 1.0
    d = stats.total_docs
    p_a = df_a / d
    p_b = df_b / d
    p_ab = joint / d
    return log(p_ab / (p_a * p_b)) / -log(p_ab)


@dataclass
class TemporalQuality:
    """Per-topic (coherence, smoothness, quality) triples plus their means."""

    per_topic: list[tuple[float, float, float]]
    ttc: float
    tts: float
    ttq: float
    top_n: int

    def to_dict(self) -> dict:
        return {
            "top_n": self.top_n,
            "per_topic": [
                {"topic": k, "ttc": c, "tts": s, "ttq": q}
                for k, (c, s, q) in enumerate(self.per_topic)
            ],
            "ttc": self.ttc,
            "tts": self.tts,
            "ttq": self.ttq,
        }


def metric_terms(beta: BetaTensor, n: int = DEFAULT_TOP_N) -> set[str]:
    """Union of every topic's top-``n`` words over all time steps."""
    terms: set[str] = set()
    for k in range(beta.num_topics):
        for t in range(beta.num_times):
            terms.update(beta.top_words(k, t, n).words)
    return terms


def tts_topic(beta: BetaTensor, k: int, n: int = DEFAULT_TOP_N) -> float:
    """Mean adjacent-step overlap of top-``n`` word sets; 1.0 when T == 1."""
    beta.check_topic(k)
    t_count = beta.num_times
    if t_count < 2:
        return 1.0
    sets = [set(beta.top_word_ids(k, t, n)) for t in range(t_count)]
    size = min(n, beta.vocab_size)
    total = 0.0
    for t in range(t_count - 1):
        total += len(sets[t] & sets[t + 1]) / size
    return total / (t_count - 1)


def ttc_topic(
    beta: BetaTensor, stats: CooccurrenceStats, k: int, n: int = DEFAULT_TOP_N
) -> float:
    """Mean cross-time NPMI between adjacent top-``n`` sets.

    All ordered cross pairs contribute; a word paired with itself counts as 1.
    With a single time step this degrades to the within-set mean over
    unordered distinct pairs.
    """
    beta.check_topic(k)
    t_count = beta.num_times
    if t_count < 2:
        words = beta.top_words(k, 0, n).words
        pairs = [(a, b) for i, a in enumerate(words) for b in words[i + 1 :]]
        if not pairs:
            return 0.0
        return sum(npmi(stats, a, b) for a, b in pairs) / len(pairs)
    total = 0.0
    for t in range(t_count - 1):
        current = beta.top_words(k, t, n).words
        following = beta.top_words(k, t + 1, n).words
        step = 0.0
        for a in current:
            for b in following:
                step += 1.0 if a == b else npmi(stats, a, b)
        total += step / (len(current) * len(following))
    return total / (t_count - 1)


def ttq(
    beta: BetaTensor, corpus: ProcessedCorpus, n: int = DEFAULT_TOP_N
) -> TemporalQuality:
    """Score every topic and aggregate by arithmetic mean over topics.

    The per-topic quality is the exact float product ttc_k * tts_k; the
    aggregate quality is the mean of those products, not the product of the
    aggregate means.
    """
    stats = cooccurrence_stats(corpus, metric_terms(beta, n))
    per_topic = []
    for k in range(beta.num_topics):
        c = ttc_topic(beta, stats, k, n)
        s = tts_topic(beta, k, n)
        per_topic.append((c, s, c * s))
    count = len(per_topic)
    return TemporalQuality(
        per_topic=per_topic,
        ttc=sum(c for c, _, _ in per_topic) / count,
        tts=sum(s for _, s, _ in per_topic) / count,
        ttq=sum(q for _, _, q in per_topic) / count,
        top_n=n,
    )
