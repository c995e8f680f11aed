"""Temporally informative word scoring.

Combines three per-word signals inside a topic: burstiness (peak over mean of
the word's own trajectory), specificity (peak over the word's global mean
across all topics and times), and uniqueness (log penalty on words that reach
some topic's top-N anywhere in time). The final score is their product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log

import numpy as np

from .artifacts import BetaTensor
from .errors import IndexOutOfRange

DEFAULT_EPSILON = 1e-12
DEFAULT_POOL_SIZE = 500


@dataclass(frozen=True)
class SaliencyScore:
    topic: int
    term_id: int
    word: str
    s_burst: float
    s_spec: float
    s_uniq: float
    s_final: float

    def to_dict(self) -> dict:
        return {
            "topic": self.topic,
            "term_id": self.term_id,
            "word": self.word,
            "s_burst": self.s_burst,
            "s_spec": self.s_spec,
            "s_uniq": self.s_uniq,
            "s_final": self.s_final,
        }


@dataclass
class SaliencyConfig:
    """Knobs for candidate pooling and uniqueness membership.

    ``pool_size``: how many words per topic enter scoring, ranked by their
    max-over-time probability. ``top_n_membership``: the N used when counting
    in how many topics a word reaches the top-N. ``membership_mode``:
    ``"any_time"`` counts a topic when the word reaches its top-N at any time
    step (the default, union over time); ``"mean"`` ranks membership on the
    time-averaged distribution instead.
    """

    pool_size: int = DEFAULT_POOL_SIZE
    top_n_membership: int = 10
    epsilon: float = DEFAULT_EPSILON
    membership_mode: str = "any_time"

    def __post_init__(self):
        if self.pool_size < 1:
            raise ValueError("pool_size must be >= 1")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.membership_mode not in ("any_time", "mean"):
            raise ValueError("membership_mode must be 'any_time' or 'mean'")


def score_burstiness(beta: BetaTensor, k: int, v: int, eps: float = DEFAULT_EPSILON) -> float:
    """Peak probability over mean probability of the word within the topic."""
    beta.check_topic(k)
    beta.check_term(v)
    series = beta.values[:, k, v]
    peak = series.max()
    if peak == 0.0:
        return 0.0
    return float(peak / (series.mean() + eps))


def score_specificity(beta: BetaTensor, k: int, v: int, eps: float = DEFAULT_EPSILON) -> float:
    """Peak in-topic probability over the word's mean across all topics and times."""
    beta.check_topic(k)
    beta.check_term(v)
    peak = beta.values[:, k, v].max()
    if peak == 0.0:
        return 0.0
    return float(peak / (beta.values[:, :, v].mean() + eps))


def topic_membership_counts(beta: BetaTensor, n: int, mode: str = "any_time") -> np.ndarray:
    """For every term, the number of topics whose top-``n`` contains it.

    ``any_time`` takes the union of top-``n`` sets over all time steps;
    ``mean`` uses the top-``n`` of the time-averaged distribution.
    """
    if n < 1:
        raise IndexOutOfRange("n must be >= 1")
    counts = np.zeros(beta.vocab_size, dtype=np.int64)
    for k in range(beta.num_topics):
        members: set[int] = set()
        if mode == "mean":
            averaged = beta.values[:, k, :].mean(axis=0)
            order = np.argsort(-averaged, kind="stable")[: min(n, beta.vocab_size)]
            members.update(int(v) for v in order)
        else:
            for t in range(beta.num_times):
                members.update(beta.top_word_ids(k, t, n))
        for v in members:
            counts[v] += 1
    return counts


def score_uniqueness(beta: BetaTensor, v: int, n: int = 10, mode: str = "any_time") -> float:
    """ln(K / m) where m is the word's topic membership count, clamped to >= 1."""
    beta.check_term(v)
    m = int(topic_membership_counts(beta, n, mode)[v])
    return log(beta.num_topics / max(m, 1))


def rank_salient(
    beta: BetaTensor,
    k: int,
    cfg: SaliencyConfig | None = None,
    limit: int = 10,
) -> list[SaliencyScore]:
    """Score the topic's candidate pool and return the ``limit`` best words.

    The pool is the topic's top ``cfg.pool_size`` words by max-over-time
    probability. Ordering is by descending final score with ascending term id
    breaking ties, so repeated calls return identical rankings.
    """
    cfg = cfg or SaliencyConfig()
    beta.check_topic(k)
    if limit < 1:
        raise IndexOutOfRange("limit must be >= 1")

    slice_k = beta.values[:, k, :]
    peaks = slice_k.max(axis=0)
    pool = np.argsort(-peaks, kind="stable")[: min(cfg.pool_size, beta.vocab_size)]

    means_k = slice_k.mean(axis=0)
    global_means = beta.values.mean(axis=(0, 1))
    memberships = topic_membership_counts(beta, cfg.top_n_membership, cfg.membership_mode)
    k_total = beta.num_topics

    scores = []
    for v in pool:
        v = int(v)
        burst = float(peaks[v] / (means_k[v] + cfg.epsilon))
        spec = float(peaks[v] / (global_means[v] + cfg.epsilon))
        uniq = log(k_total / max(int(memberships[v]), 1))
        scores.append(
            SaliencyScore(
                topic=k,
                term_id=v,
                word=beta.vocab[v],
                s_burst=burst,
                s_spec=spec,
                s_uniq=uniq,
                s_final=burst * spec * uniq,
            )
        )
    scores.sort(key=lambda s: (-s.s_final, s.term_id))
    return scores[:limit]
