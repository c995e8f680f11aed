"""Temporal topic-word tensor: file contract, validation, and queries.

The tensor holds one probability distribution over the vocabulary per
(time, topic) pair. On disk it is a raw little-endian float32 array in
row-major ``[time][topic][word]`` order (``beta.f32``) next to a
``model_meta.json`` sidecar declaring the dimensions; a nested-array
``beta.json`` is accepted as a plain-text alternative for small fixtures.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IndexOutOfRange, NotADistribution, ShapeMismatch, TimestampMismatch, VocabMismatch

META_FILE = "model_meta.json"
TENSOR_FILE = "beta.f32"
TENSOR_JSON_FILE = "beta.json"

ROW_SUM_TOLERANCE = 1e-4


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass(frozen=True)
class TopWordSet:
    topic: int
    time: int
    words: list[str]
    term_ids: list[int]
    probabilities: list[float]


@dataclass(frozen=True)
class Trajectory:
    topic: int
    word: str
    term_id: int
    series: list[float]


class BetaTensor:
    """Validated, immutable wrapper around the dense probability array."""

    def __init__(
        self,
        values: np.ndarray,
        vocab: list[str],
        timestamps: list[str],
        model_name: str = "",
        vocab_ref: str = "",
        timestamp_ref: str = "",
    ):
        self.values = values
        self.vocab = vocab
        self.timestamps = timestamps
        self.model_name = model_name
        self.vocab_ref = vocab_ref
        self.timestamp_ref = timestamp_ref
        self._term_ids = {term: i for i, term in enumerate(vocab)}
        self.values.setflags(write=False)

    @property
    def num_times(self) -> int:
        return self.values.shape[0]

    @property
    def num_topics(self) -> int:
        return self.values.shape[1]

    @property
    def vocab_size(self) -> int:
        return self.values.shape[2]

    def term_id(self, term: str) -> int | None:
        return self._term_ids.get(term)

    def check_topic(self, k: int) -> None:
        if not 0 <= k < self.num_topics:
            raise IndexOutOfRange(f"topic {k} outside [0, {self.num_topics})")

    def check_time(self, t: int) -> None:
        if not 0 <= t < self.num_times:
            raise IndexOutOfRange(f"time {t} outside [0, {self.num_times})")

    def check_term(self, v: int) -> None:
        if not 0 <= v < self.vocab_size:
            raise IndexOutOfRange(f"term id {v} outside [0, {self.vocab_size})")

    def top_words(self, k: int, t: int, n: int = 10) -> TopWordSet:
        """Top-``n`` terms of topic ``k`` at time ``t``, ties by ascending id."""
        self.check_topic(k)
        self.check_time(t)
        if n < 1:
            raise IndexOutOfRange("n must be >= 1")
        row = self.values[t, k, :]
        n = min(n, row.shape[0])
        # Stable sort on descending probability keeps ascending ids for ties.
        order = np.argsort(-row, kind="stable")[:n]
        ids = [int(v) for v in order]
        return TopWordSet(
            topic=k,
            time=t,
            words=[self.vocab[v] for v in ids],
            term_ids=ids,
            probabilities=[float(row[v]) for v in ids],
        )

    def top_word_ids(self, k: int, t: int, n: int = 10) -> list[int]:
        return self.top_words(k, t, n).term_ids

    def trajectory(self, k: int, v: int) -> Trajectory:
        """The length-T probability series of term ``v`` within topic ``k``."""
        self.check_topic(k)
        self.check_term(v)
        series = [float(x) for x in self.values[:, k, v]]
        return Trajectory(topic=k, word=self.vocab[v], term_id=v, series=series)

    def trajectory_for(self, k: int, word: str) -> Trajectory:
        v = self.term_id(word)
        if v is None:
            raise IndexOutOfRange(f"unknown word {word!r}")
        return self.trajectory(k, v)


def _validate_rows(values: np.ndarray) -> np.ndarray:
    if np.any(values < 0):
        t, k, v = np.argwhere(values < 0)[0]
        raise NotADistribution(f"negative entry at (t={t}, k={k}, v={v})")
    sums = values.sum(axis=2)
    bad = np.abs(sums - 1.0) > ROW_SUM_TOLERANCE
    if np.any(bad):
        t, k = np.argwhere(bad)[0]
        raise NotADistribution(
            f"row (t={t}, k={k}) sums to {sums[t, k]:.6f}, outside 1 +/- {ROW_SUM_TOLERANCE}"
        )
    # Float32 exports drift slightly below/above 1; renormalize inside tolerance.
    return values / sums[:, :, np.newaxis]


def load_beta(
    meta_path: str | Path,
    tensor_path: str | Path,
    vocab_path: str | Path,
    timestamps_path: str | Path,
) -> BetaTensor:
    """Load and validate the tensor against its vocabulary and timestamp files."""
    meta = json.loads(Path(meta_path).read_text(encoding="utf-8"))
    num_times = int(meta["num_times"])
    num_topics = int(meta["num_topics"])
    vocab_size = int(meta["vocab_size"])
    model_name = str(meta.get("model_name", ""))

    tensor_path = Path(tensor_path)
    if tensor_path.suffix == ".json":
        nested = json.loads(tensor_path.read_text(encoding="utf-8"))
        flat = np.asarray(nested, dtype=np.float64)
        if flat.ndim != 3 or flat.shape != (num_times, num_topics, vocab_size):
            raise ShapeMismatch(
                f"beta.json shape {flat.shape} != declared "
                f"({num_times}, {num_topics}, {vocab_size})"
            )
        values = flat
    else:
        raw = np.fromfile(tensor_path, dtype="<f4")
        expected = num_times * num_topics * vocab_size
        if raw.size != expected:
            raise ShapeMismatch(
                f"{tensor_path.name} holds {raw.size} float32 values, "
                f"declared T*K*V = {expected}"
            )
        values = raw.astype(np.float64).reshape(num_times, num_topics, vocab_size)

    vocab = Path(vocab_path).read_text(encoding="utf-8").splitlines()
    if len(vocab) != vocab_size:
        raise VocabMismatch(f"vocab has {len(vocab)} terms, tensor declares {vocab_size}")
    timestamps = Path(timestamps_path).read_text(encoding="utf-8").splitlines()
    if len(timestamps) != num_times:
        raise TimestampMismatch(
            f"timestamps file has {len(timestamps)} labels, tensor declares {num_times}"
        )

    values = _validate_rows(values)
    return BetaTensor(
        values=values,
        vocab=vocab,
        timestamps=timestamps,
        model_name=model_name,
        vocab_ref=sha256_file(vocab_path),
        timestamp_ref=sha256_file(timestamps_path),
    )


def load_beta_dir(model_dir: str | Path, corpus_dir: str | Path) -> BetaTensor:
    """Load ``model_meta.json`` + tensor from ``model_dir``, vocabulary and
    timestamps from a processed corpus directory."""
    model_dir = Path(model_dir)
    corpus_dir = Path(corpus_dir)
    tensor_path = model_dir / TENSOR_FILE
    if not tensor_path.exists():
        alt = model_dir / TENSOR_JSON_FILE
        if not alt.exists():
            raise FileNotFoundError(f"{tensor_path} (or {alt.name}) not found")
        tensor_path = alt
    return load_beta(
        model_dir / META_FILE,
        tensor_path,
        corpus_dir / "vocab.txt",
        corpus_dir / "timestamps.txt",
    )


def save_beta(values: np.ndarray, model_dir: str | Path, model_name: str = "") -> Path:
    """Write ``beta.f32`` + ``model_meta.json`` for a [T, K, V] array."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 3:
        raise ShapeMismatch(f"expected a [T, K, V] array, got ndim={values.ndim}")
    model_dir = Path(model_dir)
    model_dir.mkdir(parents=True, exist_ok=True)
    values.astype("<f4").tofile(model_dir / TENSOR_FILE)
    meta = {
        "num_times": values.shape[0],
        "num_topics": values.shape[1],
        "vocab_size": values.shape[2],
        "model_name": model_name,
    }
    (model_dir / META_FILE).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return model_dir
