import json
from pathlib import Path

import numpy as np
import pytest

from tempotopics.artifacts import load_beta_dir, save_beta
from tempotopics.ingest import preprocess_corpus, read_docs_jsonl, read_stopwords
from tempotopics.llm import LlmCache, LlmClient, LlmConfig
from tempotopics.stub_llm import StubLlmServer

FIXTURES = Path(__file__).parent / "fixtures"

# Fixture preprocessing knobs: the bundled corpus is small, so the bigram
# threshold is lowered until "credit card" (10 adjacent occurrences) merges.
FIXTURE_PREPROCESS = dict(
    min_count_bigram=5,
    threshold_bigram=3.0,
    min_chars=3,
    min_words_docs=3,
)

# Per-topic, per-word emphasis over the three years; everything else gets a
# small flat baseline. Topic 0 leans on regulation and the cash economy,
# topic 1 on digital payments and fraud.
TOPIC_ANCHORS = [
    {
        "rbi": (8.0, 10.0, 6.0),
        "banks": (8.0, 8.0, 8.0),
        "cash": (6.0, 12.0, 2.0),
        "demonetisation": (0.2, 14.0, 3.0),
        "atm": (3.0, 6.0, 2.0),
        "branches": (3.0, 2.0, 1.0),
        "credit_card": (2.0, 3.0, 3.0),
    },
    {
        "upi": (0.5, 3.0, 12.0),
        "npci": (0.5, 2.0, 8.0),
        "digital": (1.0, 4.0, 10.0),
        "payments": (2.0, 5.0, 10.0),
        "fraud": (2.0, 2.0, 9.0),
        "credit_card": (1.0, 3.0, 6.0),
        "wallet": (0.5, 4.0, 1.0),
    },
]


def build_fixture_beta(vocab: list[str]) -> np.ndarray:
    """Hand-weighted K=2, T=3 tensor aligned to the processed vocabulary."""
    t_count, k_count, v_count = 3, 2, len(vocab)
    values = np.zeros((t_count, k_count, v_count))
    for v, term in enumerate(vocab):
        # Distinct baselines avoid probability ties in top-word sets.
        values[:, :, v] = 0.05 + 0.0003 * (v % 11)
    for k, anchors in enumerate(TOPIC_ANCHORS):
        for term, weights in anchors.items():
            v = vocab.index(term)
            for t in range(t_count):
                values[t, k, v] = weights[t]
    return values / values.sum(axis=2, keepdims=True)


@pytest.fixture(scope="session")
def fixture_dirs(tmp_path_factory):
    """Preprocess the bundled corpus once and write model artifacts next to it."""
    root = tmp_path_factory.mktemp("engine")
    corpus_dir = root / "processed"
    model_dir = root / "model"

    docs = read_docs_jsonl(FIXTURES / "docs.jsonl")
    stopwords = read_stopwords(FIXTURES / "stopwords.txt")
    corpus = preprocess_corpus(docs, stopwords=stopwords, **FIXTURE_PREPROCESS)
    corpus.save(corpus_dir)
    with open(corpus_dir / "docs.jsonl", "w", encoding="utf-8") as fh:
        for doc in docs:
            record = {"id": doc.id, "text": doc.text, "timestamp": doc.timestamp}
            fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n")

    save_beta(build_fixture_beta(corpus.vocab), model_dir, model_name="fixture-k2")
    return {"root": root, "corpus": corpus_dir, "model": model_dir}


@pytest.fixture(scope="session")
def fixture_corpus(fixture_dirs):
    from tempotopics.ingest import ProcessedCorpus

    return ProcessedCorpus.load(fixture_dirs["corpus"])


@pytest.fixture(scope="session")
def fixture_beta(fixture_dirs):
    return load_beta_dir(fixture_dirs["model"], fixture_dirs["corpus"])


@pytest.fixture
def stub_llm():
    with StubLlmServer() as server:
        yield server


@pytest.fixture
def llm_client(stub_llm, tmp_path):
    config = LlmConfig(base_url=stub_llm.base_url, model="stub-model", timeout_secs=5.0)
    client = LlmClient(config, cache=LlmCache(tmp_path / "cache" / "llm"))
    yield client
    client.close()
