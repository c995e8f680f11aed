import json
import random

import pytest

from tempotopics.errors import DuplicateId, EmptyCorpus
from tempotopics.ingest import (
    BigramPhraser,
    CorpusPreprocessor,
    ProcessedCorpus,
    RawDocument,
    bin_timestamps,
    collocation_score,
    preprocess_corpus,
    tokenize,
)

from oracles import naive_bigram_merges


class TestTokenize:
    def test_stopwords_punct_and_case(self):
        out = tokenize("The RBI issued new rules.", stopwords={"the", "new"}, min_chars=3)
        assert out == ["rbi", "issued", "rules"]

    def test_empty_text(self):
        assert tokenize("") == []

    def test_all_below_length_floor(self):
        assert tokenize("a b c", min_chars=3) == []

    def test_underscore_preserved(self):
        assert tokenize("debit_card fees!", min_chars=3) == ["debit_card", "fees"]

    def test_interior_punctuation_kept(self):
        assert tokenize("don't u.s. -flag-") == ["don't", "u.s", "flag"]

    def test_punctuation_kept_when_disabled(self):
        assert tokenize("rules.", remove_punctuation=False) == ["rules."]

    def test_order_preserved(self):
        assert tokenize("zeta alpha beta") == ["zeta", "alpha", "beta"]


class TestCollocationScore:
    def test_worked_example_below_threshold(self):
        score = collocation_score(6, 8, 7, 100, 5)
        assert score == pytest.approx(1.785714285714, abs=1e-6)
        assert score < 20

    def test_zero_numerator_at_min_count(self):
        assert collocation_score(5, 10, 10, 1000, 5) == 0.0

    def test_worked_example_above_threshold(self):
        score = collocation_score(30, 30, 30, 1000, 5)
        assert score == pytest.approx(27.777777777778, abs=1e-6)
        assert score >= 20


class TestBigramPhraser:
    def test_merge_and_rewrite(self):
        # 6 adjacent (big, deal) pairs and 90 distinct filler terms:
        # score = (6 - 5) * 92 / (6 * 6) = 2.56 >= 2.0.
        streams = [
            ["big", "deal"] + [f"filler{i}_{j}" for j in range(15)] for i in range(6)
        ]
        phraser = BigramPhraser(min_count=5, threshold=2.0).fit(streams)
        assert ("big", "deal") in phraser.merged_
        assert phraser.transform([["big", "deal", "now"]]) == [["big_deal", "now"]]

    def test_below_min_count_never_merges(self):
        streams = [["big", "deal", f"filler{i}"] for i in range(4)]
        phraser = BigramPhraser(min_count=5, threshold=0.001).fit(streams)
        assert phraser.merged_ == set()

    def test_greedy_left_to_right_no_overlap(self):
        phraser = BigramPhraser()
        phraser.merged_ = {("a", "b"), ("b", "c")}
        assert phraser.merge_stream(["a", "b", "c"]) == ["a_b", "c"]
        assert phraser.merge_stream(["x", "a", "b", "b", "a"]) == ["x", "a_b", "b", "a"]

    def test_matches_count_oracle(self):
        rng = random.Random(7)
        words = [f"w{i}" for i in range(12)]
        streams = [
            [rng.choice(words) for _ in range(rng.randint(2, 30))] for _ in range(40)
        ]
        phraser = BigramPhraser(min_count=3, threshold=0.5).fit(streams)
        assert phraser.merged_ == naive_bigram_merges(streams, 3, 0.5)

    def test_threshold_monotonicity(self):
        rng = random.Random(11)
        words = [f"w{i}" for i in range(10)]
        streams = [
            [rng.choice(words) for _ in range(rng.randint(2, 25))] for _ in range(30)
        ]
        previous = None
        for threshold in (0.1, 0.5, 1.0, 2.0, 8.0):
            merged = BigramPhraser(min_count=2, threshold=threshold).fit(streams).merged_
            if previous is not None:
                assert merged <= previous
            previous = merged

    def test_get_params_roundtrip(self):
        phraser = BigramPhraser(min_count=7, threshold=3.5)
        params = phraser.get_params()
        assert params == {"min_count": 7, "threshold": 3.5}


class TestBinTimestamps:
    def test_numeric_sort(self):
        labels, mapping = bin_timestamps(["2016", "2015", "2016"])
        assert labels == ["2015", "2016"]
        assert mapping == {"2015": 0, "2016": 1}

    def test_singleton(self):
        labels, mapping = bin_timestamps(["1999"])
        assert labels == ["1999"]
        assert mapping == {"1999": 0}

    def test_lexicographic_fallback(self):
        labels, mapping = bin_timestamps(["b", "a", "c"])
        assert labels == ["a", "b", "c"]
        assert [mapping[x] for x in labels] == [0, 1, 2]


def make_docs():
    return [
        RawDocument("d1", "markets rallied strongly as banks gained ground", "2001"),
        RawDocument("d2", "banks cut lending rates amid pressure", "2000"),
        RawDocument("d3", "the and for", "2001"),
    ]


class TestPreprocessCorpus:
    def test_short_doc_dropped(self):
        docs = [
            RawDocument("d1", "alpha beta gamma delta", "2000"),
            RawDocument("d2", "alpha beta", "2000"),
            RawDocument("d3", "gamma delta alpha", "2001"),
        ]
        corpus = preprocess_corpus(docs, min_words_docs=3)
        assert [d.id for d in corpus.documents] == ["d1", "d3"]

    def test_all_stopwords_raises_empty(self):
        docs = [RawDocument("d1", "the and for", "2000")]
        with pytest.raises(EmptyCorpus):
            preprocess_corpus(docs, stopwords={"the", "and", "for"}, min_words_docs=1)

    def test_duplicate_id(self):
        docs = [
            RawDocument("d1", "alpha beta gamma", "2000"),
            RawDocument("d1", "delta epsilon zeta", "2000"),
        ]
        with pytest.raises(DuplicateId):
            preprocess_corpus(docs)

    def test_time_indices_contiguous_and_sorted(self):
        corpus = preprocess_corpus(make_docs(), stopwords={"the", "and", "for"})
        assert corpus.timestamps == ["2000", "2001"]
        by_id = {d.id: d.time_index for d in corpus.documents}
        assert by_id == {"d1": 1, "d2": 0}

    def test_vocabulary_closure(self):
        corpus = preprocess_corpus(make_docs(), stopwords={"the", "and", "for"})
        seen = set()
        for doc in corpus.documents:
            for token in doc.tokens:
                assert token in corpus.vocab
                seen.add(token)
        assert seen == set(corpus.vocab)

    def test_vocab_order_by_frequency_then_term(self):
        docs = [
            RawDocument("d1", "zzz aaa zzz bbb", "2000"),
            RawDocument("d2", "aaa bbb zzz aaa", "2000"),
        ]
        corpus = preprocess_corpus(docs, min_words_docs=1)
        assert corpus.vocab == ["aaa", "zzz", "bbb"]

    def test_max_vocab_prunes_by_doc_frequency(self):
        docs = [
            RawDocument("d1", "aaa bbb ccc", "2000"),
            RawDocument("d2", "aaa bbb ddd", "2000"),
            RawDocument("d3", "aaa eee fff", "2000"),
        ]
        corpus = preprocess_corpus(docs, min_words_docs=1, max_vocab=2)
        assert set(corpus.vocab) == {"aaa", "bbb"}

    def test_min_doc_freq(self):
        docs = [
            RawDocument("d1", "aaa bbb ccc", "2000"),
            RawDocument("d2", "aaa bbb ddd", "2000"),
        ]
        corpus = preprocess_corpus(docs, min_words_docs=1, min_doc_freq=2)
        assert set(corpus.vocab) == {"aaa", "bbb"}

    def test_transform_requires_known_timestamp(self):
        pre = CorpusPreprocessor(min_words_docs=1)
        pre.fit(make_docs()[:2])
        with pytest.raises(KeyError):
            pre.transform([RawDocument("d9", "markets rallied strongly", "2099")])


class TestSerialization:
    def test_save_load_roundtrip(self, tmp_path, fixture_corpus):
        out = tmp_path / "processed"
        fixture_corpus.save(out)
        again = ProcessedCorpus.load(out)
        assert [d.tokens for d in again.documents] == [
            d.tokens for d in fixture_corpus.documents
        ]
        assert again.vocab == fixture_corpus.vocab
        assert again.timestamps == fixture_corpus.timestamps
        assert again.checksum() == fixture_corpus.checksum()

    def test_deterministic_bytes(self, tmp_path, fixture_corpus):
        a = tmp_path / "a"
        b = tmp_path / "b"
        fixture_corpus.save(a)
        fixture_corpus.save(b)
        for name in ("tokens.jsonl", "vocab.txt", "timestamps.txt", "stats.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_stats_totals(self, fixture_corpus):
        stats = fixture_corpus.compute_stats()
        assert stats["num_docs"] == 30
        assert stats["num_timestamps"] == 3
        assert stats["docs_per_bin"] == {"2015": 10, "2016": 10, "2017": 10}


class TestFixtureCorpus:
    def test_credit_card_bigram_merged(self, fixture_corpus):
        assert "credit_card" in fixture_corpus.vocab
        assert "credit" not in fixture_corpus.vocab
        assert "card" not in fixture_corpus.vocab

    def test_idempotent_on_processed_streams(self, fixture_corpus):
        rejoined = [
            RawDocument(d.id, " ".join(d.tokens), fixture_corpus.timestamps[d.time_index])
            for d in fixture_corpus.documents
        ]
        again = preprocess_corpus(
            rejoined, min_count_bigram=5, threshold_bigram=3.0, min_chars=3, min_words_docs=3
        )
        assert [d.tokens for d in again.documents] == [
            d.tokens for d in fixture_corpus.documents
        ]
