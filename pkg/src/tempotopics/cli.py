"""Command line entry point chaining the whole workflow:
preprocess -> validate -> evaluate -> salient -> label -> retrieve -> serve.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import llm as llm_mod
from .artifacts import load_beta_dir
from .errors import TempoTopicsError
from .ingest import ProcessedCorpus, preprocess_corpus, read_docs_jsonl, read_stopwords
from .llm import LlmCache, LlmClient, LlmConfig
from .metrics import ttq
from .retrieval import CorpusIndex
from .saliency import SaliencyConfig, rank_salient
from .service import ServiceConfig


def _echo(ctx, payload: dict, text: str) -> None:
    opts = ctx.obj or {}
    if opts.get("json"):
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    elif not opts.get("quiet"):
        click.echo(text)


def _config_value(ctx, key: str, default=None):
    return (ctx.obj or {}).get("config", {}).get(key, default)


def _llm_config(ctx) -> LlmConfig:
    file_cfg = (ctx.obj or {}).get("config", {}).get("llm", {})
    return LlmConfig.from_env(**file_cfg)


def _llm_client(ctx, model_dir: str) -> LlmClient:
    cache = LlmCache(Path(model_dir) / "cache" / "llm")
    return LlmClient(_llm_config(ctx), cache=cache)


@click.group()
@click.option("--json", "json_out", is_flag=True, help="Machine-readable output.")
@click.option("--quiet", is_flag=True, help="Suppress progress output.")
@click.option(
    "--config",
    "config_file",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="JSON config file with defaults (llm settings, mmr defaults).",
)
@click.pass_context
def main(ctx, json_out, quiet, config_file):
    """Temporal topic exploration over a processed corpus and a topic tensor."""
    ctx.ensure_object(dict)
    ctx.obj["json"] = json_out
    ctx.obj["quiet"] = quiet
    ctx.obj["config"] = {}
    if config_file:
        ctx.obj["config"] = json.loads(Path(config_file).read_text(encoding="utf-8"))


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--stopwords", "stopwords_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--min-count-bigram", default=5, show_default=True)
@click.option("--threshold-bigram", default=20.0, show_default=True)
@click.option("--min-chars", default=3, show_default=True)
@click.option("--min-words-docs", default=3, show_default=True)
@click.option("--max-vocab", default=None, type=int)
@click.option("--min-doc-freq", default=None, type=int)
@click.option("--keep-punctuation", is_flag=True, help="Skip edge-punctuation stripping.")
@click.pass_context
def preprocess(
    ctx,
    input_path,
    out_dir,
    stopwords_file,
    min_count_bigram,
    threshold_bigram,
    min_chars,
    min_words_docs,
    max_vocab,
    min_doc_freq,
    keep_punctuation,
):
    """Tokenize docs.jsonl into a processed corpus directory."""
    docs = read_docs_jsonl(input_path)
    stopwords = read_stopwords(stopwords_file) if stopwords_file else set()
    corpus = preprocess_corpus(
        docs,
        stopwords=stopwords,
        min_count_bigram=min_count_bigram,
        threshold_bigram=threshold_bigram,
        remove_punctuation=not keep_punctuation,
        min_chars=min_chars,
        min_words_docs=min_words_docs,
        max_vocab=max_vocab,
        min_doc_freq=min_doc_freq,
    )
    out = corpus.save(out_dir)
    # Carry the raw texts along so retrieval can highlight original documents.
    kept = {d.id for d in corpus.documents}
    with open(out / "docs.jsonl", "w", encoding="utf-8") as fh:
        for doc in docs:
            if doc.id in kept:
                record = {"id": doc.id, "text": doc.text, "timestamp": doc.timestamp}
                fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n")
    _echo(
        ctx,
        corpus.stats,
        f"processed {corpus.num_docs} docs, vocab {len(corpus.vocab)}, "
        f"{corpus.num_times} timestamps -> {out}",
    )


@main.command()
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--model", "model_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.pass_context
def validate(ctx, corpus_dir, model_dir):
    """Check that the tensor and corpus artifacts are consistent."""
    corpus = ProcessedCorpus.load(corpus_dir)
    beta = load_beta_dir(model_dir, corpus_dir)
    payload = {
        "num_times": beta.num_times,
        "num_topics": beta.num_topics,
        "vocab_size": beta.vocab_size,
        "num_docs": corpus.num_docs,
        "model_name": beta.model_name,
        "valid": True,
    }
    _echo(
        ctx,
        payload,
        f"ok: T={beta.num_times} K={beta.num_topics} V={beta.vocab_size} "
        f"docs={corpus.num_docs}",
    )


@main.command()
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--model", "model_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--topn", default=10, show_default=True)
@click.option("--out", "out_file", default=None, type=click.Path(dir_okay=False))
@click.pass_context
def evaluate(ctx, corpus_dir, model_dir, topn, out_file):
    """Compute temporal coherence, smoothness, and quality scores."""
    corpus = ProcessedCorpus.load(corpus_dir)
    beta = load_beta_dir(model_dir, corpus_dir)
    quality = ttq(beta, corpus, n=topn)
    payload = quality.to_dict()
    if out_file:
        Path(out_file).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    _echo(
        ctx,
        payload,
        f"ttc={quality.ttc:.4f} tts={quality.tts:.4f} ttq={quality.ttq:.4f}"
        + (f" -> {out_file}" if out_file else ""),
    )


@main.command()
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--model", "model_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--topic", required=True, type=int)
@click.option("--pool", default=500, show_default=True)
@click.option("--limit", default=10, show_default=True)
@click.option("--topn", default=10, show_default=True, help="Top-N for uniqueness membership.")
@click.option("--out", "out_file", default=None, type=click.Path(dir_okay=False))
@click.pass_context
def salient(ctx, corpus_dir, model_dir, topic, pool, limit, topn, out_file):
    """Rank temporally informative words for one topic."""
    beta = load_beta_dir(model_dir, corpus_dir)
    scores = rank_salient(
        beta, topic, SaliencyConfig(pool_size=pool, top_n_membership=topn), limit=limit
    )
    payload = {"topic": topic, "scores": [s.to_dict() for s in scores]}
    if out_file:
        Path(out_file).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    _echo(
        ctx,
        payload,
        "\n".join(f"{s.word}\t{s.s_final:.4f}" for s in scores)
        + (f"\n-> {out_file}" if out_file else ""),
    )


@main.command()
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--model", "model_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--topic", required=True, type=int)
@click.option("--topn", default=10, show_default=True)
@click.pass_context
def label(ctx, corpus_dir, model_dir, topic, topn):
    """Generate (or fetch the cached) LLM label for one topic."""
    beta = load_beta_dir(model_dir, corpus_dir)
    client = _llm_client(ctx, model_dir)
    try:
        traj = llm_mod.keyword_trajectory(beta, topic, topn)
        text = llm_mod.label_topic(traj, client)
    finally:
        client.close()
    _echo(ctx, {"topic": topic, "label": text}, f"topic {topic}: {text}")


@main.command()
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--word", required=True)
@click.option("--time", "time_index", required=True, type=int)
@click.option("--limit", default=20, show_default=True)
@click.option("--mmr-lambda", "lam", default=0.7, show_default=True)
@click.pass_context
def retrieve(ctx, corpus_dir, word, time_index, limit, lam):
    """Retrieve diversified documents for a word-timestamp pair."""
    corpus = ProcessedCorpus.load(corpus_dir)
    texts = None
    raw_path = Path(corpus_dir) / "docs.jsonl"
    if raw_path.exists():
        texts = {d.id: d.text for d in read_docs_jsonl(raw_path)}
    index = CorpusIndex.build(corpus, cache_dir=corpus_dir, texts=texts)
    results = index.retrieve(word, time_index, lam=lam, m=limit)
    payload = {
        "word": word,
        "time_index": time_index,
        "results": [r.to_dict() for r in results],
    }
    _echo(
        ctx,
        payload,
        "\n".join(f"{r.id}\t{r.relevance:.4f}\t{len(r.highlights)} highlight(s)" for r in results)
        or "no matching documents",
    )


@main.command()
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--model", "model_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True)
@click.option("--prelabel", is_flag=True, help="Label every topic at startup.")
@click.option("--ui-dir", default=None, type=click.Path(file_okay=False))
@click.option("--cors", "cors_origins", multiple=True, help="Allowed CORS origins.")
@click.pass_context
def serve(ctx, corpus_dir, model_dir, host, port, prelabel, ui_dir, cors_origins):
    """Serve the exploration API (and the web UI when built)."""
    from .service import serve as run_service

    cfg = ServiceConfig(
        corpus_dir=corpus_dir,
        model_dir=model_dir,
        llm=_llm_config(ctx),
        mmr_lambda=_config_value(ctx, "mmr_lambda", 0.7),
        mmr_select=_config_value(ctx, "mmr_select", 20),
        prelabel=prelabel,
        ui_dir=ui_dir,
        cors_origins=list(cors_origins) or ["*"],
    )
    if not (ctx.obj or {}).get("quiet"):
        click.echo(f"serving http://{host}:{port} (corpus={corpus_dir}, model={model_dir})")
    run_service(cfg, host=host, port=port)


def entrypoint(argv=None) -> int:
    try:
        main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 2
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.exceptions.Abort:
        return 1
    except TempoTopicsError as exc:
        click.echo(f"error [{exc.code}]: {exc}", err=True)
        return 1


if __name__ == "__main__":
    sys.exit(entrypoint())
