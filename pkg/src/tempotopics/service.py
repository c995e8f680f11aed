"""HTTP service exposing corpus, tensor, metrics, saliency, retrieval, and the
LLM-backed labeling, summarization, and chat operations as JSON endpoints.

All artifacts are loaded and validated once at startup and served immutably;
chat sessions live in a bounded in-memory store.
"""

from __future__ import annotations

import threading
import time
import uuid
from collections import OrderedDict
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import llm as llm_mod
from .artifacts import BetaTensor, load_beta_dir
from .errors import (
    IndexOutOfRange,
    ProviderError,
    StartupValidation,
    TempoTopicsError,
)
from .ingest import ProcessedCorpus, read_docs_jsonl
from .llm import GroundedSession, LlmCache, LlmClient, LlmConfig
from .metrics import ttq
from .retrieval import DEFAULT_LAMBDA, DEFAULT_SELECT, CorpusIndex
from .saliency import SaliencyConfig, rank_salient

SESSION_CAP = 256
SESSION_TTL_SECS = 3600.0


@dataclass
class ServiceConfig:
    corpus_dir: str
    model_dir: str
    llm: LlmConfig = field(default_factory=LlmConfig.from_env)
    mmr_lambda: float = DEFAULT_LAMBDA
    mmr_select: int = DEFAULT_SELECT
    cors_origins: list[str] = field(default_factory=lambda: ["*"])
    prelabel: bool = False
    top_n: int = 10
    ui_dir: Optional[str] = None
    cache_dir: Optional[str] = None


class SessionStore:
    """LRU session map with a fixed capacity and idle TTL."""

    def __init__(self, cap: int = SESSION_CAP, ttl: float = SESSION_TTL_SECS):
        self.cap = cap
        self.ttl = ttl
        self._sessions: OrderedDict[str, GroundedSession] = OrderedDict()
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def create(self, context_docs: list[str]) -> GroundedSession:
        session = GroundedSession(id=uuid.uuid4().hex, context_docs=context_docs)
        with self._guard:
            self._sessions[session.id] = session
            self._locks[session.id] = threading.Lock()
            while len(self._sessions) > self.cap:
                dropped, _ = self._sessions.popitem(last=False)
                self._locks.pop(dropped, None)
        return session

    def get(self, session_id: str) -> Optional[GroundedSession]:
        with self._guard:
            session = self._sessions.get(session_id)
            if session is None:
                return None
            if time.time() - session.created_at > self.ttl:
                del self._sessions[session_id]
                self._locks.pop(session_id, None)
                return None
            self._sessions.move_to_end(session_id)
            return session

    def lock(self, session_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(session_id, threading.Lock())


class SummarizeRequest(BaseModel):
    doc_ids: list[str]
    words: list[str] = []
    time_index: int


class SessionRequest(BaseModel):
    doc_ids: list[str]


class ChatRequest(BaseModel):
    message: str


class EngineState:
    """Artifacts and helpers shared by all request handlers."""

    def __init__(self, cfg: ServiceConfig):
        corpus_dir = Path(cfg.corpus_dir)
        model_dir = Path(cfg.model_dir)
        for required in (
            corpus_dir / "tokens.jsonl",
            corpus_dir / "vocab.txt",
            corpus_dir / "timestamps.txt",
            model_dir / "model_meta.json",
        ):
            if not required.exists():
                raise StartupValidation(f"missing artifact: {required}")
        if not (model_dir / "beta.f32").exists() and not (model_dir / "beta.json").exists():
            raise StartupValidation(f"missing artifact: {model_dir / 'beta.f32'}")

        self.cfg = cfg
        self.corpus = ProcessedCorpus.load(corpus_dir)
        try:
            self.beta: BetaTensor = load_beta_dir(model_dir, corpus_dir)
        except TempoTopicsError as exc:
            raise StartupValidation(f"invalid model artifacts: {exc}") from exc

        texts = None
        raw_path = corpus_dir / "docs.jsonl"
        if raw_path.exists():
            texts = {doc.id: doc.text for doc in read_docs_jsonl(raw_path)}
        self.index = CorpusIndex.build(self.corpus, cache_dir=corpus_dir, texts=texts)

        cache_root = Path(cfg.cache_dir) if cfg.cache_dir else model_dir / "cache" / "llm"
        self.llm_cache = LlmCache(cache_root)
        self.llm_client = LlmClient(cfg.llm, cache=self.llm_cache)
        self.sessions = SessionStore()
        self._quality = None
        self._quality_lock = threading.Lock()

    def quality(self):
        with self._quality_lock:
            if self._quality is None:
                self._quality = ttq(self.beta, self.corpus, n=self.cfg.top_n)
            return self._quality

    def cached_label(self, k: int) -> Optional[str]:
        """Label from the cache only; never triggers a provider call."""
        traj = llm_mod.keyword_trajectory(self.beta, k, self.cfg.top_n)
        req = llm_mod.build_label_prompt(
            traj,
            base_url=self.cfg.llm.base_url,
            model=self.cfg.llm.model,
            max_tokens=self.cfg.llm.label_max_tokens,
        )
        return self.llm_cache.get(llm_mod.cache_key(req))

    def label(self, k: int) -> str:
        traj = llm_mod.keyword_trajectory(self.beta, k, self.cfg.top_n)
        return llm_mod.label_topic(traj, self.llm_client)

    def doc_texts(self, doc_ids: list[str]) -> list[str]:
        known = {d.id for d in self.corpus.documents}
        missing = [d for d in doc_ids if d not in known]
        if missing:
            raise TempoTopicsError(f"unknown document ids: {missing[:5]}")
        return [self.index.text_of(d) for d in doc_ids]


def create_app(cfg: ServiceConfig) -> FastAPI:
    state = EngineState(cfg)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        state.llm_client.close()

    app = FastAPI(title="tempotopics", version="0.1.0", lifespan=lifespan)
    app.state.engine = state

    app.add_middleware(
        CORSMiddleware,
        allow_origins=cfg.cors_origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(TempoTopicsError)
    async def domain_error(request: Request, exc: TempoTopicsError):
        if isinstance(exc, ProviderError):
            status = 502
        elif isinstance(exc, IndexOutOfRange):
            status = 404
        else:
            status = 400
        return JSONResponse(
            status_code=status, content={"code": exc.code, "message": str(exc)}
        )

    @app.exception_handler(RequestValidationError)
    async def invalid_request(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"code": "bad_request", "message": str(exc.errors())}
        )

    @app.get("/api/meta")
    def meta():
        return {
            "num_times": state.beta.num_times,
            "num_topics": state.beta.num_topics,
            "vocab_size": state.beta.vocab_size,
            "num_docs": state.corpus.num_docs,
            "model_name": state.beta.model_name,
            "timestamps": state.beta.timestamps,
        }

    @app.get("/api/topics")
    def topics(topn: Optional[int] = None):
        n = topn or cfg.top_n
        out = []
        for k in range(state.beta.num_topics):
            rows = [
                {
                    "time_index": t,
                    "timestamp": state.beta.timestamps[t],
                    "words": state.beta.top_words(k, t, n).words,
                }
                for t in range(state.beta.num_times)
            ]
            out.append({"id": k, "label": state.cached_label(k), "top_words": rows})
        return out

    @app.post("/api/topics/{k}/label")
    def label_topic_endpoint(k: int):
        state.beta.check_topic(k)
        return {"id": k, "label": state.label(k)}

    @app.get("/api/topics/{k}/salient")
    def salient(k: int, pool: int = 500, limit: int = 10, topn: Optional[int] = None):
        state.beta.check_topic(k)
        cfg_s = SaliencyConfig(pool_size=pool, top_n_membership=topn or cfg.top_n)
        scores = rank_salient(state.beta, k, cfg_s, limit=limit)
        return {"topic": k, "scores": [s.to_dict() for s in scores]}

    @app.get("/api/topics/{k}/trend")
    def trend(k: int, words: str):
        state.beta.check_topic(k)
        series = []
        for word in [w for w in words.split(",") if w]:
            traj = state.beta.trajectory_for(k, word)
            series.append({"word": word, "values": traj.series})
        return {"topic": k, "timestamps": state.beta.timestamps, "series": series}

    @app.get("/api/metrics")
    def metrics():
        return state.quality().to_dict()

    @app.get("/api/retrieve")
    def retrieve(
        word: str,
        time: int,
        limit: Optional[int] = None,
        lam: Optional[float] = Query(None, alias="lambda"),
        candidates: Optional[int] = None,
    ):
        results = state.index.retrieve(
            word,
            time,
            k_candidates=candidates or 200,
            lam=cfg.mmr_lambda if lam is None else lam,
            m=limit or cfg.mmr_select,
        )
        return {
            "word": word,
            "time_index": time,
            "timestamp": state.corpus.timestamps[time],
            "results": [r.to_dict() for r in results],
        }

    @app.post("/api/summarize")
    def summarize_endpoint(body: SummarizeRequest):
        if not 0 <= body.time_index < state.corpus.num_times:
            raise IndexOutOfRange(f"time {body.time_index} out of range")
        docs = state.doc_texts(body.doc_ids)
        if not docs:
            raise TempoTopicsError("doc_ids must be non-empty")
        summary = llm_mod.summarize(
            docs, body.words, state.corpus.timestamps[body.time_index], state.llm_client
        )
        return {"summary": summary}

    @app.post("/api/sessions")
    def create_session(body: SessionRequest):
        docs = state.doc_texts(body.doc_ids)
        if not docs:
            raise TempoTopicsError("doc_ids must be non-empty")
        session = state.sessions.create(docs)
        return {"session_id": session.id, "num_docs": len(docs)}

    @app.post("/api/sessions/{session_id}/chat")
    def chat(session_id: str, body: ChatRequest):
        session = state.sessions.get(session_id)
        if session is None:
            return JSONResponse(
                status_code=404,
                content={"code": "unknown_session", "message": f"no session {session_id}"},
            )
        with state.sessions.lock(session_id):
            reply = llm_mod.chat_reply(session, body.message, state.llm_client)
            return {"session_id": session_id, "reply": reply, "turn": session.turns // 2}

    if cfg.prelabel:
        for k in range(state.beta.num_topics):
            state.label(k)

    if cfg.ui_dir and Path(cfg.ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=cfg.ui_dir, html=True), name="ui")

    return app


def serve(cfg: ServiceConfig, host: str = "127.0.0.1", port: int = 8080) -> None:
    """Validate artifacts, build the app, and block serving HTTP."""
    import uvicorn

    app = create_app(cfg)
    uvicorn.run(app, host=host, port=port, log_level="warning")
