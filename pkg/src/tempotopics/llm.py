"""Provider-agnostic LLM bridge for labeling, summarization, and grounded chat.

Speaks the OpenAI-compatible chat-completions wire shape against any base
URL. Single-turn calls (labeling, summarization) are cached on disk under a
SHA-256 key of the canonical request, so repeated requests never hit the
provider twice; chat turns replay the full history and are never cached.
Every outbound request pins temperature to 0.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import httpx

from .artifacts import BetaTensor
from .errors import ContextOverflow, EmptyResponse, ProviderError

REFUSAL_SENTINEL = "The information is not available in the documents provided."

LABEL_PROMPT_TEMPLATE = (
    "You are an expert in topic modeling and temporal data analysis. "
    "Given the top words for a topic across multiple time points, your task is "
    "to return a short, specific, descriptive topic label. Avoid vague, "
    "generic, or overly broad labels. Focus on consistent themes in the top "
    "words over time. Use concise noun phrases, 2-5 words max. Do not include "
    "any explanation, justification, or extra output.\n"
    "\n"
    "Top words over time:\n"
    "{trajectory}\n"
    "\n"
    "Return ONLY the label (no quotes, no extra text):"
)

SUMMARY_PROMPT_TEMPLATE = (
    "Given the following documents from {timestamp} that mention the words: "
    "{word_list}, identify the key themes or discussion points from that "
    "time. Be concise. Each bullet should capture a distinct theme in 1-2 "
    "short sentences. Avoid any elaboration, examples, or justification.\n"
    "\n"
    "Return no more than 5-7 bullets.\n"
    "\n"
    "{context_texts}\n"
    "\n"
    "Summary:"
)

CHAT_SYSTEM_TEMPLATE = (
    "You are an assistant answering questions strictly based on the provided "
    "sample documents below.\n"
    "\n"
    'If the answer is not clearly supported by the text, respond with: '
    f'"{REFUSAL_SENTINEL}"\n'
    "\n"
    "Documents:\n"
    "{context_texts}"
)

DEFAULT_CONTEXT_BUDGET = 24_000
DEFAULT_PER_DOC_CAP = 4_000


@dataclass(frozen=True)
class LlmRequest:
    """One single-turn completion request; the unit the cache is keyed on."""

    base_url: str
    model: str
    user: str
    system: Optional[str] = None
    max_tokens: int = 512
    temperature: float = 0.0


@dataclass(frozen=True)
class KeywordTrajectory:
    """Per-time top words of one topic, ordered by time index."""

    topic: int
    rows: tuple[tuple[str, tuple[str, ...]], ...]

    def render(self) -> str:
        return "\n".join(f"{label}: {', '.join(words)}" for label, words in self.rows)


def keyword_trajectory(beta: BetaTensor, k: int, n: int = 10) -> KeywordTrajectory:
    rows = tuple(
        (beta.timestamps[t], tuple(beta.top_words(k, t, n).words))
        for t in range(beta.num_times)
    )
    return KeywordTrajectory(topic=k, rows=rows)


def cache_key(req: LlmRequest) -> str:
    """SHA-256 hex digest of the canonical request serialization.

    Fields are serialized in a fixed order with 4-byte length prefixes (and a
    presence flag for the optional system text), so the digest is stable
    across runs and platforms.
    """
    h = hashlib.sha256()
    for part in (req.base_url, req.model):
        data = part.encode("utf-8")
        h.update(len(data).to_bytes(4, "big"))
        h.update(data)
    if req.system is None:
        h.update(b"\x00")
    else:
        data = req.system.encode("utf-8")
        h.update(b"\x01")
        h.update(len(data).to_bytes(4, "big"))
        h.update(data)
    data = req.user.encode("utf-8")
    h.update(len(data).to_bytes(4, "big"))
    h.update(data)
    data = str(req.max_tokens).encode("ascii")
    h.update(len(data).to_bytes(4, "big"))
    h.update(data)
    return h.hexdigest()


def render_context(
    docs: Sequence[str],
    budget: int = DEFAULT_CONTEXT_BUDGET,
    per_doc_cap: int = DEFAULT_PER_DOC_CAP,
) -> str:
    """Number and concatenate documents within the character budget.

    Individual documents are cut tail-first at ``per_doc_cap`` with a note;
    once the budget is reached the remaining documents are dropped with a
    count. A first document that alone exceeds the budget is an error.
    """
    if not docs:
        raise ValueError("at least one context document required")
    parts: list[str] = []
    used = 0
    for i, text in enumerate(docs, 1):
        body = text if len(text) <= per_doc_cap else text[:per_doc_cap] + " [truncated]"
        block = f"Document {i}:\n{body}"
        extra = len(block) + (2 if parts else 0)
        if used + extra > budget:
            if not parts:
                raise ContextOverflow(
                    f"document 1 ({len(block)} chars) exceeds the context budget ({budget})"
                )
            parts.append(f"[{len(docs) - i + 1} additional documents omitted]")
            break
        parts.append(block)
        used += extra
    return "\n\n".join(parts)


def build_label_prompt(
    traj: KeywordTrajectory, base_url: str, model: str, max_tokens: int = 64
) -> LlmRequest:
    if not traj.rows:
        raise ValueError("trajectory must have at least one row")
    user = LABEL_PROMPT_TEMPLATE.format(trajectory=traj.render())
    return LlmRequest(base_url=base_url, model=model, user=user, max_tokens=max_tokens)


def build_summary_prompt(
    context_docs: Sequence[str],
    word_list: Sequence[str],
    timestamp: str,
    base_url: str,
    model: str,
    max_tokens: int = 512,
    budget: int = DEFAULT_CONTEXT_BUDGET,
    per_doc_cap: int = DEFAULT_PER_DOC_CAP,
) -> LlmRequest:
    user = SUMMARY_PROMPT_TEMPLATE.format(
        timestamp=timestamp,
        word_list=", ".join(word_list),
        context_texts=render_context(context_docs, budget=budget, per_doc_cap=per_doc_cap),
    )
    return LlmRequest(base_url=base_url, model=model, user=user, max_tokens=max_tokens)


def build_chat_system(
    context_docs: Sequence[str],
    budget: int = DEFAULT_CONTEXT_BUDGET,
    per_doc_cap: int = DEFAULT_PER_DOC_CAP,
) -> str:
    return CHAT_SYSTEM_TEMPLATE.format(
        context_texts=render_context(context_docs, budget=budget, per_doc_cap=per_doc_cap)
    )


class LlmCache:
    """Disk cache, one file per entry under ``<root>/<first2>/<digest>``.

    Each file starts with a one-line JSON metadata header followed by the raw
    response text. Writes go through a temp file and an atomic rename.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / key

    def get(self, key: str) -> Optional[str]:
        path = self._path(key)
        if not path.exists():
            return None
        blob = path.read_text(encoding="utf-8")
        newline = blob.index("\n")
        return blob[newline + 1 :]

    def put(self, key: str, value: str, meta: Optional[dict] = None) -> None:
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        header = {"created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())}
        if meta:
            header.update(meta)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(json.dumps(header) + "\n" + value, encoding="utf-8")
        tmp.replace(path)

    def __contains__(self, key: str) -> bool:
        return self._path(key).exists()


@dataclass
class LlmConfig:
    base_url: str = "http://localhost:8000/v1"
    api_key: str = ""
    model: str = "stub-model"
    timeout_secs: float = 60.0
    max_tokens: int = 512
    label_max_tokens: int = 64
    context_budget: int = DEFAULT_CONTEXT_BUDGET
    per_doc_cap: int = DEFAULT_PER_DOC_CAP

    @classmethod
    def from_env(cls, **overrides) -> "LlmConfig":
        cfg = cls()
        cfg.base_url = os.environ.get("LLM_API_BASE", cfg.base_url)
        cfg.api_key = os.environ.get("LLM_API_KEY", cfg.api_key)
        cfg.model = os.environ.get("LLM_MODEL", cfg.model)
        if "LLM_TIMEOUT_SECS" in os.environ:
            cfg.timeout_secs = float(os.environ["LLM_TIMEOUT_SECS"])
        for name, value in overrides.items():
            if value is not None:
                setattr(cfg, name, value)
        return cfg


class LlmClient:
    """Minimal chat-completions client with single-flight cached calls."""

    def __init__(self, config: LlmConfig, cache: Optional[LlmCache] = None):
        self.config = config
        self.cache = cache
        self._http = httpx.Client(timeout=config.timeout_secs)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self.provider_calls = 0

    def close(self) -> None:
        self._http.close()

    def _lock_for(self, key: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(key, threading.Lock())

    def _post(self, messages: list[dict], max_tokens: int) -> str:
        url = self.config.base_url.rstrip("/") + "/chat/completions"
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        body = {
            "model": self.config.model,
            "messages": messages,
            "temperature": 0,
            "max_tokens": max_tokens,
        }
        try:
            response = self._http.post(url, json=body, headers=headers)
        except httpx.TimeoutException as exc:
            raise ProviderError(f"provider timed out: {exc}", timeout=True) from exc
        except httpx.HTTPError as exc:
            raise ProviderError(f"provider unreachable: {exc}") from exc
        if response.status_code != 200:
            raise ProviderError(
                f"provider returned HTTP {response.status_code}: {response.text[:200]}",
                status=response.status_code,
            )
        self.provider_calls += 1
        try:
            content = response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise ProviderError(f"malformed provider response: {exc}") from exc
        if content is None or not str(content).strip():
            raise EmptyResponse("provider returned an empty completion")
        return str(content)

    def complete(self, req: LlmRequest, transform: Optional[Callable[[str], str]] = None) -> str:
        """Single-turn completion via the cache; at most one in-flight call per key."""
        key = cache_key(req)
        if self.cache is None:
            text = self._request_once(req)
            return transform(text) if transform else text
        with self._lock_for(key):
            hit = self.cache.get(key)
            if hit is not None:
                return hit
            text = self._request_once(req)
            if transform:
                text = transform(text)
            self.cache.put(key, text, meta={"model": req.model})
            return text

    def _request_once(self, req: LlmRequest) -> str:
        messages = []
        if req.system is not None:
            messages.append({"role": "system", "content": req.system})
        messages.append({"role": "user", "content": req.user})
        return self._post(messages, req.max_tokens)

    def chat(self, messages: list[dict], max_tokens: Optional[int] = None) -> str:
        """Multi-turn completion; never cached (history makes each turn unique)."""
        return self._post(messages, max_tokens or self.config.max_tokens)


def _first_line(text: str) -> str:
    for line in text.splitlines():
        line = line.strip()
        if line:
            return line
    raise EmptyResponse("provider returned no usable label line")


def label_topic(traj: KeywordTrajectory, client: LlmClient) -> str:
    """Concise topic label for a keyword trajectory; cached across runs."""
    req = build_label_prompt(
        traj,
        base_url=client.config.base_url,
        model=client.config.model,
        max_tokens=client.config.label_max_tokens,
    )
    return client.complete(req, transform=_first_line)


def summarize(
    context_docs: Sequence[str],
    word_list: Sequence[str],
    timestamp: str,
    client: LlmClient,
) -> str:
    """Bullet summary of the retrieved documents for one word-time query."""
    req = build_summary_prompt(
        context_docs,
        word_list,
        timestamp,
        base_url=client.config.base_url,
        model=client.config.model,
        max_tokens=client.config.max_tokens,
        budget=client.config.context_budget,
        per_doc_cap=client.config.per_doc_cap,
    )
    return client.complete(req)


@dataclass
class GroundedSession:
    """One exploration thread: retrieved texts, optional summary, chat history."""

    id: str
    context_docs: list[str]
    summary: Optional[str] = None
    history: list[dict] = field(default_factory=list)
    created_at: float = field(default_factory=time.time)

    @property
    def turns(self) -> int:
        return len(self.history)


def chat_reply(session: GroundedSession, user_question: str, client: LlmClient) -> str:
    """Grounded reply: system prompt carries the session documents, the full
    history is replayed, and the provider text (refusal sentinel included)
    passes through verbatim."""
    if not session.context_docs:
        raise ValueError("session has no context documents")
    system = build_chat_system(
        session.context_docs,
        budget=client.config.context_budget,
        per_doc_cap=client.config.per_doc_cap,
    )
    messages = [{"role": "system", "content": system}]
    messages.extend(session.history)
    messages.append({"role": "user", "content": user_question})
    reply = client.chat(messages)
    session.history.append({"role": "user", "content": user_question})
    session.history.append({"role": "assistant", "content": reply})
    return reply
