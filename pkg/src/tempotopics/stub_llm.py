"""Local stand-in for an OpenAI-compatible chat-completions provider.

Runs a real HTTP server on a loopback port so client, cache, and service
tests exercise the full wire path without network access. The response is
produced by a pluggable responder callable; every received request body is
recorded for assertions.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Optional


def default_responder(body: dict) -> str:
    """Deterministic text derived from the last message, for cache tests."""
    last = body["messages"][-1]["content"]
    digest = hashlib.sha256(last.encode("utf-8")).hexdigest()[:12]
    return f"stub-reply-{digest}"


class StubLlmServer:
    """Threaded loopback chat-completions endpoint.

    Attributes:
        calls: number of completion requests served (including failures).
        requests: decoded JSON bodies in arrival order.
        fail_status: when set, respond with that HTTP status instead.
        delay_secs: artificial latency before answering, for timeout tests.
    """

    def __init__(self, responder: Optional[Callable[[dict], str]] = None, port: int = 0):
        self.responder = responder or default_responder
        self.calls = 0
        self.requests: list[dict] = []
        self.fail_status: Optional[int] = None
        self.delay_secs = 0.0
        self._lock = threading.Lock()

        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length) or b"{}")
                with stub._lock:
                    stub.calls += 1
                    stub.requests.append(body)
                if stub.delay_secs:
                    time.sleep(stub.delay_secs)
                if stub.fail_status is not None:
                    self.send_response(stub.fail_status)
                    self.end_headers()
                    self.wfile.write(b'{"error": "stub failure"}')
                    return
                text = stub.responder(body)
                payload = json.dumps(
                    {"choices": [{"message": {"role": "assistant", "content": text}}]}
                ).encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", port), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    @property
    def base_url(self) -> str:
        return f"http://127.0.0.1:{self.port}/v1"

    def start(self) -> "StubLlmServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self) -> "StubLlmServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()
