"""In-process HTTP stub speaking the model-service wire protocol.

Used by client tests so the primary suite never needs the real service.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class StubService:
    def __init__(self, dim=8, fail_first=0, wrong_dim=False):
        self.dim = dim
        self.fail_first = fail_first  # connection-reset this many requests
        self.wrong_dim = wrong_dim
        self.embed_calls = 0
        self.sentiment_calls = 0
        self._server = None
        self._thread = None

    @property
    def url(self):
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def __enter__(self):
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def _send(self, code, payload):
                body = json.dumps(payload).encode()
                self.send_response(code)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                if self.path == "/v1/info":
                    dims = {m: {"checkpoint": "stub", "dim": stub.dim}
                            for m in ("sakil", "promcse", "sbert")}
                    self._send(200, {"models": dims, "version": "stub-1"})
                else:
                    self._send(404, {"error": "not found"})

            def do_POST(self):
                if stub.fail_first > 0:
                    stub.fail_first -= 1
                    self.connection.close()
                    return
                n = int(self.headers.get("Content-Length", 0))
                req = json.loads(self.rfile.read(n))
                if self.path == "/v1/embed":
                    stub.embed_calls += 1
                    dim = stub.dim + (1 if stub.wrong_dim else 0)
                    vectors = []
                    for s in req["sentences"]:
                        v = [0.0] * dim
                        v[hash(s) % dim] = 1.0
                        vectors.append(v)
                    self._send(200, {"dim": stub.dim, "vectors": vectors})
                elif self.path == "/v1/sentiment":
                    stub.sentiment_calls += 1
                    labels = [3 if "love" in t else 2 for t in req["texts"]]
                    self._send(200, {"labels": labels,
                                     "confidences": [0.9] * len(labels)})
                else:
                    self._send(404, {"error": "not found"})

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)
