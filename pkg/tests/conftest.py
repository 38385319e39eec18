"""Shared fixtures: a local static-site server and a mock encoder service."""

from __future__ import annotations

import hashlib
import json
import re
import threading
import time
from functools import partial
from http.server import BaseHTTPRequestHandler, SimpleHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"

_REDIRECT = re.compile(r"^/redirect/(\d+)$")


class _SiteHandler(SimpleHTTPRequestHandler):
    """Static files plus a few failure-injection routes."""

    def log_message(self, *args) -> None:  # keep pytest output clean
        pass

    def do_GET(self) -> None:
        self.server.request_log.append((self.path, time.monotonic()))
        if self.path == "/error500":
            self.send_error(500, "injected failure")
            return
        if self.path.startswith("/slow"):
            time.sleep(self.server.slow_delay_s)
            self._send_html("<html><body><p>slow page</p></body></html>")
            return
        m = _REDIRECT.match(self.path)
        if m:
            hops = int(m.group(1))
            if hops > 0:
                self.send_response(302)
                self.send_header("Location", f"/redirect/{hops - 1}")
                self.end_headers()
            else:
                self._send_html(
                    "<html><body><h1 class='headline'>Landed</h1>"
                    "<div class='article-body'><p>after redirects</p></div>"
                    "</body></html>"
                )
            return
        super().do_GET()

    def _send_html(self, text: str) -> None:
        payload = text.encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "text/html; charset=utf-8")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)


class SiteServer:
    """Serves a directory over localhost HTTP and records request times."""

    def __init__(self, directory: Path) -> None:
        handler = partial(_SiteHandler, directory=str(directory))
        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), handler)
        self.httpd.request_log = []
        self.httpd.slow_delay_s = 2.0
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self.thread.start()

    @property
    def base_url(self) -> str:
        host, port = self.httpd.server_address
        return f"http://{host}:{port}"

    @property
    def request_log(self) -> list[tuple[str, float]]:
        return self.httpd.request_log

    def clear_log(self) -> None:
        del self.httpd.request_log[:]

    def requested_paths(self) -> list[str]:
        return [path for path, _ in self.request_log]

    def close(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()


@pytest.fixture
def serve_directory():
    """Factory fixture: spin up a SiteServer for any directory."""
    servers: list[SiteServer] = []

    def start(directory: Path) -> SiteServer:
        server = SiteServer(directory)
        servers.append(server)
        return server

    yield start
    for server in servers:
        server.close()


@pytest.fixture
def site_server(serve_directory) -> SiteServer:
    """The bundled mockcheck fixture site."""
    return serve_directory(FIXTURES / "site")


def marker_embedding(text: str, dims: int) -> list[float]:
    """Deterministic mock embedding, linearly separable on marker words."""
    vec = np.zeros(dims)
    vec[0] = 1.0 if "alpha" in text else 0.0
    if dims > 1:
        vec[1] = 1.0 if "beta" in text else 0.0
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    for i in range(2, dims):
        vec[i] = digest[i % len(digest)] / 2550.0
    return [float(v) for v in vec]


class _EncoderHandler(BaseHTTPRequestHandler):
    def log_message(self, *args) -> None:
        pass

    def do_POST(self) -> None:
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length))
        texts = body["texts"]
        self.server.batch_sizes.append(len(texts))

        if self.server.mode == "error":
            self.send_error(503, "encoder down")
            return
        dims = self.server.dims
        if self.server.mode == "wrong_dims":
            vectors = [[0.0] * (dims + 3) for _ in texts]
            payload = {"vectors": vectors, "dims": dims + 3}
        else:
            payload = {
                "vectors": [marker_embedding(t, dims) for t in texts],
                "dims": dims,
            }
        raw = json.dumps(payload).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(raw)))
        self.end_headers()
        self.wfile.write(raw)


class EncoderServer:
    def __init__(self, dims: int = 8) -> None:
        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), _EncoderHandler)
        self.httpd.dims = dims
        self.httpd.mode = "ok"
        self.httpd.batch_sizes = []
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self.thread.start()

    @property
    def endpoint(self) -> str:
        host, port = self.httpd.server_address
        return f"http://{host}:{port}/encode"

    @property
    def dims(self) -> int:
        return self.httpd.dims

    @property
    def batch_sizes(self) -> list[int]:
        return self.httpd.batch_sizes

    def set_mode(self, mode: str) -> None:
        self.httpd.mode = mode

    def close(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()


@pytest.fixture
def encoder_server():
    server = EncoderServer()
    yield server
    server.close()


def mockcheck_profile_dict(base_url: str, rate_limit_ms: float = 0.0) -> dict:
    return {
        "site_id": "mockcheck",
        "display_name": "MockCheck",
        "seed_urls": [f"{base_url}/index.html"],
        "extraction_rules": {
            "title": "article h1.headline",
            "body": "div.article-body",
            "raw_verdict": "span.verdict",
            "raw_topic": "span.topic",
            "published_at": "div.date-line",
        },
        "rate_limit_ms": rate_limit_ms,
        "max_pages": 50,
        "date_formats": ["Published %B %d, %Y"],
    }
