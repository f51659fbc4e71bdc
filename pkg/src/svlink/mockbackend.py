"""Deterministic HTTP stand-in for the abstractive summarization backend.

Implements the documented wire protocol: POST /summarize with
{"text", "source_lang", "target_lang", "max_tokens"} returns 200 with
{"summary": ...}. The summary is a pure function of the request so tests
can assert exact strings. POST /error always returns status 500, which
lets tests exercise the fallback policy against a live but failing
endpoint. Runs standalone via ``python -m svlink.mockbackend``.
"""
from __future__ import annotations

import argparse
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


def deterministic_summary(text: str, target_lang: str, max_tokens: int) -> str:
    words = text.split()[: max(1, max_tokens)]
    body = " ".join(words) if words else "(empty)"
    return f"({target_lang}) {body}"


class _Handler(BaseHTTPRequestHandler):
    def do_POST(self):  # noqa: N802 - http.server API
        if self.path == "/error":
            self._respond(500, {"detail": "induced failure"})
            return
        if self.path != "/summarize":
            self._respond(404, {"detail": "unknown path"})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            payload = json.loads(self.rfile.read(length).decode("utf-8"))
            text = payload["text"]
            target = payload["target_lang"]
            max_tokens = int(payload.get("max_tokens", 30))
        except (ValueError, KeyError):
            self._respond(400, {"detail": "bad request"})
            return
        self._respond(200, {"summary": deterministic_summary(text, target, max_tokens)})

    def _respond(self, status: int, body: dict):
        data = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, fmt, *args):  # silence request logging
        pass


class MockBackend:
    """Threaded server wrapper for tests: start, read .url, stop."""

    def __init__(self, port: int = 0):
        self._server = ThreadingHTTPServer(("127.0.0.1", port), _Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/summarize"

    @property
    def error_url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/error"

    def start(self) -> "MockBackend":
        self._thread.start()
        return self

    def stop(self):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)

    def __enter__(self) -> "MockBackend":
        return self.start()

    def __exit__(self, *exc):
        self.stop()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Run the mock summarization backend.")
    parser.add_argument("--port", type=int, default=8099)
    args = parser.parse_args(argv)
    server = ThreadingHTTPServer(("127.0.0.1", args.port), _Handler)
    print(f"mock backend listening on http://127.0.0.1:{args.port}/summarize")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
