"""HTTP JSON API for the annotation store.

Endpoints:
    GET  /api/tasks/next?annotator=ID
    POST /api/tasks/{instance_id}/label?annotator=ID   {label, vision_related}
    GET  /api/threads/{thread_id}
    GET  /api/progress
    GET  /api/agreement
    GET  /img/<path>            static image serving
    GET  /...                   static UI assets when a ui_dir is configured
"""

from __future__ import annotations

import json
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional
from urllib.parse import parse_qs, unquote, urlparse

from stancebench.annotation.store import AnnotationStore
from stancebench.corpus.io import thread_to_dict
from stancebench.corpus.models import ConversationThread
from stancebench.errors import AlreadyLabeled, LeaseInvalid, StancebenchError
from stancebench.labels import StanceLabel


class AnnotationService:
    def __init__(
        self,
        store: AnnotationStore,
        threads: Optional[dict[str, ConversationThread]] = None,
        images_dir: str | Path | None = None,
        ui_dir: str | Path | None = None,
    ):
        self.store = store
        self.threads = threads or {}
        self.images_dir = Path(images_dir) if images_dir else None
        self.ui_dir = Path(ui_dir) if ui_dir else None


class _Handler(BaseHTTPRequestHandler):
    service: AnnotationService  # set on the server class

    # quiet by default; the CLI decides what to print
    def log_message(self, fmt, *args):
        pass

    def _send_json(self, payload: dict, status: int = 200) -> None:
        body = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_error_json(self, exc: StancebenchError, status: int) -> None:
        self._send_json({"error": exc.name, "detail": str(exc)}, status=status)

    def _send_file(self, path: Path) -> None:
        if not path.is_file():
            self._send_json({"error": "NotFound", "detail": str(path.name)}, status=404)
            return
        ctype = mimetypes.guess_type(str(path))[0] or "application/octet-stream"
        data = path.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _safe_join(self, root: Path, rel: str) -> Optional[Path]:
        candidate = (root / rel.lstrip("/")).resolve()
        if not str(candidate).startswith(str(root.resolve())):
            return None
        return candidate

    def do_GET(self) -> None:  # noqa: N802 (stdlib naming)
        svc = self.service
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]

        if url.path == "/api/tasks/next":
            annotator = parse_qs(url.query).get("annotator", [""])[0]
            if not annotator:
                self._send_json({"error": "BadRequest", "detail": "annotator required"}, 400)
                return
            task = svc.store.next_task(annotator)
            self._send_json({"task": task.to_dict() if task else None})
            return
        if url.path == "/api/progress":
            self._send_json(svc.store.progress())
            return
        if url.path == "/api/agreement":
            self._send_json(svc.store.agreement().to_dict())
            return
        if len(parts) == 3 and parts[:2] == ["api", "threads"]:
            thread_id = unquote(parts[2])
            thread = svc.threads.get(thread_id)
            if thread is None:
                self._send_json({"error": "NotFound", "detail": thread_id}, 404)
                return
            self._send_json(thread_to_dict(thread))
            return
        if parts and parts[0] == "img" and svc.images_dir is not None:
            target = self._safe_join(svc.images_dir, "/".join(parts[1:]))
            if target is None:
                self._send_json({"error": "NotFound", "detail": "bad path"}, 404)
                return
            self._send_file(target)
            return
        if svc.ui_dir is not None:
            rel = url.path if url.path != "/" else "/index.html"
            target = self._safe_join(svc.ui_dir, rel)
            if target is not None and target.is_file():
                self._send_file(target)
                return
        self._send_json({"error": "NotFound", "detail": url.path}, 404)

    def do_POST(self) -> None:  # noqa: N802
        svc = self.service
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        if len(parts) == 4 and parts[:2] == ["api", "tasks"] and parts[3] == "label":
            instance_id = unquote(parts[2])
            length = int(self.headers.get("Content-Length", "0"))
            try:
                body = json.loads(self.rfile.read(length) or b"{}")
            except json.JSONDecodeError:
                self._send_json({"error": "BadRequest", "detail": "invalid JSON body"}, 400)
                return
            annotator = parse_qs(url.query).get("annotator", [None])[0] or body.get("annotator")
            if not annotator or "label" not in body or "vision_related" not in body:
                self._send_json(
                    {"error": "BadRequest",
                     "detail": "annotator, label and vision_related required"}, 400)
                return
            try:
                label = StanceLabel.parse(str(body["label"]))
            except ValueError as exc:
                self._send_json({"error": "BadRequest", "detail": str(exc)}, 400)
                return
            try:
                record = svc.store.submit_label(
                    annotator, instance_id, label, bool(body["vision_related"])
                )
            except (LeaseInvalid, AlreadyLabeled) as exc:
                self._send_error_json(exc, status=409)
                return
            self._send_json({"stored": record.to_dict()})
            return
        self._send_json({"error": "NotFound", "detail": url.path}, 404)


def serve_annotation(
    service: AnnotationService,
    port: int = 8571,
    host: str = "127.0.0.1",
) -> ThreadingHTTPServer:
    """Create the HTTP server (caller runs serve_forever, possibly in a thread)."""
    handler = type("BoundHandler", (_Handler,), {"service": service})
    server = ThreadingHTTPServer((host, port), handler)
    return server


def serve_in_background(service: AnnotationService, port: int = 0, host: str = "127.0.0.1"):
    """Start the service on a daemon thread; returns (server, actual_port)."""
    server = serve_annotation(service, port=port, host=host)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, server.server_address[1]
