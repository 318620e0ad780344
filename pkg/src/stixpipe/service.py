"""JSON-over-HTTP API for extraction, review, and KB browsing.

Runs on the standard library's threading HTTP server: extraction requests
are handled synchronously against the latest KB snapshot, KB writes
serialize through the single KnowledgeBase writer, and every response body
is JSON (errors as {"error", "detail"}). Static files from ``ui_dir`` are
served under / for the bundled review UI.
"""

from __future__ import annotations

import json
import mimetypes
import threading
import urllib.parse
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .kb import AlreadyDecided, KnowledgeBase, UnknownCandidate
from .normalize import DecodeError, DocFormat, RawDocument
from .pipeline import ExtractionResult, PipelineConfig, run, to_stix_bundle, validate_bundle

DEFAULT_MAX_BODY = 1_000_000


@dataclass
class StoredReport:
    report_id: str
    content: bytes
    format: DocFormat
    status: str = "queued"  # queued | done | failed
    result: ExtractionResult | None = None
    error: str = ""


@dataclass
class ServiceState:
    kb: KnowledgeBase
    config: PipelineConfig = field(default_factory=PipelineConfig)
    max_body: int = DEFAULT_MAX_BODY
    ui_dir: Path | None = None
    reports: dict[str, StoredReport] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)
    _counter: int = 0

    def next_id(self) -> str:
        with self.lock:
            self._counter += 1
            return f"r{self._counter:06d}"

    def submit(self, content: bytes, fmt: DocFormat,
               overrides: dict | None = None) -> StoredReport:
        report = StoredReport(self.next_id(), content, fmt)
        with self.lock:
            self.reports[report.report_id] = report
        config = self.config
        if overrides:
            config = PipelineConfig.from_dict(overrides)
        snap = self.kb.snapshot()
        try:
            result = run(RawDocument(report.report_id, content, fmt), snap, config)
        except Exception as exc:
            report.status = "failed"
            report.error = str(exc)
            return report
        for cand in result.candidates:
            self.kb.add_candidate(cand)
        report.result = result
        report.status = "done"
        return report


class _Handler(BaseHTTPRequestHandler):
    state: ServiceState  # set by make_server

    # -- helpers -------------------------------------------------------

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, code: int, payload: dict | list, headers: dict | None = None):
        body = json.dumps(payload).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        for k, v in (headers or {}).items():
            self.send_header(k, v)
        self.end_headers()
        self.wfile.write(body)

    def _error(self, code: int, error: str, detail: str = ""):
        self._send(code, {"error": error, "detail": detail})

    def _read_body(self) -> bytes | None:
        length = int(self.headers.get("Content-Length") or 0)
        if length > self.state.max_body:
            self._error(413, "payload too large",
                        f"limit is {self.state.max_body} bytes")
            return None
        return self.rfile.read(length)

    # -- routing -------------------------------------------------------

    def do_POST(self):
        path = urllib.parse.urlparse(self.path).path
        if path == "/reports":
            return self._post_report()
        parts = path.strip("/").split("/")
        if len(parts) == 3 and parts[0] == "candidates" and parts[2] == "decision":
            return self._post_decision(parts[1])
        self._error(404, "not found", path)

    def do_GET(self):
        parsed = urllib.parse.urlparse(self.path)
        path = parsed.path
        query = urllib.parse.parse_qs(parsed.query)
        parts = path.strip("/").split("/")
        if len(parts) == 3 and parts[0] == "reports" and parts[2] == "extraction":
            return self._get_extraction(parts[1], query)
        if path == "/candidates":
            return self._get_candidates(query)
        if path == "/kb/entities":
            return self._get_kb_entities(query)
        return self._get_static(path)

    # -- endpoints -----------------------------------------------------

    def _post_report(self):
        body = self._read_body()
        if body is None:
            return
        ctype = (self.headers.get("Content-Type") or "text/plain").split(";")[0].strip()
        overrides = None
        if ctype == "application/json":
            try:
                payload = json.loads(body.decode("utf-8"))
            except (json.JSONDecodeError, UnicodeDecodeError) as exc:
                return self._error(400, "bad request", f"invalid JSON body: {exc}")
            content = payload.get("content", "")
            if isinstance(content, str):
                content = content.encode("utf-8")
            fmt = DocFormat.HTML if payload.get("format") == "html" else DocFormat.PLAIN_TEXT
            overrides = payload.get("config")
        else:
            content = body
            fmt = DocFormat.HTML if ctype == "text/html" else DocFormat.PLAIN_TEXT
        if not content.strip():
            return self._error(400, "bad request", "empty report body")
        try:
            report = self.state.submit(content, fmt, overrides)
        except (ValueError, DecodeError) as exc:
            return self._error(400, "bad request", str(exc))
        self._send(202, {"report_id": report.report_id, "status": report.status})

    def _get_extraction(self, report_id: str, query: dict):
        report = self.state.reports.get(report_id)
        if report is None:
            return self._error(404, "unknown report", report_id)
        if report.status == "queued":
            return self._error(409, "not ready", "report is still queued")
        if report.status == "failed":
            return self._error(500, "extraction failed", report.error)
        if query.get("format", [""])[0] == "stix":
            bundle = to_stix_bundle(report.result, snap=self.state.kb.snapshot())
            return self._send(200, bundle)
        self._send(200, report.result.to_dict())

    def _get_candidates(self, query: dict):
        status = query.get("status", ["pending"])[0] or None
        cands = self.state.kb.candidates(status=status)
        self._send(200, {"candidates": [
            {"id": c.id, "surface": c.surface, "proposed_type": c.proposed_type,
             "report_id": c.report_id, "span": list(c.span), "trigger": c.trigger,
             "status": c.status, "context": self._context(c)}
            for c in cands
        ]})

    def _context(self, cand) -> str:
        report = self.state.reports.get(cand.report_id)
        if report is None or report.result is None:
            return ""
        text = report.content.decode("utf-8", errors="replace")
        lo = max(0, cand.span[0] - 60)
        hi = min(len(text), cand.span[1] + 60)
        return text[lo:hi]

    def _post_decision(self, candidate_id: str):
        body = self._read_body()
        if body is None:
            return
        try:
            payload = json.loads(body.decode("utf-8")) if body.strip() else {}
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            return self._error(400, "bad request", f"invalid JSON body: {exc}")
        decision = payload.get("decision")
        if decision not in ("accept", "reject"):
            return self._error(400, "bad request", "decision must be accept or reject")
        try:
            entity = self.state.kb.review_candidate(candidate_id, decision,
                                                    editor_type=payload.get("type"))
        except UnknownCandidate:
            return self._error(404, "unknown candidate", candidate_id)
        except AlreadyDecided as exc:
            return self._error(409, "already decided", str(exc))
        except ValueError as exc:
            return self._error(400, "bad request", str(exc))
        self._send(200, {
            "candidate_id": candidate_id,
            "decision": decision,
            "entity": None if entity is None else {
                "id": entity.id, "stix_type": entity.stix_type, "name": entity.name,
            },
        })

    def _get_kb_entities(self, query: dict):
        type_filter = query.get("type", [""])[0]
        q = query.get("q", [""])[0].lower()
        try:
            page = max(1, int(query.get("page", ["1"])[0]))
            page_size = max(1, min(500, int(query.get("page_size", ["50"])[0])))
        except ValueError:
            return self._error(400, "bad request", "page and page_size must be integers")
        entities = self.state.kb.entities()
        if type_filter:
            entities = [e for e in entities if e.stix_type == type_filter]
        if q:
            entities = [e for e in entities
                        if q in e.name.lower() or any(q in a.lower() for a in e.aliases)]
        total = len(entities)
        lo = (page - 1) * page_size
        page_items = entities[lo:lo + page_size]
        self._send(200, {
            "total": total, "page": page, "page_size": page_size,
            "entities": [
                {"id": e.id, "stix_type": e.stix_type, "name": e.name,
                 "aliases": list(e.aliases), "source": e.source}
                for e in page_items
            ],
        })

    def _get_static(self, path: str):
        ui = self.state.ui_dir
        if ui is None:
            if path == "/":
                return self._send(200, {"service": "stixpipe", "ui": "not bundled"})
            return self._error(404, "not found", path)
        rel = path.lstrip("/") or "index.html"
        target = (ui / rel).resolve()
        if not str(target).startswith(str(ui.resolve())) or not target.is_file():
            target = ui / "index.html"
            if not target.is_file():
                return self._error(404, "not found", path)
        data = target.read_bytes()
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


def make_server(kb: KnowledgeBase, config: PipelineConfig | None = None,
                bind: str = "127.0.0.1", port: int = 8675,
                ui_dir: str | None = None,
                max_body: int = DEFAULT_MAX_BODY) -> ThreadingHTTPServer:
    state = ServiceState(kb=kb, config=config or PipelineConfig(),
                         max_body=max_body,
                         ui_dir=Path(ui_dir) if ui_dir else None)
    handler = type("BoundHandler", (_Handler,), {"state": state})
    server = ThreadingHTTPServer((bind, port), handler)
    server.state = state
    return server
