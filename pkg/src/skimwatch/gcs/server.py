"""Network front of the GCS: protocol TCP listener + operator HTTP API.

HTTP API (default port 8081):
    GET  /api/state                     current bot snapshot
    GET  /api/events?since=N&limit=M    event log page
    POST /api/mission                   {"waypoints":[{"x","y","radius"}]}
    POST /api/command                   {"cmd":"ARM"|...}
    GET  /api/stream                    server-sent events (alert|telemetry|system)
    GET  /...                           static operator UI files, if configured

Protocol listener (default port 9000) terminates bot/fence connections.
A bearer token (WATERCARE_TOKEN) guards /api/*; the stream also accepts it
as a ?token= query parameter since EventSource cannot set headers.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import socket
import socketserver
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .. import protocol
from .core import GcsCore
from .eventlog import EventLog

log = logging.getLogger(__name__)

PLACEHOLDER_INDEX = b"""<!doctype html>
<title>skimwatch GCS</title>
<p>GCS is running. API under <code>/api/</code>; no operator UI bundle configured.</p>
"""


class _ProtocolServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


class _ProtocolHandler(socketserver.BaseRequestHandler):
    def handle(self) -> None:
        core: GcsCore = self.server.core  # type: ignore[attr-defined]
        decoder = protocol.StreamDecoder()
        sock = self.request
        send_lock = threading.Lock()

        def send(data: bytes) -> None:
            with send_lock:
                sock.sendall(data)

        attached = False
        try:
            while True:
                data = sock.recv(4096)
                if not data:
                    break
                for decoded in decoder.feed(data):
                    if decoded.sys_id == protocol.SYS_ID_BOT and not attached:
                        core.attach_bot_sender(send)
                        attached = True
                    core.ingest(decoded)
        except (ConnectionError, OSError):
            pass
        finally:
            if attached:
                core.detach_bot_sender(send)
                core.system_event({"type": "LINK_DOWN", "sys_id": protocol.SYS_ID_BOT})


def _make_http_handler(service: "GcsService"):
    core = service.core

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # route through logging, not stderr
            log.debug("http %s", fmt % args)

        def _json(self, status: int, payload: dict) -> None:
            body = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _authorized(self, query: dict) -> bool:
            token = service.token
            if not token:
                return True
            header = self.headers.get("Authorization", "")
            if header == f"Bearer {token}":
                return True
            return query.get("token", [None])[0] == token

        def do_GET(self) -> None:
            url = urlparse(self.path)
            query = parse_qs(url.query)
            if url.path.startswith("/api/"):
                if not self._authorized(query):
                    self._json(401, {"error": "unauthorized"})
                    return
                if url.path == "/api/state":
                    self._json(200, core.query_state())
                elif url.path == "/api/events":
                    try:
                        since = int(query.get("since", ["0"])[0])
                        limit = int(query.get("limit", ["1000"])[0])
                        records = core.query_events(since, limit)
                    except ValueError as exc:
                        self._json(400, {"error": str(exc)})
                        return
                    self._json(200, {"events": [r.to_dict() for r in records]})
                elif url.path == "/api/stream":
                    self._stream()
                else:
                    self._json(404, {"error": "not found"})
                return
            self._static(url.path)

        def do_POST(self) -> None:
            url = urlparse(self.path)
            if not self._authorized(parse_qs(url.query)):
                self._json(401, {"error": "unauthorized"})
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                payload = json.loads(self.rfile.read(length) or b"{}")
            except (ValueError, json.JSONDecodeError):
                self._json(400, {"error": "invalid JSON body"})
                return
            if url.path == "/api/mission":
                waypoints = payload.get("waypoints")
                if not isinstance(waypoints, list):
                    self._json(400, {"error": "waypoints must be a list"})
                    return
                ok, reason = core.submit_mission(waypoints)
            elif url.path == "/api/command":
                cmd = payload.get("cmd")
                if not isinstance(cmd, str):
                    self._json(400, {"error": "cmd must be a string"})
                    return
                ok, reason = core.submit_command(cmd)
            else:
                self._json(404, {"error": "not found"})
                return
            if ok:
                self._json(200, {"result": "accepted"})
            else:
                self._json(409, {"result": "rejected", "reason": reason})

        def _stream(self) -> None:
            sub = core.subscribe()
            try:
                self.send_response(200)
                self.send_header("Content-Type", "text/event-stream")
                self.send_header("Cache-Control", "no-cache")
                self.end_headers()
                while not service.stopping.is_set():
                    item = sub.pop(timeout=service.keepalive_s)
                    if item is None:
                        if sub.closed:
                            break
                        self.wfile.write(b": keepalive\n\n")
                    else:
                        data = json.dumps(item["event"]).encode()
                        self.wfile.write(b"event: " + item["kind"].encode()
                                         + b"\ndata: " + data + b"\n\n")
                    self.wfile.flush()
            except (ConnectionError, OSError):
                pass
            finally:
                core.unsubscribe(sub)
                self.close_connection = True

        def _static(self, path: str) -> None:
            if path in ("", "/"):
                path = "/index.html"
            ui_dir = service.ui_dir
            if ui_dir is not None:
                target = (ui_dir / path.lstrip("/")).resolve()
                if target.is_file() and ui_dir in target.parents:
                    ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
                    body = target.read_bytes()
                    self.send_response(200)
                    self.send_header("Content-Type", ctype)
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                    return
            if path == "/index.html":
                self.send_response(200)
                self.send_header("Content-Type", "text/html")
                self.send_header("Content-Length", str(len(PLACEHOLDER_INDEX)))
                self.end_headers()
                self.wfile.write(PLACEHOLDER_INDEX)
                return
            self._json(404, {"error": "not found"})

    return Handler


class GcsService:
    """Owns the core, the event log, and both listeners."""

    def __init__(self, http_port: int = 8081, proto_port: int = 9000,
                 log_path: str | None = None, token: str | None = None,
                 ui_dir: str | None = None, host: str = "127.0.0.1",
                 keepalive_s: float = 15.0):
        self.token = token
        self.ui_dir = Path(ui_dir).resolve() if ui_dir else None
        self.keepalive_s = keepalive_s
        self.stopping = threading.Event()
        self.log = EventLog(log_path)
        self.core = GcsCore(self.log)
        self._http = ThreadingHTTPServer((host, http_port), _make_http_handler(self))
        self._http.daemon_threads = True
        try:
            self._proto = _ProtocolServer((host, proto_port), _ProtocolHandler)
        except OSError:
            self._http.server_close()
            self.log.close()
            raise
        self._proto.core = self.core  # type: ignore[attr-defined]
        self._threads: list[threading.Thread] = []

    @property
    def http_port(self) -> int:
        return self._http.server_address[1]

    @property
    def proto_port(self) -> int:
        return self._proto.server_address[1]

    def start(self) -> None:
        self.core.system_event({"type": "SERVICE_START"})
        for server, name in ((self._http, "http"), (self._proto, "proto")):
            thread = threading.Thread(target=server.serve_forever,
                                      name=f"gcs-{name}", daemon=True)
            thread.start()
            self._threads.append(thread)
        log.info("GCS up: http=%d proto=%d", self.http_port, self.proto_port)

    def stop(self) -> None:
        self.stopping.set()
        for sub in list(self.core._subs.values()):
            sub.close()
        self._http.shutdown()
        self._proto.shutdown()
        self._http.server_close()
        self._proto.server_close()
        for thread in self._threads:
            thread.join(timeout=2.0)
        self.core.system_event({"type": "SERVICE_STOP"})
        self.log.close()


def connect_bot_socket(host: str, port: int, timeout: float = 5.0) -> socket.socket:
    """Dial the GCS protocol port (used by sim and fence senders)."""
    sock = socket.create_connection((host, port), timeout=timeout)
    sock.settimeout(0.05)
    return sock
