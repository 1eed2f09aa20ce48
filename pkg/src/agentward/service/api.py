"""Loopback HTTP surface over the supervisor.

Exposes pending tickets, ticket resolution, the emergency stop, a
long-polled audit stream, and quarantine management under ``/v1``, plus
the static operator console under ``/ui/``. Requests and responses are
JSON; when a token is configured every ``/v1`` route requires it as a
bearer credential. Errors share one shape:
``{"error": {"code": ..., "message": ...}}``.
"""

from __future__ import annotations

import hmac
import json
import logging
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

from ..errors import (
    IndexOutOfRangeError,
    StoreUnavailableError,
    TicketNotPendingError,
    UnknownTicketError,
)
from .supervisor import Supervisor

log = logging.getLogger(__name__)

API_VERSION = "v1"

# Long polls hold a handler thread each; cap how long one may park.
MAX_POLL_WAIT = 30.0


class _Server(ThreadingHTTPServer):
    daemon_threads = True
    allow_reuse_address = True
    control: "ControlApiServer"


class ControlApiServer:
    """Owns the listening socket and its serving thread."""

    def __init__(
        self,
        supervisor: Supervisor,
        *,
        host: str = "127.0.0.1",
        port: int | None = None,
        token: str | None = None,
        ui_root: str | Path | None = None,
    ) -> None:
        self.supervisor = supervisor
        self.token = supervisor.config.api_token if token is None else token
        self.ui_root = Path(ui_root).resolve() if ui_root else None
        bind_port = supervisor.config.api_port if port is None else port
        self._httpd = _Server((host, bind_port), _Handler)
        self._httpd.control = self
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        host, port = self._httpd.server_address[:2]
        return str(host), int(port)

    def url(self, path: str = "/") -> str:
        host, port = self.address
        return f"http://{host}:{port}{path}"

    def start(self) -> tuple[str, int]:
        self._thread = threading.Thread(
            target=lambda: self._httpd.serve_forever(poll_interval=0.05),
            name="agentward-api",
            daemon=True,
        )
        self._thread.start()
        return self.address

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5.0)
            self._thread = None

    def __enter__(self) -> "ControlApiServer":
        self.start()
        return self

    def __exit__(self, *exc_info) -> None:
        self.stop()


def _int_param(query: dict, key: str, default: int) -> int:
    raw = query.get(key, [None])[0]
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"query parameter {key!r} must be an integer") from None


def _float_param(query: dict, key: str, default: float) -> float:
    raw = query.get(key, [None])[0]
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"query parameter {key!r} must be a number") from None


class _Handler(BaseHTTPRequestHandler):
    server_version = "agentward"
    protocol_version = "HTTP/1.1"
    server: _Server

    # -- plumbing ---------------------------------------------------------

    def log_message(self, fmt: str, *args) -> None:
        log.debug("%s %s", self.address_string(), fmt % args)

    @property
    def control(self) -> ControlApiServer:
        return self.server.control

    def _send(self, status: int, data: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _json(self, status: int, payload: dict) -> None:
        self._send(status, json.dumps(payload).encode("utf-8"), "application/json")

    def _error(self, status: int, code: str, message: str) -> None:
        self._json(status, {"error": {"code": code, "message": message}})

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length > 0 else b""
        if not raw:
            return {}
        try:
            body = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ValueError(f"request body is not valid JSON: {exc}") from None
        if not isinstance(body, dict):
            raise ValueError("request body must be a JSON object")
        return body

    def _authorized(self) -> bool:
        token = self.control.token
        if not token:
            return True
        supplied = self.headers.get("Authorization", "")
        return hmac.compare_digest(supplied, f"Bearer {token}")

    # -- dispatch ---------------------------------------------------------

    def do_GET(self) -> None:
        self._dispatch("GET")

    def do_POST(self) -> None:
        self._dispatch("POST")

    def _dispatch(self, method: str) -> None:
        try:
            self._route(method)
        except UnknownTicketError as exc:
            self._error(404, "unknown_ticket", str(exc))
        except TicketNotPendingError as exc:
            self._error(409, "ticket_not_pending", str(exc))
        except IndexOutOfRangeError as exc:
            self._error(416, "index_out_of_range", str(exc))
        except StoreUnavailableError as exc:
            self._error(409, "quarantine_state", str(exc))
        except ValueError as exc:
            self._error(400, "bad_request", str(exc))
        except BrokenPipeError:
            pass  # client went away mid-response
        except Exception:  # noqa: BLE001 - last-resort boundary
            log.exception("unhandled control api error")
            self._error(500, "internal", "unhandled server error")

    def _route(self, method: str) -> None:
        parsed = urlsplit(self.path)
        segments = [s for s in parsed.path.split("/") if s]
        query = parse_qs(parsed.query)

        # The console and its assets are static and unauthenticated; every
        # /v1 route below the auth check needs the bearer token.
        if not segments:
            if method != "GET":
                return self._error(405, "method_not_allowed", "use GET")
            self.send_response(302)
            self.send_header("Location", "/ui/")
            self.send_header("Content-Length", "0")
            self.end_headers()
            return None
        if segments[0] == "ui":
            if method != "GET":
                return self._error(405, "method_not_allowed", "use GET")
            return self._serve_ui(segments[1:])
        if segments[0] != API_VERSION:
            return self._error(404, "not_found", f"no route for {parsed.path}")
        if not self._authorized():
            return self._error(401, "unauthorized", "missing or invalid bearer token")

        supervisor = self.control.supervisor
        rest = segments[1:]

        if method == "GET" and rest == ["health"]:
            return self._json(200, {"ok": True, "version": API_VERSION})
        if method == "GET" and rest == ["tickets"]:
            tickets = [t.to_dict() for t in supervisor.list_pending()]
            return self._json(200, {"tickets": tickets})
        if method == "POST" and len(rest) == 3 and rest[0] == "tickets" and rest[2] == "resolve":
            body = self._body()
            ack = supervisor.resolve(
                rest[1],
                str(body.get("decision", "")),
                note=str(body.get("note", "")),
            )
            return self._json(200, ack)
        if method == "POST" and rest == ["stop"]:
            body = self._body()
            scope = str(body.get("scope", "")) or "all"
            halted = supervisor.emergency_stop(scope)
            return self._json(200, {"halted": list(halted)})
        if method == "GET" and rest == ["audit"]:
            since = _int_param(query, "since", 0)
            timeout = _float_param(query, "timeout", 0.0)
            timeout = min(max(timeout, 0.0), MAX_POLL_WAIT)
            events, next_since = supervisor.stream_audit(since, timeout=timeout)
            return self._json(
                200,
                {"events": [e.to_dict() for e in events], "next": next_since},
            )
        if method == "GET" and rest == ["quarantine"]:
            entries = [e.to_dict() for e in supervisor.quarantine_entries()]
            return self._json(200, {"entries": entries})
        if method == "POST" and len(rest) == 3 and rest[0] == "quarantine" and rest[2] == "release":
            entry = supervisor.release_quarantine(rest[1])
            return self._json(200, {"entry": entry.to_dict()})
        return self._error(404, "not_found", f"no route for {method} {parsed.path}")

    # -- static console ---------------------------------------------------

    def _serve_ui(self, rel_segments: list[str]) -> None:
        root = self.control.ui_root
        if root is None or not root.is_dir():
            return self._error(
                404,
                "no_console",
                "console assets are not built; the API is fully usable without them",
            )
        rel = "/".join(rel_segments) or "index.html"
        target = (root / rel).resolve()
        if root != target and root not in target.parents:
            return self._error(404, "not_found", "no such asset")
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            return self._error(404, "not_found", "no such asset")
        content_type = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        self._send(200, target.read_bytes(), content_type)
