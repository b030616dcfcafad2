"""Local control plane: newline-delimited JSON over a unix socket.

Every command carries a client `request_id` echoed in its single reply.
Events are broadcast to all connected clients. Slow or broken clients are
disconnected rather than allowed to back-pressure the pipeline.
"""

from __future__ import annotations

import json
import os
import socket
import threading
from pathlib import Path

from . import personas as persona_registry
from .personas import PersonaId, UnknownPersonaError
from .pipeline import Pipeline
from .scheduler import Trigger
from .settings import SettingsError, SettingsStore

SOCKET_ENV = "QUAC_SOCKET"


def default_socket_path() -> Path:
    runtime = os.environ.get(SOCKET_ENV)
    if runtime:
        return Path(runtime)
    base = os.environ.get("XDG_RUNTIME_DIR") or "/tmp"
    return Path(base) / f"quac-{os.getuid()}.sock"


class IpcServer:
    def __init__(self, socket_path: Path, pipeline: Pipeline, settings: SettingsStore):
        self.socket_path = Path(socket_path)
        self.pipeline = pipeline
        self.settings = settings
        self._clients: list[_Client] = []
        self._clients_lock = threading.Lock()
        self._listener: socket.socket | None = None
        self._accept_thread: threading.Thread | None = None
        self._stopping = False
        settings.on_change(self._on_setting_changed)

    # -- lifecycle -------------------------------------------------------

    def start(self):
        self.socket_path.parent.mkdir(parents=True, exist_ok=True)
        if self.socket_path.exists():
            self.socket_path.unlink()
        self._listener = socket.socket(socket.AF_UNIX, socket.SOCK_STREAM)
        self._listener.bind(str(self.socket_path))
        self._listener.listen(8)
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()

    def stop(self):
        self._stopping = True
        if self._listener is not None:
            try:
                self._listener.close()
            except OSError:
                pass
        with self._clients_lock:
            clients = list(self._clients)
        for client in clients:
            client.close()
        if self.socket_path.exists():
            self.socket_path.unlink()

    def _accept_loop(self):
        while not self._stopping:
            try:
                conn, _ = self._listener.accept()
            except OSError:
                return
            client = _Client(conn, self)
            with self._clients_lock:
                self._clients.append(client)
            client.start()

    def _drop(self, client: "_Client"):
        with self._clients_lock:
            if client in self._clients:
                self._clients.remove(client)

    # -- events ------------------------------------------------------------

    def broadcast(self, event: dict):
        line = json.dumps(event, ensure_ascii=False) + "\n"
        with self._clients_lock:
            clients = list(self._clients)
        for client in clients:
            client.send_line(line)

    def _on_setting_changed(self, key: str, old, new):
        self.broadcast({"event": "SettingsChanged", "settings": self.settings.snapshot()})

    # -- command dispatch ----------------------------------------------------

    def handle(self, msg: dict) -> dict:
        request_id = msg.get("request_id")
        command = msg.get("command")
        try:
            result = self._dispatch(command, msg)
            return {"reply_to": request_id, "ok": True, "result": result}
        except (SettingsError, UnknownPersonaError, ValueError) as exc:
            return {"reply_to": request_id, "ok": False, "error": str(exc)}

    def _dispatch(self, command: str, msg: dict):
        if command == "trigger_feedback":
            override = None
            if msg.get("persona"):
                override = PersonaId.parse(msg["persona"])
            accepted = self.pipeline.submit(
                Trigger(kind="feedback", source="manual"), persona_override=override
            )
            return {"accepted": accepted}
        if command == "trigger_emoji":
            accepted = self.pipeline.submit(Trigger(kind="emoji", source="manual"))
            return {"accepted": accepted}
        if command == "cancel":
            return {"cancelled": self.pipeline.cancel_in_flight()}
        if command == "get_settings":
            return {"settings": self.settings.snapshot()}
        if command == "set_setting":
            if "key" not in msg or "value" not in msg:
                raise ValueError("set_setting needs key and value")
            self.settings.set(msg["key"], msg["value"])
            return {"settings": self.settings.snapshot()}
        if command == "list_personas":
            return {"personas": [p.as_dict() for p in persona_registry.list_personas()]}
        if command == "get_history":
            limit = int(msg.get("limit", 10))
            events = list(self.pipeline.history)[-limit:]
            return {"events": [e.as_record() for e in events]}
        raise ValueError(f"unknown command: {command!r}")


class _Client:
    def __init__(self, conn: socket.socket, server: IpcServer):
        self._conn = conn
        self._server = server
        self._write_lock = threading.Lock()
        self._closed = False

    def start(self):
        threading.Thread(target=self._read_loop, daemon=True).start()

    def send_line(self, line: str):
        try:
            with self._write_lock:
                self._conn.sendall(line.encode("utf-8"))
        except OSError:
            self.close()

    def close(self):
        if self._closed:
            return
        self._closed = True
        try:
            self._conn.close()
        except OSError:
            pass
        self._server._drop(self)

    def _read_loop(self):
        buf = b""
        while not self._closed:
            try:
                chunk = self._conn.recv(65536)
            except OSError:
                break
            if not chunk:
                break
            buf += chunk
            while b"\n" in buf:
                raw, _, buf = buf.partition(b"\n")
                if not raw.strip():
                    continue
                self._handle_line(raw)
        self.close()

    def _handle_line(self, raw: bytes):
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError as exc:
            # recoverable only if we can still name the request
            reply = {"reply_to": None, "ok": False, "error": f"malformed JSON: {exc}"}
            self.send_line(json.dumps(reply) + "\n")
            return
        if not isinstance(msg, dict):
            self.send_line(
                json.dumps({"reply_to": None, "ok": False, "error": "expected a JSON object"})
                + "\n"
            )
            return
        reply = self._server.handle(msg)
        self.send_line(json.dumps(reply, ensure_ascii=False) + "\n")


class IpcClient:
    """Line-oriented client for tests and the CLI."""

    def __init__(self, socket_path: Path, timeout: float = 10.0):
        self.sock = socket.socket(socket.AF_UNIX, socket.SOCK_STREAM)
        self.sock.settimeout(timeout)
        self.sock.connect(str(socket_path))
        self._buf = b""
        self._next_id = 0
        self._pending_events: list[dict] = []

    def close(self):
        self.sock.close()

    def send(self, command: str, **fields) -> str:
        self._next_id += 1
        request_id = f"req-{self._next_id}"
        msg = {"request_id": request_id, "command": command, **fields}
        self.sock.sendall((json.dumps(msg) + "\n").encode("utf-8"))
        return request_id

    def read_message(self) -> dict:
        while b"\n" not in self._buf:
            chunk = self.sock.recv(65536)
            if not chunk:
                raise ConnectionError("server closed connection")
            self._buf += chunk
        raw, _, self._buf = self._buf.partition(b"\n")
        return json.loads(raw)

    def request(self, command: str, **fields) -> dict:
        """Send one command and return its reply, buffering interleaved events
        for a later wait_event."""
        request_id = self.send(command, **fields)
        while True:
            msg = self.read_message()
            if msg.get("reply_to") == request_id:
                msg["_events"] = list(self._pending_events)
                return msg
            self._pending_events.append(msg)

    def wait_event(self, *names: str, predicate=None) -> dict:
        def matches(msg):
            return (
                "event" in msg
                and (not names or msg["event"] in names)
                and (predicate is None or predicate(msg))
            )

        for i, msg in enumerate(self._pending_events):
            if matches(msg):
                return self._pending_events.pop(i)
        while True:
            msg = self.read_message()
            if matches(msg):
                return msg
            self._pending_events.append(msg)
