"""Operator gateway: one WebSocket per client, JSON text frames.

Downstream every client gets telemetry snapshots and goal/path events;
upstream only the single client holding the operator role may drive. The
dead-man's handle is freshness-based: the stack re-asserts the press only
while dmh messages younger than the freshness window keep arriving, so a
silent or dead console can never hold the vehicle armed -- disconnecting
the operator releases immediately.

The message schema is documented in protocol.md; every frame carries
``v: 1``.
"""

import json
import queue
import threading
from typing import Optional

from websockets.exceptions import ConnectionClosed
from websockets.sync.server import serve

from .stack import (CancelGoal, DmhState, Goto, Ignite, Joy, ModeSwitch,
                    Stack, StackMode)

PROTOCOL_VERSION = 1
OUTBOX_LIMIT = 256


def _msg(mtype: str, **fields) -> str:
    # "ver" not "v": telemetry snapshots carry the vehicle speed as "v".
    fields["ver"] = PROTOCOL_VERSION
    fields["type"] = mtype
    return json.dumps(fields, separators=(",", ":"))


class _Session:
    def __init__(self, conn, role: str):
        self.conn = conn
        self.role = role
        self.outbox = queue.Queue(maxsize=OUTBOX_LIMIT)

    def push(self, text: str) -> None:
        try:
            self.outbox.put_nowait(text)
        except queue.Full:
            # Slow consumer: shed the oldest frame, telemetry is periodic.
            try:
                self.outbox.get_nowait()
            except queue.Empty:
                pass
            try:
                self.outbox.put_nowait(text)
            except queue.Full:
                pass


class Gateway:
    """Serves the stack over WebSocket; safe to run beside run_realtime()."""

    def __init__(self, stack: Stack, host: str = "127.0.0.1", port: int = 0):
        self.stack = stack
        self.host = host
        self.port = port
        self._server = None
        self._thread = None
        self._lock = threading.Lock()
        self._sessions = set()
        self._operator: Optional[_Session] = None
        stack.telemetry_cb = self._on_telemetry
        stack.event_cb = self._on_event

    # Broadcast hooks called from the control-tick thread -------------------

    def _on_telemetry(self, snapshot: dict) -> None:
        text = _msg("telemetry", **snapshot)
        with self._lock:
            for session in self._sessions:
                session.push(text)

    def _on_event(self, kind: str, payload: dict) -> None:
        text = _msg(kind, **payload)
        with self._lock:
            for session in self._sessions:
                session.push(text)

    # ------------------------------------------------------------------------

    def start(self) -> None:
        self._server = serve(self._handle, self.host, self.port)
        self.port = self._server.socket.getsockname()[1]
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        name="gateway", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        if self._server:
            self._server.shutdown()
            self._thread.join(timeout=2.0)
            self._server = None

    def _writer(self, session: _Session) -> None:
        while True:
            text = session.outbox.get()
            if text is None:
                return
            try:
                session.conn.send(text)
            except (ConnectionClosed, OSError):
                return

    def _drop(self, session: _Session) -> None:
        with self._lock:
            self._sessions.discard(session)
            if self._operator is session:
                self._operator = None
                # A vanished operator means the handle is no longer held.
                self.stack.submit(DmhState(False))
        session.outbox.put(None)

    def _handle(self, conn) -> None:
        try:
            hello = json.loads(conn.recv(timeout=5.0))
        except (ConnectionClosed, TimeoutError, ValueError):
            return
        wanted = hello.get("role", "observer") if isinstance(hello, dict) else "observer"

        with self._lock:
            if wanted == "operator" and self._operator is None:
                session = _Session(conn, "operator")
                self._operator = session
            else:
                session = _Session(conn, "observer")
            self._sessions.add(session)

        writer = threading.Thread(target=self._writer, args=(session,),
                                  daemon=True)
        writer.start()
        session.push(_msg("welcome", role=session.role,
                          dmh_freshness_s=self.stack.config.gateway.dmh_freshness_s))
        try:
            while True:
                try:
                    raw = conn.recv()
                except (ConnectionClosed, OSError):
                    return
                self._dispatch(session, raw)
        finally:
            self._drop(session)

    def _dispatch(self, session: _Session, raw) -> None:
        try:
            msg = json.loads(raw)
            if not isinstance(msg, dict):
                raise ValueError("frame must be an object")
            mtype = msg["type"]
        except (ValueError, KeyError, TypeError) as exc:
            session.push(_msg("err", msg=f"malformed frame: {exc}"))
            return

        if mtype == "ping":
            session.push(_msg("pong", echo=msg.get("echo")))
            return

        if session.role != "operator":
            session.push(_msg("err", msg="observer role cannot drive"))
            return

        try:
            if mtype == "dmh":
                self.stack.submit(DmhState(bool(msg["pressed"])))
            elif mtype == "joy":
                self.stack.submit(Joy(float(msg["x"]), float(msg["y"])))
            elif mtype == "ignite":
                self.stack.submit(Ignite())
            elif mtype == "mode":
                self.stack.submit(ModeSwitch(StackMode(msg["mode"])))
            elif mtype == "goto":
                self.stack.submit(Goto(
                    float(msg["x"]), float(msg["y"]), float(msg["heading"]),
                    tol_position=(float(msg["tol_position"])
                                  if msg.get("tol_position") else None),
                    tol_heading=(float(msg["tol_heading"])
                                 if msg.get("tol_heading") else None)))
            elif mtype == "cancel":
                self.stack.submit(CancelGoal())
            else:
                session.push(_msg("err", msg=f"unknown frame type {mtype!r}"))
        except (KeyError, ValueError, TypeError) as exc:
            session.push(_msg("err", msg=f"malformed {mtype} frame: {exc}"))
