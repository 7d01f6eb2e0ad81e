"""WebSocket front door for the simulation session.

One JSON document per frame. Inbound frames are client commands
(validated here, executed by the session between ticks); outbound
frames are the session's snapshot/event/ack/error messages. Every
client receives the full snapshot stream; a slow client only ever
stalls itself thanks to the session's bounded per-client sinks.
"""

from __future__ import annotations

import json
import logging
import threading
from typing import Optional

from websockets.sync.server import Server, ServerConnection, serve

from .simulation import COMMAND_TYPES, ClientSink, Command, SimulationSession

log = logging.getLogger(__name__)


def parse_command(raw: str | bytes, reply_to: Optional[ClientSink] = None) -> Command:
    """Decode and validate one inbound frame.

    Raises ValueError with a client-safe reason on malformed input.
    """
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed JSON: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ValueError("command must be a JSON object")
    cmd_type = doc.get("type")
    if cmd_type not in COMMAND_TYPES:
        raise ValueError(f"unknown command type {cmd_type!r}")
    corr_id = doc.get("id")
    if corr_id is not None and not isinstance(corr_id, str):
        raise ValueError("correlation id must be a string")
    payload = {k: v for k, v in doc.items() if k not in ("type", "id")}
    return Command(type=cmd_type, payload=payload, corr_id=corr_id, reply_to=reply_to)


def _sender_loop(connection: ServerConnection, sink: ClientSink) -> None:
    while True:
        message = sink.get(timeout=0.5)
        if sink.closed and message is None:
            return
        if message is None:
            continue
        try:
            connection.send(json.dumps(message))
        except Exception:
            return


def _client_handler(session: SimulationSession, connection: ServerConnection) -> None:
    sink = session.register_sink()
    sender = threading.Thread(target=_sender_loop, args=(connection, sink), daemon=True)
    sender.start()
    try:
        for raw in connection:
            try:
                command = parse_command(raw, reply_to=sink)
            except ValueError as exc:
                sink.put({"type": "error", "id": _best_effort_id(raw), "reason": str(exc)})
                continue
            session.submit(command)
    except Exception:
        log.debug("client connection ended", exc_info=True)
    finally:
        session.unregister_sink(sink)
        sender.join(timeout=2.0)


def _best_effort_id(raw: str | bytes) -> Optional[str]:
    try:
        doc = json.loads(raw)
        corr = doc.get("id") if isinstance(doc, dict) else None
        return corr if isinstance(corr, str) else None
    except Exception:
        return None


class ControlServer:
    """Threaded WebSocket server bound to one simulation session."""

    def __init__(self, session: SimulationSession, host: str = "127.0.0.1", port: int = 0):
        self.session = session
        self._server: Server = serve(lambda conn: _client_handler(session, conn), host, port)
        self.host = host
        self.port = self._server.socket.getsockname()[1]
        self._thread = threading.Thread(target=self._server.serve_forever, name="control-server", daemon=True)

    def start(self) -> "ControlServer":
        self._thread.start()
        log.info("control server listening on ws://%s:%d", self.host, self.port)
        return self

    def close(self) -> None:
        self._server.shutdown()
        self._thread.join(timeout=5.0)


def serve_session(session: SimulationSession, bind: str) -> ControlServer:
    """Start serving a session on "host:port" (port 0 picks a free port)."""
    host, _, port_text = bind.rpartition(":")
    if not host:
        raise ValueError(f"bind address must be host:port, got {bind!r}")
    return ControlServer(session, host=host, port=int(port_text)).start()
