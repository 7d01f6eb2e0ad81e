"""Path-loss export to an external RF emulator over newline-delimited TCP.

Two layers:

* BridgeSession - a blocking, line-oriented client: connect with
  exponential backoff, send one rendered command per value, read one
  response line. Scripted clients and tests use it directly.
* RfBridge - the non-blocking wrapper the simulation uses: a single-slot
  mailbox drained by a worker thread. The simulation thread only ever
  swaps the slot, so bridge latency (slow endpoint, reconnects) can
  never stall the tick loop; intermediate values are coalesced and the
  latest value always wins.

The mock endpoint used in tests lives here too, so protocol behavior
and fault injection are exercised against a real socket.
"""

from __future__ import annotations

import math
import socket
import threading
import time
from typing import Callable, Optional

from .config import BridgeConfig

BACKOFF_CAP_S = 30.0
CONNECT_RETRY_BUDGET = 8  # consecutive failed connects before giving up
RESPONSE_TIMEOUT_S = 10.0

EventCallback = Callable[[str, object], None]


class BridgeUnavailableError(ConnectionError):
    """Endpoint unreachable after the whole retry budget."""


class BridgeSendError(ConnectionError):
    """Send or response read failed; the session is dead."""


def render_command(template: str, idx: int, value: float) -> str:
    """Fill the command template; the dB value is fixed to one decimal."""
    if not math.isfinite(value):
        raise ValueError(f"non-finite path loss value: {value!r}")
    return template.format(idx=idx, val=f"{value:.1f}")


class BridgeSession:
    """One live TCP connection to the emulator's control channel."""

    def __init__(self, cfg: BridgeConfig, sock: socket.socket):
        self.cfg = cfg
        self._sock = sock
        self._rfile = sock.makefile("r", encoding="utf-8", newline="\n")
        self._lock = threading.Lock()
        self._last_send = -math.inf
        self.sent_count = 0
        self.alive = True

    @classmethod
    def connect(cls, cfg: BridgeConfig, on_event: Optional[EventCallback] = None,
                stop_event: Optional[threading.Event] = None) -> "BridgeSession":
        """Dial with exponential backoff (doubling, capped at 30 s).

        Raises BridgeUnavailableError once the retry budget is spent.
        """
        backoff = cfg.reconnect_backoff
        for attempt in range(CONNECT_RETRY_BUDGET):
            if stop_event is not None and stop_event.is_set():
                raise BridgeUnavailableError("stopped while connecting")
            try:
                if on_event:
                    on_event("connect_attempt", attempt + 1)
                sock = socket.create_connection((cfg.host, cfg.port), timeout=5.0)
                sock.settimeout(RESPONSE_TIMEOUT_S)
                if on_event:
                    on_event("connected", (cfg.host, cfg.port))
                return cls(cfg, sock)
            except OSError:
                if attempt == CONNECT_RETRY_BUDGET - 1:
                    break
                if on_event:
                    on_event("backoff", backoff)
                if stop_event is not None:
                    if stop_event.wait(backoff):
                        raise BridgeUnavailableError("stopped while connecting")
                else:
                    time.sleep(backoff)
                backoff = min(backoff * 2.0, BACKOFF_CAP_S)
        raise BridgeUnavailableError(f"{cfg.host}:{cfg.port} unreachable after {CONNECT_RETRY_BUDGET} attempts")

    def send_value(self, value: float, tick: int) -> str:
        """Render, rate-limit, send one line, return the response line."""
        line = render_command(self.cfg.command_template, self.cfg.channel_index, value)
        with self._lock:
            gap = time.monotonic() - self._last_send
            if gap < self.cfg.min_interval:
                time.sleep(self.cfg.min_interval - gap)
            try:
                self._sock.sendall((line + "\n").encode("utf-8"))
                response = self._rfile.readline()
            except OSError as exc:
                self.alive = False
                raise BridgeSendError(str(exc)) from exc
            if response == "":
                self.alive = False
                raise BridgeSendError("connection closed by endpoint")
            self._last_send = time.monotonic()
            self.sent_count += 1
            return response.rstrip("\n")

    def close(self) -> None:
        self.alive = False
        try:
            self._rfile.close()
        except OSError:
            pass
        try:
            self._sock.close()
        except OSError:
            pass


def push_path_loss(session: BridgeSession, value: float, tick: int) -> str:
    """Send one path-loss sample; returns the endpoint's response line."""
    return session.send_value(value, tick)


class RfBridge:
    """Latest-value mailbox drained by a background worker.

    push() never blocks; values arriving while the worker is busy
    overwrite each other, so after any burst the endpoint converges to
    the final value. After the connect retry budget is exhausted the
    bridge flags itself degraded and fires on_give_up exactly once
    (live mode uses this to fall back to plain simulation).
    """

    def __init__(self, cfg: BridgeConfig, on_event: Optional[EventCallback] = None,
                 on_give_up: Optional[Callable[[], None]] = None):
        self.cfg = cfg
        self.on_event = on_event
        self.on_give_up = on_give_up
        self._slot: Optional[tuple[float, int]] = None
        self._cv = threading.Condition()
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None
        self._session: Optional[BridgeSession] = None
        self.degraded = False
        self.pushed_count = 0
        self.sent_count = 0
        self.last_sent: Optional[float] = None
        self.last_response: Optional[str] = None
        self.reconnects = 0

    def start(self) -> "RfBridge":
        self._thread = threading.Thread(target=self._run, name="rf-bridge", daemon=True)
        self._thread.start()
        return self

    def push(self, value: float, tick: int) -> None:
        """Offer the latest value; non-blocking, coalescing."""
        if not math.isfinite(value):
            raise ValueError(f"non-finite path loss value: {value!r}")
        with self._cv:
            self._slot = (value, tick)
            self.pushed_count += 1
            self._cv.notify()

    def flush(self, timeout: float = 10.0) -> bool:
        """Wait until the pending value (if any) has been delivered."""
        deadline = time.monotonic() + timeout
        with self._cv:
            while self._slot is not None and not self.degraded:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return False
                self._cv.wait(remaining)
            return self._slot is None

    def stop(self, flush: bool = True, timeout: float = 10.0) -> None:
        if flush:
            self.flush(timeout)
        self._stop.set()
        with self._cv:
            self._cv.notify_all()
        if self._thread is not None:
            self._thread.join(timeout)
        if self._session is not None:
            self._session.close()

    # -- worker ------------------------------------------------------------

    def _take(self) -> Optional[tuple[float, int]]:
        with self._cv:
            while self._slot is None and not self._stop.is_set():
                self._cv.wait(0.5)
            if self._stop.is_set() and self._slot is None:
                return None
            item, self._slot = self._slot, None
            return item

    def _ensure_session(self) -> Optional[BridgeSession]:
        if self._session is not None and self._session.alive:
            return self._session
        try:
            self._session = BridgeSession.connect(self.cfg, self.on_event, self._stop)
            return self._session
        except BridgeUnavailableError:
            if not self.degraded:
                self.degraded = True
                if self.on_event:
                    self.on_event("give_up", None)
                if self.on_give_up:
                    self.on_give_up()
            with self._cv:
                self._slot = None  # nothing will deliver it; unblock flush()
                self._cv.notify_all()
            return None

    def _run(self) -> None:
        while not self._stop.is_set():
            item = self._take()
            if item is None:
                return
            value, tick = item
            session = self._ensure_session()
            if session is None:
                if self.degraded:
                    continue
                return
            try:
                self.last_response = session.send_value(value, tick)
                self.sent_count += 1
                self.last_sent = value
                with self._cv:
                    self._cv.notify_all()  # wake flush()
            except BridgeSendError:
                self.reconnects += 1
                if self.on_event:
                    self.on_event("disconnected", tick)
                session.close()
                self._session = None
                with self._cv:
                    if self._slot is None:
                        self._slot = (value, tick)  # retry the undelivered value


# --------------------------------------------------------------------------
# Mock endpoint for tests and offline development


class MockRfServer:
    """In-process stand-in for the emulator's telnet control channel.

    Parses `... modify <idx> ... ploss <value>` lines, records them, and
    answers `OK <idx> <value>`; malformed lines get an `ERROR` reply and
    are recorded separately. A configurable response delay and a
    connection-drop switch support fault-injection tests.
    """

    def __init__(self, port: int = 0, response_delay: float = 0.0):
        self.response_delay = response_delay
        self.commands: list[tuple[int, float]] = []
        self.malformed: list[str] = []
        self.connections_seen = 0
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._conns: list[socket.socket] = []
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listener.bind(("127.0.0.1", port))
        self._listener.listen(8)
        self.port = self._listener.getsockname()[1]
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()

    @property
    def count(self) -> int:
        with self._lock:
            return len(self.commands)

    @property
    def last_value(self) -> Optional[float]:
        with self._lock:
            return self.commands[-1][1] if self.commands else None

    def drop_connections(self) -> None:
        """Force-close every live connection (fault injection)."""
        with self._lock:
            conns, self._conns = self._conns, []
        for conn in conns:
            try:
                conn.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            conn.close()

    def close(self) -> None:
        self._stop.set()
        try:
            self._listener.close()
        except OSError:
            pass
        self.drop_connections()

    # -- internals -----------------------------------------------------------

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                conn, _ = self._listener.accept()
            except OSError:
                return
            with self._lock:
                self._conns.append(conn)
                self.connections_seen += 1
            threading.Thread(target=self._serve, args=(conn,), daemon=True).start()

    def _parse(self, line: str) -> Optional[tuple[int, float]]:
        parts = line.split()
        try:
            idx = int(parts[parts.index("modify") + 1])
            value = float(parts[parts.index("ploss") + 1])
        except (ValueError, IndexError):
            return None
        return idx, value

    def _serve(self, conn: socket.socket) -> None:
        rfile = conn.makefile("r", encoding="utf-8", newline="\n")
        try:
            for line in rfile:
                line = line.rstrip("\n")
                if self.response_delay > 0:
                    time.sleep(self.response_delay)
                parsed = self._parse(line)
                if parsed is None:
                    with self._lock:
                        self.malformed.append(line)
                    reply = "ERROR unparsable command\n"
                else:
                    with self._lock:
                        self.commands.append(parsed)
                    reply = f"OK {parsed[0]} {parsed[1]}\n"
                conn.sendall(reply.encode("utf-8"))
        except OSError:
            pass
        finally:
            try:
                conn.close()
            except OSError:
                pass
