"""TCP coordinator and worker.

Connection handler threads only read frames and push them onto one queue;
the coordinator loop is the sole owner of the scheduler state and the only
thread that writes to sockets.
"""
from __future__ import annotations

import itertools
import logging
import queue
import socket
import threading
import time

from ..errors import AparError, CodecError, TransportError
from ..interp import DEFAULT_MAX_DEPTH
from ..lang import Program, format_program, parse, resolve
from ..sched import RunResult, SchedState
from .codec import (
    PROTOCOL_VERSION, Assign, FrameDecoder, Hello, HelloAck, LoadProgram, ProtoError,
    Result, Shutdown, encode_frame, fnv1a64,
)
from .task import TaskRunner

log = logging.getLogger("apar.net")

DEFAULT_PORT = 7401
HANDSHAKE_TIMEOUT = 30.0


def parse_address(address, default_host: str = "127.0.0.1") -> tuple[str, int]:
    """Accept ``(host, port)``, ``"host:port"``, ``":port"`` or ``"host"``."""
    if isinstance(address, tuple):
        return address[0], int(address[1])
    host, sep, port = str(address).rpartition(":")
    if not sep:
        return port or default_host, DEFAULT_PORT
    try:
        return host or default_host, int(port)
    except ValueError:
        raise TransportError(f"bad address {address!r}") from None


class Connection:
    """A socket speaking length-prefixed frames."""

    def __init__(self, sock: socket.socket):
        self.sock = sock
        self._decoder = FrameDecoder()
        self._inbox: list = []

    def send(self, msg) -> None:
        self.sock.sendall(encode_frame(msg))

    def recv(self):
        """Block for the next message; ``None`` once the peer has closed."""
        while not self._inbox:
            chunk = self.sock.recv(65536)
            if not chunk:
                return None
            self._inbox.extend(self._decoder.feed(chunk))
        return self._inbox.pop(0)

    def close(self) -> None:
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class TcpCoordinator:
    """Listens for workers and drives one scheduler run over them.

    The listening socket is bound on construction so ``address`` is known
    (useful with port 0) before ``run`` blocks.
    """

    def __init__(self, listen=("127.0.0.1", DEFAULT_PORT), min_workers: int = 1,
                 handshake_timeout: float = HANDSHAKE_TIMEOUT):
        if min_workers < 1:
            raise ValueError("min_workers must be at least 1")
        self.min_workers = min_workers
        self.handshake_timeout = handshake_timeout
        self._server = socket.create_server(parse_address(listen))
        self._server.settimeout(0.2)
        self.address = self._server.getsockname()[:2]
        self._events: queue.Queue = queue.Queue()
        self._stop = threading.Event()
        self._keys = itertools.count()
        self._accepted: list[Connection] = []

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                sock, _ = self._server.accept()
            except socket.timeout:
                continue
            except OSError:
                return
            sock.settimeout(None)
            key = next(self._keys)
            conn = Connection(sock)
            self._accepted.append(conn)
            threading.Thread(target=self._read_loop, args=(key, conn),
                             name=f"apar-conn-{key}", daemon=True).start()

    def _read_loop(self, key: int, conn: Connection) -> None:
        try:
            conn.sock.settimeout(self.handshake_timeout)
            hello = conn.recv()
            conn.sock.settimeout(None)
            if hello is None:
                conn.close()
                return
            self._events.put(("hello", key, conn, hello))
            while True:
                msg = conn.recv()
                if msg is None:
                    self._events.put(("lost", key, "connection closed"))
                    return
                self._events.put(("msg", key, msg))
        except (OSError, CodecError) as err:
            self._events.put(("lost", key, str(err) or type(err).__name__))
            conn.close()

    def run(self, state: SchedState, program: Program) -> RunResult:
        source = format_program(program)
        digest = fnv1a64(source.encode("utf-8"))
        conns: dict[int, Connection] = {}
        worker_of: dict[int, int] = {}
        waiting: list[int] = []
        started = False
        deadline = time.monotonic() + self.handshake_timeout
        acceptor = threading.Thread(target=self._accept_loop, name="apar-accept", daemon=True)
        acceptor.start()
        log.info("coordinator listening on %s:%d", *self.address)

        def send_all(assignments) -> None:
            for a in assignments:
                try:
                    conns[a.worker].send(Assign(a.task, a.expr, digest))
                except OSError as err:
                    raise TransportError(f"lost worker {a.worker}: {err}") from None

        try:
            while not state.is_complete():
                timeout = None
                if not started:
                    timeout = deadline - time.monotonic()
                    if timeout <= 0:
                        raise TransportError(
                            f"timed out waiting for {self.min_workers} worker(s); "
                            f"{len(waiting)} joined")
                try:
                    event = self._events.get(timeout=timeout)
                except queue.Empty:
                    continue
                kind, key = event[0], event[1]
                if kind == "hello":
                    conn, hello = event[2], event[3]
                    if not isinstance(hello, Hello) or hello.protocol_version != PROTOCOL_VERSION:
                        got = getattr(hello, "protocol_version", type(hello).__name__)
                        log.warning("rejecting connection: protocol %s", got)
                        try:
                            conn.send(ProtoError(
                                f"protocol version mismatch: coordinator speaks {PROTOCOL_VERSION}, got {got}"))
                        except OSError:
                            pass
                        conn.close()
                        continue
                    wid = len(conns)
                    conns[wid] = conn
                    worker_of[key] = wid
                    conn.send(HelloAck(wid))
                    conn.send(LoadProgram(source))
                    log.info("worker %d joined", wid)
                    if started:
                        send_all(state.on_worker_join(wid))
                    else:
                        waiting.append(wid)
                        if len(waiting) >= self.min_workers:
                            started = True
                            for w in waiting:
                                send_all(state.on_worker_join(w))
                elif kind == "msg":
                    wid = worker_of[key]
                    msg = event[2]
                    if isinstance(msg, Result):
                        send_all(state.on_result(wid, msg.task_id, msg.value, msg.printed))
                    elif isinstance(msg, ProtoError):
                        raise TransportError(f"worker {wid}: {msg.message}")
                    else:
                        raise TransportError(f"unexpected {type(msg).__name__} from worker {wid}")
                elif kind == "lost" and key in worker_of:
                    raise TransportError(f"lost worker {worker_of[key]}: {event[2]}")
            value, output = state.final_result()
            return RunResult(value, output, tuple(state.trace))
        finally:
            self._stop.set()
            for conn in conns.values():
                try:
                    conn.send(Shutdown())
                except OSError:
                    pass
                conn.close()
            self._server.close()
            acceptor.join()
            for conn in self._accepted:
                conn.close()


def serve_coordinator(listen_address, state: SchedState, program: Program,
                      min_workers: int = 1,
                      handshake_timeout: float = HANDSHAKE_TIMEOUT) -> RunResult:
    coordinator = TcpCoordinator(listen_address, min_workers, handshake_timeout)
    return coordinator.run(state, program)


def run_worker(connect_address, protocol_version: int = PROTOCOL_VERSION,
               timeout: float = HANDSHAKE_TIMEOUT,
               max_depth: int = DEFAULT_MAX_DEPTH) -> int:
    """Serve tasks for one coordinator.  Returns 0 after a clean Shutdown and
    1 after reporting or receiving a ProtoError."""
    host, port = parse_address(connect_address)
    try:
        sock = socket.create_connection((host, port), timeout=timeout)
    except ConnectionRefusedError:
        raise TransportError(f"connection refused ({host}:{port})") from None
    except OSError as err:
        raise TransportError(f"cannot connect to {host}:{port}: {err}") from None
    with Connection(sock) as conn:
        try:
            return _worker_session(conn, protocol_version, max_depth)
        except (OSError, CodecError) as err:
            raise TransportError(f"connection lost: {err}") from None


def _worker_session(conn: Connection, protocol_version: int, max_depth: int) -> int:
    conn.send(Hello(protocol_version))
    msg = conn.recv()
    if isinstance(msg, ProtoError):
        log.error("coordinator refused handshake: %s", msg.message)
        return 1
    if not isinstance(msg, HelloAck):
        raise TransportError(f"expected HelloAck, got {type(msg).__name__}")
    conn.sock.settimeout(None)
    log.info("registered as worker %d", msg.worker_id)
    runner = None
    digest = None
    while True:
        msg = conn.recv()
        if msg is None:
            raise TransportError("connection lost")
        if isinstance(msg, Shutdown):
            return 0
        if isinstance(msg, LoadProgram):
            try:
                program = parse(msg.program_source)
                resolve(program)
            except AparError as err:
                conn.send(ProtoError(f"cannot load program: {err}"))
                return 1
            runner = TaskRunner(program, max_depth)
            digest = fnv1a64(msg.program_source.encode("utf-8"))
        elif isinstance(msg, Assign):
            if runner is None or msg.program_digest != digest:
                conn.send(ProtoError(f"task {msg.task_id}: program digest mismatch"))
                return 1
            try:
                value, printed = runner.run(msg.expr)
            except AparError as err:
                conn.send(ProtoError(f"task {msg.task_id}: {err}"))
                return 1
            conn.send(Result(msg.task_id, value, printed))
        elif isinstance(msg, ProtoError):
            log.error("coordinator error: %s", msg.message)
            return 1
        else:
            conn.send(ProtoError(f"unexpected {type(msg).__name__}"))
            return 1
