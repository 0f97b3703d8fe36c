"""Stream-socket decoupling of the search engine from its controller.

Wire format: newline-delimited JSON objects, UTF-8, one object per
message.  Whichever process runs the search first announces
``{"proto": 1, "n": ..., "feature_len": ...}``, then sends one step
message per expansion step::

    {"t": 3, "features": [...], "reward": -1.0, "done": false}

and blocks for the controller's ``{"h": <list index>}`` before popping.
The final message carries ``done: true`` plus the run outcome and takes
no reply.  The ``features`` array is the feature diff (the step counter
rides in the last component, raw); ``reward`` is the reward accumulated
since the previous message, i.e. -1 after each expansion and 0 in the
very first message.

Both orientations are supported: :func:`serve_search` makes the search
listen for an inbound controller, while :class:`RemotePolicy` lets a
locally driven search connect out to a controller server.  For any
deterministic controller the resulting trace is identical to running
the equivalent policy in process.
"""

from __future__ import annotations

import json
import socket
from typing import Callable, Optional

from .features import STATS_PER_LIST
from .policies import ControlPolicy
from .search import Budget, GbfsRun, RUNNING, SearchAborted, SearchResult

PROTO_VERSION = 1
DEFAULT_TIMEOUT = 30.0

CONTROLLER_DISCONNECTED = "controller-disconnected"
PROTOCOL_ERROR = "protocol-error"


class BridgeError(Exception):
    pass


def _send(fh, obj: dict) -> None:
    fh.write((json.dumps(obj) + "\n").encode("utf-8"))
    fh.flush()


def _recv(fh) -> dict:
    line = fh.readline()
    if not line:
        raise ConnectionError("connection closed")
    try:
        obj = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BridgeError(f"malformed message: {exc}") from exc
    if not isinstance(obj, dict):
        raise BridgeError(f"malformed message: expected object, got {type(obj).__name__}")
    return obj


def _step_message(run: GbfsRun, done: bool, outcome: Optional[str] = None) -> dict:
    msg = {
        "t": run.t,
        "features": list(run.diff),
        "reward": -1.0 if run.t > 0 else 0.0,
        "done": done,
    }
    if outcome is not None:
        msg["outcome"] = outcome
    return msg


def _drive_search(run: GbfsRun, fh) -> SearchResult:
    """Shared search loop: step messages out, action messages in."""
    _send(fh, {"proto": PROTO_VERSION, "n": run.n, "feature_len": run.feature_len()})
    try:
        while run.status() == RUNNING:
            _send(fh, _step_message(run, done=False))
            try:
                msg = _recv(fh)
            except BridgeError:
                _send(fh, {"error": PROTOCOL_ERROR, "detail": "unparseable action message"})
                run.abort(PROTOCOL_ERROR)
                break
            action = msg.get("h")
            if isinstance(action, bool) or not isinstance(action, int) or not 0 <= action < run.n:
                _send(fh, {"error": PROTOCOL_ERROR, "detail": f"invalid heuristic index {action!r}"})
                run.abort(PROTOCOL_ERROR)
                break
            run.step(action)
    except (ConnectionError, socket.timeout, OSError):
        run.abort(CONTROLLER_DISCONNECTED)
    result = run.result()
    try:
        _send(fh, _step_message(run, done=True, outcome=result.outcome))
    except (ConnectionError, socket.timeout, OSError):
        pass  # controller already gone; the result stands
    return result


def serve_search(
    task,
    portfolio,
    host: str = "127.0.0.1",
    port: int = 0,
    budget: Optional[Budget] = None,
    timeout: float = DEFAULT_TIMEOUT,
    on_listen: Optional[Callable[[str, int], None]] = None,
) -> SearchResult:
    """Run one search episode controlled by an inbound connection.

    Binds ``host:port`` (port 0 picks a free one, reported through
    ``on_listen``), waits for a single controller, then behaves exactly
    like :func:`dacsearch.search.run_gbfs` with a remote policy.
    """
    with socket.create_server((host, port)) as server:
        server.settimeout(timeout)
        addr = server.getsockname()
        if on_listen is not None:
            on_listen(addr[0], addr[1])
        try:
            conn, _ = server.accept()
        except socket.timeout:
            raise BridgeError(f"no controller connected within {timeout} s")
        with conn:
            conn.settimeout(timeout)
            with conn.makefile("rwb") as fh:
                run = GbfsRun(task, portfolio, budget)
                return _drive_search(run, fh)


class RemotePolicy(ControlPolicy):
    """Forward every selection to a controller server over one socket.

    The connection is established lazily on the first selection of an
    episode (the greeting needs the feature length, known only then) and
    closed when the episode ends.  Timeouts and connection loss abort
    the search with outcome ``controller-disconnected``.
    """

    def __init__(self, host: str, port: int, timeout: float = DEFAULT_TIMEOUT):
        self.host = host
        self.port = port
        self.timeout = timeout
        self._sock: Optional[socket.socket] = None
        self._fh = None

    def reset(self):
        self._close()

    def _close(self):
        if self._fh is not None:
            try:
                self._fh.close()
            except OSError:
                pass
            self._fh = None
        if self._sock is not None:
            try:
                self._sock.close()
            except OSError:
                pass
            self._sock = None

    def _connect(self, n: int, feature_len: int):
        try:
            self._sock = socket.create_connection((self.host, self.port), timeout=self.timeout)
            self._fh = self._sock.makefile("rwb")
            _send(self._fh, {"proto": PROTO_VERSION, "n": n, "feature_len": feature_len})
        except (ConnectionError, socket.timeout, OSError) as exc:
            self._close()
            raise SearchAborted(CONTROLLER_DISCONNECTED, str(exc))

    def select(self, t, features, diff):
        n = (len(features) - 1) // STATS_PER_LIST
        if self._fh is None:
            self._connect(n, len(features))
        try:
            _send(
                self._fh,
                {
                    "t": t,
                    "features": list(diff),
                    "reward": -1.0 if t > 0 else 0.0,
                    "done": False,
                },
            )
            msg = _recv(self._fh)
        except BridgeError as exc:
            self._close()
            raise SearchAborted(PROTOCOL_ERROR, str(exc))
        except (ConnectionError, socket.timeout, OSError) as exc:
            self._close()
            raise SearchAborted(CONTROLLER_DISCONNECTED, str(exc))
        action = msg.get("h")
        if isinstance(action, bool) or not isinstance(action, int) or not 0 <= action < n:
            self._close()
            raise SearchAborted(PROTOCOL_ERROR, f"invalid heuristic index {action!r}")
        return action

    def on_episode_end(self, t, diff, outcome):
        if self._fh is None:
            return
        try:
            _send(
                self._fh,
                {
                    "t": t,
                    "features": list(diff),
                    "reward": -1.0 if t > 0 else 0.0,
                    "done": True,
                    "outcome": outcome,
                },
            )
        except (ConnectionError, socket.timeout, OSError):
            pass
        self._close()


def controller_loop(fh, choose: Callable[[dict, dict], int]) -> dict:
    """Reference controller: answer step messages until done.

    ``choose(greeting, step_message)`` returns the heuristic index.
    Returns the final (done) step message.
    """
    greeting = _recv(fh)
    if greeting.get("proto") != PROTO_VERSION:
        raise BridgeError(f"unsupported protocol: {greeting!r}")
    while True:
        msg = _recv(fh)
        if "error" in msg:
            raise BridgeError(f"search reported {msg['error']}: {msg.get('detail')}")
        if msg.get("done"):
            return msg
        _send(fh, {"h": choose(greeting, msg)})


def connect_controller(
    host: str, port: int, choose: Callable[[dict, dict], int], timeout: float = DEFAULT_TIMEOUT
) -> dict:
    """Controller that connects to a search served by :func:`serve_search`."""
    with socket.create_connection((host, port), timeout=timeout) as sock:
        sock.settimeout(timeout)
        with sock.makefile("rwb") as fh:
            return controller_loop(fh, choose)


def serve_controller(
    host: str,
    port: int,
    choose: Callable[[dict, dict], int],
    timeout: float = DEFAULT_TIMEOUT,
    on_listen: Optional[Callable[[str, int], None]] = None,
    episodes: int = 1,
) -> None:
    """Controller server for searches that connect out via ``remote:`` policies.

    Handles ``episodes`` successive connections (one search episode each).
    """
    with socket.create_server((host, port)) as server:
        server.settimeout(timeout)
        addr = server.getsockname()
        if on_listen is not None:
            on_listen(addr[0], addr[1])
        for _ in range(episodes):
            conn, _ = server.accept()
            with conn:
                conn.settimeout(timeout)
                with conn.makefile("rwb") as fh:
                    controller_loop(fh, choose)
