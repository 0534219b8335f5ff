"""The untrusted worker: behaviours, request handling and transports.

Requests and responses are JSON objects, one per line. Integers travel as
canonical lowercase hex::

    {"op":"modexp","u":hex,"a":hex,"l":hex,"id":str}
    {"op":"ecmul","s":hex,"px":hex,"py":hex,"pz":hex,"b":hex,"c":hex,"n":hex,"id":str}
    {"op":"ecadd","px":..,"py":..,"pz":..,"qx":..,"qy":..,"qz":..,"b":..,"c":..,"n":..,"id":str}
    {"op":"ecdbl","px":..,"py":..,"pz":..,"b":..,"c":..,"n":..,"id":str}

    {"id":str,"ok":true,"r":hex}                  # modexp
    {"id":str,"ok":true,"x":hex,"y":hex,"z":hex}  # point ops
    {"id":str,"ok":false,"err":str}

The in-process transport pushes every message through the same JSON
encoding as the socket one, so both are observable the same way.
"""
from __future__ import annotations

import json
import logging
import random
import secrets
import socket
import socketserver
import threading
from dataclasses import dataclass, replace
from typing import Callable

from .arith import ArithContext, from_hex, to_hex
from .curve import INFINITY, ProjectivePoint, add_formula, double_formula
from .ecsm_sos import TransformedCurve
from .errors import DomainError, ProtocolError, TransportError
from .modexp_sos import ModExpQuery

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 30.0
_POINT_FIELDS = ("px", "py", "pz")
_REQUIRED = {
    "modexp": ("u", "a", "l"),
    "ecmul": ("s", *_POINT_FIELDS, "b", "c", "n"),
    "ecadd": (*_POINT_FIELDS, "qx", "qy", "qz", "b", "c", "n"),
    "ecdbl": (*_POINT_FIELDS, "b", "c", "n"),
}


def ring_scalar_mul(s: int, P: ProjectivePoint, curve: TransformedCurve) -> ProjectivePoint:
    """Formal double-and-add over Z_N. Never normalizes, never branches on
    coordinate values."""
    if s == 0:
        return INFINITY
    ctx = ArithContext()
    R = P
    for bit in bin(s)[3:]:
        R = double_formula(ctx, R, curve.coef_b, curve.modulus)
        if bit == "1":
            R = add_formula(ctx, R, P, curve.modulus)
    return R


# --- behaviours -------------------------------------------------------------


@dataclass
class Honest:
    """Computes exactly what was asked."""

    seed: int | None = None

    def __post_init__(self) -> None:
        self.rng = random.Random(self.seed)

    def fresh(self):
        """An identical behaviour with its memory and RNG reset."""
        return replace(self)

    def modexp(self, U: int, A: int, L: int) -> int:
        return pow(U, A, L)

    def ecmul(self, curve: TransformedCurve, s: int, P: ProjectivePoint) -> ProjectivePoint:
        return ring_scalar_mul(s, P, curve)

    def ecadd(self, curve: TransformedCurve, P: ProjectivePoint, Q: ProjectivePoint) -> ProjectivePoint:
        return add_formula(ArithContext(), P, Q, curve.modulus)

    def ecdbl(self, curve: TransformedCurve, P: ProjectivePoint) -> ProjectivePoint:
        return double_formula(ArithContext(), P, curve.coef_b, curve.modulus)


@dataclass
class RandomForger(Honest):
    """Returns uniformly random ring elements without computing anything."""

    def modexp(self, U, A, L):
        return self.rng.randrange(L)

    def _random_point(self, n: int) -> ProjectivePoint:
        return ProjectivePoint(self.rng.randrange(n), self.rng.randrange(n), self.rng.randrange(n))

    def ecmul(self, curve, s, P):
        return self._random_point(curve.modulus)

    def ecadd(self, curve, P, Q):
        return self._random_point(curve.modulus)

    def ecdbl(self, curve, P):
        return self._random_point(curve.modulus)


@dataclass
class ExponentShift(Honest):
    """Targeted forger against the affine check.

    Treats consecutive queries as a pair (first, second), shifts the first
    exponent by ``delta`` and the second by ``g * delta`` for a guess g drawn
    from [2, guess_bound]. The forgery passes exactly when the pair really was
    (A1, A2) and g == t1. The unit guess is left out: with g = 1 the forgery
    would also pass whenever t1 = 1 and the order was swapped, blurring what
    is being measured.
    """

    delta: int = 1
    guess_bound: int = 2

    def __post_init__(self) -> None:
        super().__post_init__()
        self._pending_guess: int | None = None

    def _shift(self) -> int:
        if self._pending_guess is None:
            lo = 2 if self.guess_bound >= 2 else 1
            self._pending_guess = self.rng.randint(lo, max(lo, self.guess_bound))
            return self.delta
        g, self._pending_guess = self._pending_guess, None
        return g * self.delta

    def modexp(self, U, A, L):
        return pow(U, A + self._shift(), L)

    def ecmul(self, curve, s, P):
        return ring_scalar_mul(s + self._shift(), P, curve)


@dataclass
class LazyReplay(Honest):
    """Answers the first query honestly, then repeats that answer."""

    def __post_init__(self) -> None:
        super().__post_init__()
        self._last: dict[str, object] = {}
        self._lock = threading.Lock()

    def _replay(self, kind: str, compute: Callable[[], object]):
        with self._lock:
            if kind not in self._last:
                self._last[kind] = compute()
            return self._last[kind]

    def modexp(self, U, A, L):
        return self._replay("modexp", lambda: pow(U, A, L))

    def ecmul(self, curve, s, P):
        return self._replay("point", lambda: ring_scalar_mul(s, P, curve))

    def ecadd(self, curve, P, Q):
        return self._replay("point", lambda: super(LazyReplay, self).ecadd(curve, P, Q))

    def ecdbl(self, curve, P):
        return self._replay("point", lambda: super(LazyReplay, self).ecdbl(curve, P))


@dataclass
class OrderGuesser(Honest):
    """Computes the first query of each pair honestly and fakes the second.

    Guesses the tags (g1, g2) in [1, guess_bound] and answers the second
    query with R_first^g1 * U^g2, which passes iff the order and both tags
    are guessed right: the random-guessing adversary of the verifiability
    bound.
    """

    guess_bound: int = 2

    def __post_init__(self) -> None:
        super().__post_init__()
        self._first = None

    def _guesses(self) -> tuple[int, int]:
        return self.rng.randint(1, self.guess_bound), self.rng.randint(1, self.guess_bound)

    def modexp(self, U, A, L):
        if self._first is None:
            self._first = pow(U, A, L)
            return self._first
        first, self._first = self._first, None
        g1, g2 = self._guesses()
        return pow(first, g1, L) * pow(U, g2, L) % L

    def ecmul(self, curve, s, P):
        if self._first is None:
            self._first = ring_scalar_mul(s, P, curve)
            return self._first
        first, self._first = self._first, None
        g1, g2 = self._guesses()
        ctx = ArithContext()
        lhs = ring_scalar_mul(g1, first, curve)
        rhs = ring_scalar_mul(g2, P, curve)
        return add_formula(ctx, lhs, rhs, curve.modulus)


BEHAVIORS = {
    "honest": Honest,
    "random": RandomForger,
    "shift": ExponentShift,
    "replay": LazyReplay,
    "guess": OrderGuesser,
}


def make_behavior(name: str, seed: int | None = None, **params) -> Honest:
    try:
        cls = BEHAVIORS[name]
    except KeyError:
        raise DomainError(f"unknown behaviour {name!r}; choose from {sorted(BEHAVIORS)}") from None
    return cls(seed=seed, **params)


# --- request handling -------------------------------------------------------


def _decode_point(req: dict, prefix: str) -> ProjectivePoint:
    return ProjectivePoint(*(from_hex(req[prefix + c]) for c in "xyz"))


def _encode_point(P: ProjectivePoint) -> dict:
    return {"x": to_hex(P.x), "y": to_hex(P.y), "z": to_hex(P.z)}


class WorkerHandler:
    """Decodes one request dict, applies the behaviour, encodes the reply."""

    def __init__(self, behavior: Honest):
        self.behavior = behavior
        self._lock = threading.Lock()

    def handle(self, req: object) -> dict:
        rid = req.get("id") if isinstance(req, dict) else None
        rid = rid if isinstance(rid, str) else ""
        try:
            body = self._dispatch(req)
        except (DomainError, KeyError, TypeError, ValueError) as exc:
            return {"id": rid, "ok": False, "err": f"{type(exc).__name__}: {exc}"}
        return {"id": rid, "ok": True, **body}

    def _dispatch(self, req: object) -> dict:
        if not isinstance(req, dict):
            raise TypeError("request must be a JSON object")
        op = req.get("op")
        if op not in _REQUIRED:
            raise ValueError(f"unknown op {op!r}")
        if not isinstance(req.get("id"), str):
            raise TypeError("request id must be a string")
        missing = [f for f in _REQUIRED[op] if f not in req]
        if missing:
            raise KeyError(f"missing fields {missing}")
        with self._lock:
            if op == "modexp":
                q = ModExpQuery(from_hex(req["u"]), from_hex(req["a"]), from_hex(req["l"]))
                return {"r": to_hex(self.behavior.modexp(q.base, q.exponent, q.modulus))}
            curve = TransformedCurve(from_hex(req["b"]), from_hex(req["c"]), from_hex(req["n"]))
            if curve.modulus < 2:
                raise DomainError("ring modulus must be >= 2")
            P = _decode_point(req, "p")
            if op == "ecmul":
                R = self.behavior.ecmul(curve, from_hex(req["s"]), P)
            elif op == "ecadd":
                R = self.behavior.ecadd(curve, P, _decode_point(req, "q"))
            else:
                R = self.behavior.ecdbl(curve, P)
            return _encode_point(R)


def handle_line(handler: WorkerHandler, line: bytes | str) -> bytes:
    """One wire line in, one wire line out."""
    try:
        req = json.loads(line)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        resp = {"id": "", "ok": False, "err": f"malformed JSON: {exc}"}
    else:
        resp = handler.handle(req)
    return (json.dumps(resp, separators=(",", ":")) + "\n").encode()


# --- transports ---------------------------------------------------------------


class InProcessTransport:
    def __init__(self, behavior: Honest):
        self.handler = WorkerHandler(behavior.fresh())

    def __call__(self, req: dict) -> dict:
        line = json.dumps(req, separators=(",", ":")).encode()
        return json.loads(handle_line(self.handler, line))


class TcpTransport:
    """One persistent connection; calls are serialized by a lock."""

    def __init__(self, endpoint: str, timeout: float = DEFAULT_TIMEOUT):
        self.host, self.port = parse_endpoint(endpoint)
        self.timeout = timeout
        self._sock: socket.socket | None = None
        self._reader = None
        self._lock = threading.Lock()

    def _connect(self) -> None:
        try:
            self._sock = socket.create_connection((self.host, self.port), timeout=self.timeout)
        except OSError as exc:
            raise TransportError(f"cannot connect to {self.host}:{self.port}: {exc}") from exc
        self._reader = self._sock.makefile("rb")

    def __call__(self, req: dict) -> dict:
        with self._lock:
            if self._sock is None:
                self._connect()
            try:
                self._sock.sendall((json.dumps(req, separators=(",", ":")) + "\n").encode())
                line = self._reader.readline()
            except OSError as exc:
                self.close()
                raise TransportError(f"connection failed: {exc}") from exc
            if not line:
                self.close()
                raise TransportError("worker closed the connection")
            return json.loads(line)

    def close(self) -> None:
        if self._sock is not None:
            try:
                self._reader.close()
                self._sock.close()
            finally:
                self._sock = None
                self._reader = None


class RecordingTransport:
    """Wraps a transport and keeps every (request, response) pair."""

    def __init__(self, inner):
        self.inner = inner
        self.log: list[tuple[dict, dict]] = []
        self._lock = threading.Lock()

    def __call__(self, req: dict) -> dict:
        resp = self.inner(req)
        with self._lock:
            self.log.append((req, resp))
        return resp

    @property
    def requests(self) -> list[dict]:
        return [req for req, _ in self.log]


# --- client handle ------------------------------------------------------------


class CloudWorker:
    """Client-side handle: turns typed calls into wire requests."""

    def __init__(self, transport):
        self.transport = transport

    def _call(self, req: dict) -> dict:
        req["id"] = secrets.token_hex(8)
        resp = self.transport(req)
        if not isinstance(resp, dict) or resp.get("id") != req["id"]:
            raise ProtocolError("response id does not match request")
        if not resp.get("ok"):
            raise ProtocolError(f"worker error: {resp.get('err')}")
        return resp

    def serve_modexp(self, q: ModExpQuery) -> int:
        resp = self._call({"op": "modexp", "u": to_hex(q.base), "a": to_hex(q.exponent), "l": to_hex(q.modulus)})
        try:
            return from_hex(resp["r"])
        except (KeyError, DomainError) as exc:
            raise ProtocolError(f"bad modexp response: {exc}") from exc

    def _point_call(self, req: dict, curve: TransformedCurve) -> ProjectivePoint:
        req.update({"b": to_hex(curve.coef_b), "c": to_hex(curve.coef_c), "n": to_hex(curve.modulus)})
        resp = self._call(req)
        try:
            return ProjectivePoint(*(from_hex(resp[c]) for c in "xyz"))
        except (KeyError, DomainError) as exc:
            raise ProtocolError(f"bad point response: {exc}") from exc

    @staticmethod
    def _point_fields(P: ProjectivePoint, prefix: str) -> dict:
        return {prefix + "x": to_hex(P.x), prefix + "y": to_hex(P.y), prefix + "z": to_hex(P.z)}

    def serve_scalar_mul(self, curve: TransformedCurve, s: int, P: ProjectivePoint) -> ProjectivePoint:
        return self._point_call({"op": "ecmul", "s": to_hex(s), **self._point_fields(P, "p")}, curve)

    def serve_point_add(self, curve: TransformedCurve, P: ProjectivePoint, Q: ProjectivePoint) -> ProjectivePoint:
        return self._point_call(
            {"op": "ecadd", **self._point_fields(P, "p"), **self._point_fields(Q, "q")}, curve
        )

    def serve_point_double(self, curve: TransformedCurve, P: ProjectivePoint) -> ProjectivePoint:
        return self._point_call({"op": "ecdbl", **self._point_fields(P, "p")}, curve)

    def close(self) -> None:
        transport = self.transport
        while transport is not None:
            close = getattr(transport, "close", None)
            if close is not None:
                close()
                return
            transport = getattr(transport, "inner", None)


def local_worker(behavior: Honest | None = None) -> CloudWorker:
    return CloudWorker(InProcessTransport(behavior or Honest()))


def remote_worker(endpoint: str, timeout: float = DEFAULT_TIMEOUT) -> CloudWorker:
    return CloudWorker(TcpTransport(endpoint, timeout))


def recorded(worker: CloudWorker) -> tuple[CloudWorker, RecordingTransport]:
    rec = RecordingTransport(worker.transport)
    return CloudWorker(rec), rec


# --- server -------------------------------------------------------------------


def parse_endpoint(endpoint: str) -> tuple[str, int]:
    host, sep, port = endpoint.rpartition(":")
    if not sep or not port.isdigit():
        raise DomainError(f"endpoint must look like host:port, got {endpoint!r}")
    return host or "127.0.0.1", int(port)


class _LineHandler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        handler = WorkerHandler(self.server.behavior.fresh())
        for line in self.rfile:
            if not line.strip():
                continue
            self.wfile.write(handle_line(handler, line))
            self.wfile.flush()


class WorkerServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True
    request_queue_size = 256

    def __init__(self, endpoint: str, behavior: Honest):
        self.behavior = behavior
        try:
            super().__init__(parse_endpoint(endpoint), _LineHandler)
        except OSError as exc:
            raise TransportError(f"cannot bind {endpoint}: {exc}") from exc

    @property
    def endpoint(self) -> str:
        host, port = self.server_address[:2]
        return f"{host}:{port}"


def start_server(endpoint: str, behavior: Honest) -> WorkerServer:
    """Serve in a background thread; stop with ``server.shutdown()``."""
    server = WorkerServer(endpoint, behavior)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    log.info("worker listening on %s", server.endpoint)
    return server


def run_server(endpoint: str, behavior: Honest) -> None:
    """Serve until interrupted."""
    with WorkerServer(endpoint, behavior) as server:
        log.info("worker listening on %s", server.endpoint)
        server.serve_forever()
