"""Session drivers: TCP sockets, an in-memory scheduler, and transcript replay.

Topology: the trusted initializer (when present) listens and both parties
connect to it; P1 listens and P2 connects to P1.  Whoever connects sends a
hello carrying its role and the session parameters, and the listener answers
with its own hello or an error frame.
"""

from __future__ import annotations

import logging
import socket
import threading
import time
from collections import deque
from dataclasses import dataclass, replace
from typing import Any, Optional

from ..algebra import Group, is_prime, schnorr_group
from ..dist import PreconditionError
from . import codec as C
from .rng import CounterRng
from .roles import (
    ROLES,
    Context,
    ProtocolCheckFailed,
    Send,
    decode_input,
    encode_input,
    encode_output,
)
from .transcript import INPUT, OUTPUT, RECEIVED, SENT, Transcript

log = logging.getLogger(__name__)

Address = tuple[str, int]


class SessionAbort(Exception):
    def __init__(self, reason: int, detail: str = ""):
        self.reason = reason
        self.detail = detail
        text = C.REASONS.get(reason, "session error")
        super().__init__(f"{text}: {detail}" if detail else text)


PEER_CLOSED = C.PEER_CLOSED


@dataclass
class SessionConfig:
    role: str
    protocol: str
    q: int
    seed: int = 0
    input: Any = None
    p: Optional[int] = None
    g: Optional[int] = None
    listen: Optional[Address] = None
    connect: Optional[Address] = None
    ti: Optional[Address] = None
    session_id: int = 0
    transcript: Optional[str] = None
    timeout: float = 10.0
    listen_sock: Optional[socket.socket] = None

    def __post_init__(self):
        if self.protocol not in ROLES:
            raise PreconditionError(f"unknown protocol {self.protocol!r}")
        if self.role not in ROLES[self.protocol]:
            raise PreconditionError(f"role {self.role} does not take part in {self.protocol}")
        if not is_prime(self.q):
            raise PreconditionError(f"q={self.q} is not prime")
        if not 0 <= self.seed < 1 << 64:
            raise PreconditionError("seed must fit in 64 bits")
        if self.protocol == "np-ot":
            G = schnorr_group(self.q, self.p, self.g)
            self.p, self.g = G.p, G.g
        else:
            self.p, self.g = self.p or 0, self.g or 0

    @property
    def group(self) -> Optional[Group]:
        return schnorr_group(self.q, self.p, self.g) if self.protocol == "np-ot" else None

    @property
    def has_ti(self) -> bool:
        return "TI" in ROLES[self.protocol]

    def hello(self) -> C.Hello:
        return C.Hello(self.role, self.q, self.p, self.g, self.session_id)

    def context(self) -> Context:
        return make_context(self.protocol, self.role, self.q, self.seed, self.group)


@dataclass
class SessionResult:
    role: str
    output: Any
    transcript: Transcript
    context: Optional[Context] = None
    error: Optional[SessionAbort] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def make_context(protocol: str, role: str, q: int, seed: int, group: Optional[Group] = None) -> Context:
    return Context(q=q, rng=CounterRng(seed, f"{protocol}/{role}"), group=group)


# -- generic stepping ---------------------------------------------------------


def _step(gen, value):
    """Advance a role; translate decoding and check failures into aborts."""
    try:
        return False, gen.send(value)
    except StopIteration as stop:
        return True, stop.value
    except C.DecodeError as exc:
        raise SessionAbort(C.MALFORMED, str(exc)) from None
    except ProtocolCheckFailed as exc:
        raise SessionAbort(C.CHECK_FAILED, str(exc)) from None


# -- sockets ------------------------------------------------------------------


class Link:
    def __init__(self, sock: socket.socket, stype: int, transcript: Transcript, peer: str = ""):
        self.sock = sock
        self.stype = stype
        self.transcript = transcript
        self.peer = peer

    def read_raw(self) -> bytes:
        head = self._read_exact(4)
        length = int.from_bytes(head, "big")
        if length < 2 or length > C.MAX_FRAME:
            self.send_error(C.MALFORMED)
            raise SessionAbort(C.MALFORMED, f"frame length {length}")
        return head + self._read_exact(length)

    def _read_exact(self, n: int) -> bytes:
        buf = b""
        while len(buf) < n:
            try:
                chunk = self.sock.recv(n - len(buf))
            except socket.timeout:
                raise SessionAbort(PEER_CLOSED, "timed out") from None
            except OSError as exc:
                raise SessionAbort(PEER_CLOSED, str(exc)) from None
            if not chunk:
                raise SessionAbort(PEER_CLOSED, f"{self.peer or 'peer'} closed the connection")
            buf += chunk
        return buf

    def parse(self, raw: bytes, expected: int) -> bytes:
        try:
            frame = C.decode_frame(raw)
        except C.DecodeError as exc:
            self.send_error(C.MALFORMED)
            raise SessionAbort(C.MALFORMED, str(exc)) from None
        if frame.session_type == self.stype and frame.tag == C.ERROR:
            code = frame.payload[0]
            raise SessionAbort(code, f"reported by {self.peer or 'peer'}")
        if frame.session_type != self.stype or frame.tag != expected:
            self.send_error(C.UNEXPECTED)
            raise SessionAbort(
                C.UNEXPECTED, f"wanted tag {expected:#04x}, got {frame.session_type:#04x}/{frame.tag:#04x}"
            )
        return frame.payload

    def recv(self, expected: int) -> bytes:
        raw = self.read_raw()
        self.transcript.add(RECEIVED, self.peer, raw)
        return self.parse(raw, expected)

    def send(self, tag: int, payload: bytes) -> None:
        frame = C.encode_frame(self.stype, tag, payload)
        try:
            self.sock.sendall(frame)
        except OSError as exc:
            raise SessionAbort(PEER_CLOSED, str(exc)) from None
        self.transcript.add(SENT, self.peer, frame)

    def send_error(self, reason: int) -> None:
        try:
            self.send(C.ERROR, bytes([reason]))
        except SessionAbort:
            pass

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass


def _connect(addr: Address, timeout: float) -> socket.socket:
    deadline = time.monotonic() + timeout
    while True:
        try:
            s = socket.create_connection(addr, timeout=timeout)
            s.settimeout(timeout)
            return s
        except (ConnectionRefusedError, socket.timeout, OSError) as exc:
            if time.monotonic() > deadline:
                raise SessionAbort(PEER_CLOSED, f"cannot reach {addr[0]}:{addr[1]}: {exc}") from None
            time.sleep(0.02)


def _check_hello(cfg: SessionConfig, link: Link, payload: bytes, allowed: set[str]) -> C.Hello:
    try:
        theirs = C.Hello.decode(payload)
    except C.DecodeError as exc:
        link.send_error(C.MALFORMED)
        raise SessionAbort(C.MALFORMED, str(exc)) from None
    if theirs.role not in allowed:
        link.send_error(C.ROLE_ERROR)
        raise SessionAbort(C.ROLE_ERROR, f"peer claims role {theirs.role}")
    if theirs.params() != cfg.hello().params():
        link.send_error(C.PARAM_MISMATCH)
        raise SessionAbort(
            C.PARAM_MISMATCH, f"peer has (q,p,g,session)={theirs.params()}, local {cfg.hello().params()}"
        )
    return theirs


def _dial(cfg: SessionConfig, addr: Address, peer: str, transcript: Transcript) -> Link:
    link = Link(_connect(addr, cfg.timeout), C.SESSION_TYPES[cfg.protocol], transcript, peer)
    link.send(C.HELLO, cfg.hello().encode())
    _check_hello(cfg, link, link.recv(C.HELLO), {peer})
    return link


def _accept(cfg: SessionConfig, server: socket.socket, peers: list[str], transcript: Transcript) -> dict[str, Link]:
    """Accept one connection per expected peer and answer their hellos.

    Hellos are processed in the order of ``peers`` regardless of arrival
    order so the transcript does not depend on connection timing.
    """
    stype = C.SESSION_TYPES[cfg.protocol]
    pending: dict[str, tuple[Link, bytes]] = {}
    while len(pending) < len(peers):
        try:
            sock, _ = server.accept()
        except socket.timeout:
            raise SessionAbort(PEER_CLOSED, "no peer connected") from None
        sock.settimeout(cfg.timeout)
        link = Link(sock, stype, transcript)
        raw = link.read_raw()
        try:
            role = C.Hello.decode(C.decode_frame(raw).payload).role
        except C.DecodeError:
            role = None
        if role not in peers or role in pending:
            # record and reject straight away
            link.peer = role or ""
            transcript.add(RECEIVED, link.peer, raw)
            payload = link.parse(raw, C.HELLO)
            _check_hello(cfg, link, payload, set(peers) - set(pending))
        pending[role] = (link, raw)
    for role in peers:
        link, raw = pending[role]
        link.peer = role
        transcript.add(RECEIVED, role, raw)
    # validate every hello before answering any, so one bad peer aborts all
    for role in peers:
        link, raw = pending[role]
        try:
            _check_hello(cfg, link, link.parse(raw, C.HELLO), {role})
        except SessionAbort as exc:
            for other in peers:
                if other != role:
                    pending[other][0].send_error(exc.reason)
            raise
    links = {}
    for role in peers:
        links[role] = pending[role][0]
        links[role].send(C.HELLO, cfg.hello().encode())
    return links


def _listener(cfg: SessionConfig) -> socket.socket:
    if cfg.listen_sock is not None:
        server = cfg.listen_sock
    else:
        if cfg.listen is None:
            raise PreconditionError(f"{cfg.role} needs a listen address")
        server = socket.create_server(cfg.listen)
    server.settimeout(cfg.timeout)
    return server


def serve(config: SessionConfig) -> SessionResult:
    """Run one session for ``config.role``; raises :class:`SessionAbort` on failure.

    The transcript is written to ``config.transcript`` (if set) in either case.
    """
    cfg = config
    ctx = cfg.context()
    transcript = Transcript(cfg.protocol, cfg.role, cfg.seed)
    transcript.add_local(INPUT, encode_input(cfg.protocol, cfg.role, cfg.input, ctx))
    links: dict[str, Link] = {}
    server = None
    try:
        if cfg.role == "TI":
            server = _listener(cfg)
            links.update(_accept(cfg, server, ["P1", "P2"], transcript))
        elif cfg.role == "P1":
            server = _listener(cfg)
            if cfg.has_ti:
                links["TI"] = _dial(cfg, _need(cfg.ti, "--ti"), "TI", transcript)
            links.update(_accept(cfg, server, ["P2"], transcript))
        else:
            if cfg.has_ti:
                links["TI"] = _dial(cfg, _need(cfg.ti, "--ti"), "TI", transcript)
            links["P1"] = _dial(cfg, _need(cfg.connect, "--connect"), "P1", transcript)

        gen = ROLES[cfg.protocol][cfg.role](ctx, cfg.input)
        done, action = _step(gen, None)
        while not done:
            link = links[action.peer]
            if isinstance(action, Send):
                link.send(action.tag, action.payload)
                done, action = _step(gen, None)
            else:
                payload = link.recv(action.tag)
                try:
                    done, action = _step(gen, payload)
                except SessionAbort as exc:
                    link.send_error(exc.reason)
                    raise
        output = action
        transcript.add_local(OUTPUT, encode_output(cfg.protocol, output, ctx))
        return SessionResult(cfg.role, output, transcript, ctx)
    finally:
        for link in links.values():
            link.close()
        if server is not None:
            server.close()
        if cfg.transcript:
            transcript.save(cfg.transcript)


def _need(addr, flag):
    if addr is None:
        raise PreconditionError(f"missing {flag} address")
    return addr


# -- local harness ------------------------------------------------------------


PARTY_INPUTS = {
    "secmult": lambda x, y: {"P1": x, "P2": y, "TI": None},
    "np-ot": lambda m0, m1, v: {"P1": (m0, m1), "P2": v},
    "bit-ot": lambda m0, m1, b: {"P1": (m0, m1), "P2": b, "TI": None},
    "and-gate": lambda a, b: {"P1": a, "P2": b, "TI": None},
}


def party_inputs(protocol: str, inputs: tuple) -> dict[str, Any]:
    return PARTY_INPUTS[protocol](*inputs)


def run_local_session(
    protocol: str,
    inputs: tuple,
    q: int,
    seed: int = 0,
    p: Optional[int] = None,
    g: Optional[int] = None,
    session_id: int = 0,
    overrides: Optional[dict[str, dict]] = None,
    transcript_dir=None,
    timeout: float = 10.0,
) -> dict[str, SessionResult]:
    """Run every role of one session in threads over loopback TCP.

    ``overrides`` maps a role to SessionConfig field replacements (used to
    inject mismatched parameters).  Failed roles carry ``error``.
    """
    overrides = overrides or {}
    roles = ROLES[protocol]
    socks = {}
    for role in roles:
        if role in ("TI", "P1"):
            socks[role] = socket.create_server(("127.0.0.1", 0))
    addr = {role: s.getsockname()[:2] for role, s in socks.items()}
    per_role = party_inputs(protocol, inputs)
    configs = {}
    for role in roles:
        cfg = SessionConfig(
            role=role,
            protocol=protocol,
            q=q,
            seed=seed,
            input=per_role[role],
            p=p,
            g=g,
            session_id=session_id,
            connect=addr.get("P1") if role == "P2" else None,
            ti=addr.get("TI") if role != "TI" else None,
            listen_sock=socks.get(role),
            timeout=timeout,
            transcript=str(transcript_dir / f"{protocol}-{session_id}-{role}.mpct") if transcript_dir else None,
        )
        if role in overrides:
            cfg = replace(cfg, **overrides[role])
        configs[role] = cfg

    results: dict[str, SessionResult] = {}

    def worker(role):
        cfg = configs[role]
        try:
            results[role] = serve(cfg)
        except SessionAbort as exc:
            results[role] = SessionResult(role, None, Transcript(protocol, role, cfg.seed), error=exc)

    threads = [threading.Thread(target=worker, args=(r,), daemon=True) for r in roles]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout + 5)
    for role in roles:
        if role not in results:
            results[role] = SessionResult(role, None, Transcript(protocol, role, seed), error=SessionAbort(PEER_CLOSED, "hung"))
    return results


# -- in-memory scheduler ------------------------------------------------------


@dataclass
class PartyRun:
    role: str
    input: Any
    context: Context
    output: Any = None
    transcript: Optional[Transcript] = None


def execute_in_memory(
    protocol: str, inputs: tuple, q: int, seed: int = 0, group: Optional[Group] = None
) -> dict[str, PartyRun]:
    """Run all roles against each other through in-process byte queues."""
    if protocol == "np-ot" and group is None:
        group = schnorr_group(q)
    stype = C.SESSION_TYPES[protocol]
    per_role = party_inputs(protocol, inputs)
    runs, gens, pending = {}, {}, {}
    for role, fn in ROLES[protocol].items():
        ctx = make_context(protocol, role, q, seed, group)
        runs[role] = PartyRun(role, per_role[role], ctx)
        gens[role] = fn(ctx, per_role[role])
        pending[role] = gens[role].send(None)
    queues: dict[tuple[str, str], deque] = {}
    active = set(runs)
    while active:
        progressed = False
        for role in sorted(active):
            action = pending[role]
            if isinstance(action, Send):
                queues.setdefault((role, action.peer), deque()).append(
                    C.encode_frame(stype, action.tag, action.payload)
                )
                value = None
            else:
                q_in = queues.get((action.peer, role))
                if not q_in:
                    continue
                frame = C.decode_frame(q_in.popleft())
                if frame.tag != action.tag:
                    raise RuntimeError(f"{role} expected tag {action.tag:#04x}, got {frame.tag:#04x}")
                value = frame.payload
            progressed = True
            try:
                pending[role] = gens[role].send(value)
            except StopIteration as stop:
                runs[role].output = stop.value
                active.discard(role)
        if not progressed:
            raise RuntimeError(f"deadlock among {sorted(active)}")
    return runs


# -- views --------------------------------------------------------------------


def _party(party) -> str:
    return {1: "P1", 2: "P2"}.get(party, party)


def assemble_view(protocol: str, party, runs: dict[str, PartyRun]):
    """Build the analytic view tuple for ``party`` from executed runs."""
    from ..bitot_and import AndViewA, AndViewB, BitOtView1, BitOtView2
    from ..np_ot import NPReceiverView, NPSenderView
    from ..secmult import SecMultView1, SecMultView2

    party = _party(party)
    run = runs[party]
    rec, loc = run.context.received, run.context.local
    if protocol == "secmult":
        s1, s2 = runs["P1"].output, runs["P2"].output
        if party == "P1":
            return SecMultView1(run.input, rec["c1"], rec["d1"], rec["e1"], s1, s2)
        return SecMultView2(run.input, rec["c2"], rec["d2"], rec["e2"], s1, s2)
    if protocol == "np-ot":
        if party == "P1":
            m0, m1 = run.input
            return NPSenderView(m0, m1, rec["t1"], rec["t2"], rec["t3"], rec["t4"])
        return NPReceiverView(
            run.input, loc["a"], loc["b"], loc["c_alt"], rec["h0"], rec["e0"], rec["h1"], rec["e1"]
        )
    if party == "P1":
        if protocol == "bit-ot":
            m0, m1 = run.input
        else:
            m0, m1 = loc["u"], run.input ^ loc["u"]
        ot = BitOtView1(m0, m1, rec["r0"], rec["r1"], rec["e"])
        return ot if protocol == "bit-ot" else AndViewA(run.input, loc["u"], ot)
    ot = BitOtView2(run.input, rec["d"], rec["rd"], rec["f0"], rec["f1"])
    return ot if protocol == "bit-ot" else AndViewB(run.input, run.output, ot)


def sample_view(protocol: str, inputs: tuple, seed: int, party="P1", q: int = 2, group: Optional[Group] = None):
    """One draw of ``party``'s real view, seeded."""
    return assemble_view(protocol, party, execute_in_memory(protocol, inputs, q, seed, group))


# -- replay -------------------------------------------------------------------


@dataclass
class ReplayResult:
    ok: bool
    run: PartyRun
    reproduced: Transcript
    detail: str = ""


def replay(transcript: Transcript) -> ReplayResult:
    """Re-run the recorded role against its recorded incoming frames.

    The reproduced transcript must match the stored one byte for byte.
    """
    t = transcript
    hello = t.own_hello()
    group = schnorr_group(hello.q, hello.p, hello.g) if t.protocol == "np-ot" else None
    ctx = make_context(t.protocol, t.role, hello.q, t.seed, group)
    raw_input = t.local(INPUT)
    value = decode_input(t.protocol, t.role, raw_input if raw_input is not None else b"", ctx)
    out = Transcript(t.protocol, t.role, t.seed)
    out.add_local(INPUT, encode_input(t.protocol, t.role, value, ctx))

    records = [r for r in t.records if r.kind in (SENT, RECEIVED)]
    i = 0
    while i < len(records) and records[i].tag == C.HELLO:
        r = records[i]
        if r.kind == SENT:
            out.add(SENT, r.peer, C.encode_frame(t.session_type, C.HELLO, C.Hello.decode(r.payload).encode()))
        else:
            out.add(RECEIVED, r.peer, r.frame)
        i += 1
    inbox: dict[str, deque] = {}
    for r in records[i:]:
        if r.kind == RECEIVED:
            inbox.setdefault(r.peer, deque()).append(r)

    run = PartyRun(t.role, value, ctx, transcript=out)
    gen = ROLES[t.protocol][t.role](ctx, value)
    try:
        done, action = _step(gen, None)
        while not done:
            if isinstance(action, Send):
                out.add(SENT, action.peer, C.encode_frame(t.session_type, action.tag, action.payload))
                done, action = _step(gen, None)
            else:
                box = inbox.get(action.peer)
                if not box:
                    return ReplayResult(False, run, out, f"no recorded message from {action.peer}")
                r = box.popleft()
                out.add(RECEIVED, r.peer, r.frame)
                if r.tag != action.tag:
                    return ReplayResult(False, run, out, f"recorded tag {r.tag:#04x}, role wanted {action.tag:#04x}")
                done, action = _step(gen, r.payload)
    except SessionAbort as exc:
        return ReplayResult(False, run, out, str(exc))
    run.output = action
    out.add_local(OUTPUT, encode_output(t.protocol, action, ctx))
    same = out.to_bytes() == t.to_bytes()
    return ReplayResult(same, run, out, "" if same else "reproduced bytes differ")


def view_from_transcripts(transcripts: dict[str, Transcript], party):
    """Decode ``party``'s view from stored transcripts (secmult needs both parties)."""
    runs = {role: replay(t).run for role, t in transcripts.items()}
    return assemble_view(transcripts[_party(party)].protocol, party, runs)
