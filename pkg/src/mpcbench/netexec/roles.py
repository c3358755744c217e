"""Party programs as generator state machines.

A role yields :class:`Send` and :class:`Recv` requests and is resumed with
the received payload, so the same code runs over sockets, an in-memory
scheduler, or a transcript replay.  Local randomness is drawn from the
context's PRNG and recorded in ``ctx.local``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Generator, NamedTuple, Optional

from ..algebra import Group, GroupElem
from . import codec as C
from .rng import CounterRng


class Send(NamedTuple):
    peer: str
    tag: int
    payload: bytes


class Recv(NamedTuple):
    peer: str
    tag: int


class ProtocolCheckFailed(Exception):
    pass


@dataclass
class Context:
    q: int
    rng: CounterRng
    group: Optional[Group] = None
    local: dict = field(default_factory=dict)
    received: dict = field(default_factory=dict)

    def draw(self, name: str, n: int) -> int:
        x = self.rng.below(n)
        self.local[name] = x
        return x

    def coin(self, name: str) -> bool:
        b = self.rng.bit()
        self.local[name] = b
        return b


Role = Generator[Any, bytes, Any]


# -- secure multiplication ---------------------------------------------------


def secmult_ti(ctx: Context, _input=None) -> Role:
    q = ctx.q
    a, b, r = ctx.draw("a", q), ctx.draw("b", q), ctx.draw("r", q)
    yield Send("P1", C.SM_SHARES_P1, C.encode_field(a, q) + C.encode_field(r, q))
    yield Send("P2", C.SM_SHARES_P2, C.encode_field(b, q) + C.encode_field((a * b - r) % q, q))
    return None


def secmult_p1(ctx: Context, x: int) -> Role:
    q = ctx.q
    c1, d1 = C.fields((yield Recv("TI", C.SM_SHARES_P1)), q)
    ctx.received.update(c1=c1, d1=d1)
    yield Send("P2", C.SM_E2, C.encode_field((x + c1) % q, q))
    (e1,) = C.fields((yield Recv("P2", C.SM_E1)), q)
    ctx.received["e1"] = e1
    return (x * e1 - d1) % q


def secmult_p2(ctx: Context, y: int) -> Role:
    q = ctx.q
    c2, d2 = C.fields((yield Recv("TI", C.SM_SHARES_P2)), q)
    ctx.received.update(c2=c2, d2=d2)
    (e2,) = C.fields((yield Recv("P1", C.SM_E2)), q)
    ctx.received["e2"] = e2
    yield Send("P1", C.SM_E1, C.encode_field((y - c2) % q, q))
    return (e2 * c2 - d2) % q


# -- Naor-Pinkas OT (P1 sender, P2 receiver) ---------------------------------


def npot_receiver(ctx: Context, v: int) -> Role:
    G, q = ctx.group, ctx.q
    a, b = ctx.draw("a", q), ctx.draw("b", q)
    ab = a * b % q
    while True:
        c_alt = ctx.rng.below(q)
        if c_alt != ab:
            break
    ctx.local["c_alt"] = c_alt
    c0, c1 = (ab, c_alt) if v == 0 else (c_alt, ab)
    query = b"".join(C.encode_group(G.pow(e)) for e in (a, b, c0, c1))
    yield Send("P1", C.NP_QUERY, query)
    h0, e0, h1, e1 = C.group_elems((yield Recv("P1", C.NP_CIPHERTEXTS)), G)
    ctx.received.update(h0=h0, e0=e0, h1=h1, e1=e1)
    h, e = (h0, e0) if v == 0 else (h1, e1)
    return e * (h ** b).inverse()


def npot_sender(ctx: Context, messages: tuple[GroupElem, GroupElem]) -> Role:
    G, q = ctx.group, ctx.q
    X, Y, Z0, Z1 = C.group_elems((yield Recv("P2", C.NP_QUERY)), G)
    ctx.received.update(t1=X, t2=Y, t3=Z0, t4=Z1)
    if Z0 == Z1:
        raise ProtocolCheckFailed("receiver sent z0 == z1")
    out = b""
    for i, (m, Z) in enumerate(zip(messages, (Z0, Z1))):
        # DDH self-reduction of (g, X, Y, Z) with a unit multiplier
        t = 1 + ctx.draw(f"t{i}", q - 1)
        s = ctx.draw(f"s{i}", q)
        h = (X * G.pow(s)) ** t
        z = (Z * Y ** s) ** t
        out += C.encode_group(h) + C.encode_group(m * z)
    yield Send("P2", C.NP_CIPHERTEXTS, out)
    return None


# -- bit OT with a trusted initializer ---------------------------------------


def bitot_ti(ctx: Context, _input=None) -> Role:
    r0, r1, d = ctx.coin("r0"), ctx.coin("r1"), ctx.coin("d")
    yield Send("P1", C.OT_PADS_P1, C.encode_bit(r0) + C.encode_bit(r1))
    yield Send("P2", C.OT_PADS_P2, C.encode_bit(d) + C.encode_bit(r1 if d else r0))
    return None


def bitot_sender(ctx: Context, messages: tuple[bool, bool]) -> Role:
    m0, m1 = messages
    r0, r1 = C.bits((yield Recv("TI", C.OT_PADS_P1)))
    (e,) = C.bits((yield Recv("P2", C.OT_E)))
    ctx.received.update(r0=r0, r1=r1, e=e)
    r = (r0, r1)
    f0, f1 = m0 ^ r[e], m1 ^ r[1 - e]
    yield Send("P2", C.OT_F, C.encode_bit(f0) + C.encode_bit(f1))
    return None


def bitot_receiver(ctx: Context, b: bool) -> Role:
    d, rd = C.bits((yield Recv("TI", C.OT_PADS_P2)))
    ctx.received.update(d=d, rd=rd)
    yield Send("P1", C.OT_E, C.encode_bit(b ^ d))
    f0, f1 = C.bits((yield Recv("P1", C.OT_F)))
    ctx.received.update(f0=f0, f1=f1)
    return (f1 if b else f0) ^ rd


# -- AND gate over the bit OT -------------------------------------------------


def and_p1(ctx: Context, a: bool) -> Role:
    u = ctx.coin("u")
    yield from bitot_sender(ctx, (u, a ^ u))
    return u


def and_p2(ctx: Context, b: bool) -> Role:
    return (yield from bitot_receiver(ctx, b))


ROLES: dict[str, dict[str, Callable[[Context, Any], Role]]] = {
    "secmult": {"TI": secmult_ti, "P1": secmult_p1, "P2": secmult_p2},
    "np-ot": {"P1": npot_sender, "P2": npot_receiver},
    "bit-ot": {"TI": bitot_ti, "P1": bitot_sender, "P2": bitot_receiver},
    "and-gate": {"TI": bitot_ti, "P1": and_p1, "P2": and_p2},
}


def roles_for(protocol: str) -> tuple[str, ...]:
    return tuple(ROLES[protocol])


# -- input / output payloads (transcript records only) ------------------------


def encode_input(protocol: str, role: str, value, ctx: Context) -> bytes:
    if role == "TI" or value is None:
        return b""
    if protocol == "secmult":
        return C.encode_field(value, ctx.q)
    if protocol == "np-ot":
        if role == "P1":
            return b"".join(C.encode_group(m) for m in value)
        return C.encode_bit(bool(value))
    if role == "P1" and protocol == "bit-ot":
        return b"".join(C.encode_bit(m) for m in value)
    return C.encode_bit(value)


def decode_input(protocol: str, role: str, data: bytes, ctx: Context):
    if role == "TI":
        return None
    if protocol == "secmult":
        return C.decode_field(data, ctx.q)
    if protocol == "np-ot":
        if role == "P1":
            return tuple(C.group_elems(data, ctx.group))
        return int(C.decode_bit(data))
    if role == "P1" and protocol == "bit-ot":
        return tuple(C.bits(data))
    return C.decode_bit(data)


def encode_output(protocol: str, value, ctx: Context) -> bytes:
    if value is None:
        return b""
    if protocol == "secmult":
        return C.encode_field(value, ctx.q)
    if protocol == "np-ot":
        return C.encode_group(value)
    return C.encode_bit(value)
