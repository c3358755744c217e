"""Single-bit OT with a trusted initializer, and the AND gate built on it.

Bit OT: the initializer gives P1 two random pads ``r0, r1`` and gives P2 a
random index ``d`` with the pad ``r_d``.  P2 sends ``e = b ^ d``; P1 answers
``f0 = m0 ^ r_e`` and ``f1 = m1 ^ r_(1-e)``; P2 unmasks ``m_b = f_b ^ r_d``.

AND gate: A samples its output share ``u`` and offers ``(u, a ^ u)`` to the OT;
B chooses with ``b`` and outputs what it receives, so ``u ^ m_b = a & b``.

Bits are Python bools throughout.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

from .dist import Dist, coin, mapd, program, pure

__all__ = [
    "AndViewA",
    "AndViewB",
    "BitOtInit",
    "BitOtView1",
    "BitOtView2",
    "and_execute",
    "and_messages",
    "and_real_view_a",
    "and_real_view_b",
    "and_sim_a",
    "and_sim_b",
    "bitot_execute",
    "bitot_init",
    "bitot_real_view1",
    "bitot_real_view2",
    "bitot_sim1",
    "bitot_sim2",
]


class BitOtInit(NamedTuple):
    r0: bool
    r1: bool
    d: bool

    @property
    def rd(self) -> bool:
        return self.r1 if self.d else self.r0


class BitOtView1(NamedTuple):
    m0: bool
    m1: bool
    r0: bool
    r1: bool
    e: bool


class BitOtView2(NamedTuple):
    b: bool
    d: bool
    rd: bool
    f0: bool
    f1: bool


class AndViewA(NamedTuple):
    a: bool
    u: bool
    ot: BitOtView1


class AndViewB(NamedTuple):
    b: bool
    mb: bool
    ot: BitOtView2


@program
def bitot_init():
    r0 = yield coin()
    r1 = yield coin()
    d = yield coin()
    return BitOtInit(r0, r1, d)


def _transcript(m0: bool, m1: bool, b: bool, t: BitOtInit):
    e = b ^ t.d
    re, r_not_e = (t.r1, t.r0) if e else (t.r0, t.r1)
    f0 = m0 ^ re
    f1 = m1 ^ r_not_e
    mb = (f1 if b else f0) ^ t.rd
    return e, f0, f1, mb


def bitot_execute(m0: bool, m1: bool, b: bool) -> Dist:
    """Receiver's output; always ``pure(m_b)``."""
    return mapd(lambda t: _transcript(m0, m1, b, t)[3], bitot_init())


def bitot_real_view1(m0: bool, m1: bool, b: bool) -> Dist:
    def view(t):
        e = _transcript(m0, m1, b, t)[0]
        return BitOtView1(m0, m1, t.r0, t.r1, e)

    return mapd(view, bitot_init())


def bitot_real_view2(m0: bool, m1: bool, b: bool) -> Dist:
    def view(t):
        _, f0, f1, _ = _transcript(m0, m1, b, t)
        return BitOtView2(b, t.d, t.rd, f0, f1)

    return mapd(view, bitot_init())


@program
def bitot_sim1(m0: bool, m1: bool):
    r0 = yield coin()
    r1 = yield coin()
    e = yield coin()
    return BitOtView1(m0, m1, r0, r1, e)


@program
def bitot_sim2(b: bool, mb: bool):
    d = yield coin()
    rd = yield coin()
    f_other = yield coin()
    f_chosen = mb ^ rd
    f0, f1 = (f_other, f_chosen) if b else (f_chosen, f_other)
    return BitOtView2(b, d, rd, f0, f1)


# -- AND gate ---------------------------------------------------------------


def and_messages(a: bool, u: bool) -> tuple[bool, bool]:
    """A's OT inputs for output share ``u``."""
    return u, a ^ u


def and_execute(a: bool, b: bool) -> Dist:
    """Joint output (u, m_b)."""

    @program
    def prog():
        u = yield coin()
        m0, m1 = and_messages(a, u)
        mb = yield bitot_execute(m0, m1, b)
        return u, mb

    return prog()


def and_real_view_a(a: bool, b: bool, ot_view: Callable[..., Dist] | None = None) -> Dist:
    """A's view; ``ot_view(m0, m1, b)`` replaces the embedded OT view if given."""
    ot_view = ot_view or bitot_real_view1

    @program
    def prog():
        u = yield coin()
        m0, m1 = and_messages(a, u)
        r = yield ot_view(m0, m1, b)
        return AndViewA(a, u, r)

    return prog()


@program
def and_sim_a(a: bool):
    u = yield coin()
    m0, m1 = and_messages(a, u)
    r = yield bitot_sim1(m0, m1)
    return AndViewA(a, u, r)


@program
def and_real_view_b(a: bool, b: bool):
    u = yield coin()
    m0, m1 = and_messages(a, u)
    t = yield bitot_init()
    _, f0, f1, mb = _transcript(m0, m1, b, t)
    return AndViewB(b, mb, BitOtView2(b, t.d, t.rd, f0, f1))


@program
def and_sim_b(b: bool):
    # B's output share is uniform on its own, so the simulator draws it.
    mb = yield coin()
    r = yield bitot_sim2(b, mb)
    return AndViewB(b, mb, r)


def and_functionality(a: bool, b: bool) -> Dist:
    return pure(a and b)
