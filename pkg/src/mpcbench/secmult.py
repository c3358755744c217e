"""Secure multiplication with a trusted initializer.

The initializer hands P1 ``(c1, d1) = (a, r)`` and P2 ``(c2, d2) = (b, ab - r)``.
P1 sends ``e2 = x + c1``, P2 sends ``e1 = y - c2``, and the parties finish with
additive shares ``s1 = x*e1 - d1`` and ``s2 = e2*c2 - d2`` of ``x*y mod q``.

Field values are plain ints reduced mod ``q``.
"""

from __future__ import annotations

from typing import NamedTuple

from .dist import Dist, mapd, program, uniform

__all__ = [
    "SecMultView1",
    "SecMultView2",
    "TripleShares",
    "functionality",
    "protocol",
    "real_view1",
    "real_view2",
    "sim_view1",
    "sim_view2",
    "trusted_init",
]


class TripleShares(NamedTuple):
    c1: int
    d1: int
    c2: int
    d2: int


class SecMultView1(NamedTuple):
    x: int
    c1: int
    d1: int
    e1: int
    s1: int
    s2: int


class SecMultView2(NamedTuple):
    y: int
    c2: int
    d2: int
    e2: int
    s1: int
    s2: int


def functionality(q: int, x: int, y: int) -> Dist:
    """(s1, x*y - s1) with s1 uniform."""
    return mapd(lambda s1: (s1, (x * y - s1) % q), uniform(q))


@program
def trusted_init(q: int):
    a = yield uniform(q)
    b = yield uniform(q)
    r = yield uniform(q)
    return TripleShares(a, r, b, (a * b - r) % q)


def _run(q: int, x: int, y: int, t: TripleShares):
    e2 = (x + t.c1) % q
    e1 = (y - t.c2) % q
    s1 = (x * e1 - t.d1) % q
    s2 = (e2 * t.c2 - t.d2) % q
    return e1, e2, s1, s2


def protocol(q: int, x: int, y: int) -> Dist:
    """Joint output (s1, s2) of an honest execution."""
    return mapd(lambda t: _run(q, x, y, t)[2:], trusted_init(q))


def real_view1(q: int, x: int, y: int) -> Dist:
    def view(t: TripleShares) -> SecMultView1:
        e1, _, s1, s2 = _run(q, x, y, t)
        return SecMultView1(x, t.c1, t.d1, e1, s1, s2)

    return mapd(view, trusted_init(q))


def real_view2(q: int, x: int, y: int) -> Dist:
    def view(t: TripleShares) -> SecMultView2:
        _, e2, s1, s2 = _run(q, x, y, t)
        return SecMultView2(y, t.c2, t.d2, e2, s1, s2)

    return mapd(view, trusted_init(q))


@program
def sim_view1(q: int, x: int, y: int):
    # s1 is drawn here as the functionality's first output; y only enters
    # through the functionality's second output s2.
    c1 = yield uniform(q)
    e1 = yield uniform(q)
    s1 = yield uniform(q)
    d1 = (x * e1 - s1) % q
    s2 = (x * y - s1) % q
    return SecMultView1(x, c1, d1, e1, s1, s2)


@program
def sim_view2(q: int, x: int, y: int):
    c2 = yield uniform(q)
    e2 = yield uniform(q)
    s2 = yield uniform(q)
    d2 = (e2 * c2 - s2) % q
    s1 = (x * y - s2) % q
    return SecMultView2(y, c2, d2, e2, s1, s2)
