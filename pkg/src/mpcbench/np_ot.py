"""Naor-Pinkas 1-out-of-2 oblivious transfer.

Receiver (choice bit ``v``) picks ``a, b``, sets ``c_v = ab`` and a random
``c_(1-v) != ab``, and sends ``(g^a, g^b, g^c0, g^c1)``.  The sender
re-randomizes ``(g, g^a, g^b, g^ci)`` with the DDH self-reduction and returns
``CT_i = (h_i, m_i * z_i')`` where ``h_i`` is the randomized second component
and ``z_i'`` the fourth.  Only ``CT_v`` satisfies ``z_v' = h_v^b``, so the
receiver recovers ``m_v = c_v * (h_v^b)^-1``.

Every program takes a ``convention`` for the self-reduction: ``"raw"`` runs
:func:`~mpcbench.algebra.ddh_sr` (unit-sampling), ``"simplified"`` substitutes
the triple / non-triple programs, and ``"full"`` runs the raw formula with
the multiplier drawn from all of ``Z_q``.
"""

from __future__ import annotations

import functools
import random
from fractions import Fraction
from typing import Callable, NamedTuple

from .algebra import Group, GroupElem, ddh_rand, ddh_real, ddh_sr, ddh_sr_simplified
from .dist import Dist, assert_guard, bind, mapd, product, program, pure, uniform, uniform_over

__all__ = [
    "CONVENTIONS",
    "Ciphertext",
    "NPMessages",
    "NPReceiverView",
    "NPSenderView",
    "Distinguisher",
    "adv1",
    "adv2",
    "adversarial_family",
    "constant_distinguisher",
    "ddh_advantage",
    "np_execute",
    "random_distinguishers",
    "receiver_real_view",
    "receiver_sim_view",
    "reduction_identity",
    "self_reduce",
    "sender_real_view",
    "sender_sim_view",
]

CONVENTIONS = ("raw", "simplified", "full")


class NPMessages(NamedTuple):
    m0: GroupElem
    m1: GroupElem


class Ciphertext(NamedTuple):
    h: GroupElem
    c: GroupElem


class NPReceiverView(NamedTuple):
    v: int
    a: int
    b: int
    c_alt: int
    h0: GroupElem
    e0: GroupElem
    h1: GroupElem
    e1: GroupElem


class NPSenderView(NamedTuple):
    m0: GroupElem
    m1: GroupElem
    t1: GroupElem
    t2: GroupElem
    t3: GroupElem
    t4: GroupElem


Distinguisher = Callable[[NPSenderView], Dist]


def self_reduce(G: Group, x: int, y: int, z: int, convention: str = "raw") -> Dist:
    if convention == "raw":
        return ddh_sr(G, x, y, z)
    if convention == "simplified":
        return ddh_sr_simplified(G, x, y, z)
    if convention == "full":
        return ddh_sr(G, x, y, z, units=False)
    raise ValueError(f"unknown self-reduction convention {convention!r}")


def _choices(v: int, ab: int, c_alt: int) -> tuple[int, int]:
    return (ab, c_alt) if v == 0 else (c_alt, ab)


def np_execute(G: Group, m0: GroupElem, m1: GroupElem, v: int, convention: str = "raw") -> Dist:
    """Receiver's decrypted output over all protocol randomness."""
    q = G.q

    @program
    def prog():
        a = yield uniform(q)
        b = yield uniform(q)
        ab = a * b % q
        c_alt = yield uniform_over(set(range(q)) - {ab})
        c0, c1 = _choices(v, ab, c_alt)
        _, h0, _, z0 = yield self_reduce(G, a, b, c0, convention)
        _, h1, _, z1 = yield self_reduce(G, a, b, c1, convention)
        cts = (Ciphertext(h0, m0 * z0), Ciphertext(h1, m1 * z1))
        ct = cts[v]
        return ct.c * (ct.h ** b).inverse()

    return prog()


@functools.lru_cache(maxsize=None)
def _receiver_keys(q: int) -> Dist:
    """(a, b, c_alt) with the c_alt != ab assertion applied."""

    @program
    def prog():
        a = yield uniform(q)
        b = yield uniform(q)
        c_alt = yield uniform(q)
        yield assert_guard(c_alt != a * b % q)
        return a, b, c_alt

    return prog()


def receiver_real_view(
    G: Group, m0: GroupElem, m1: GroupElem, v: int, convention: str = "raw"
) -> Dist:
    q = G.q

    def rest(keys):
        a, b, c_alt = keys
        c0, c1 = _choices(v, a * b % q, c_alt)
        sr1 = self_reduce(G, a, b, c1, convention)
        return bind(
            self_reduce(G, a, b, c0, convention),
            lambda o0: mapd(
                lambda o1: NPReceiverView(v, a, b, c_alt, o0[1], o0[3] * m0, o1[1], o1[3] * m1),
                sr1,
            ),
        )

    return bind(_receiver_keys(q), rest)


def receiver_sim_view(G: Group, v: int, mv: GroupElem) -> Dist:
    """Simulated receiver view from the choice bit and the received message."""
    q = G.q
    elems = [G.pow(w) for w in range(q)]
    pads = product(uniform(q), uniform(q))

    def rest(keys):
        a, b, c_alt = keys

        def view(w_pad):
            w, (h_o, e_o) = w_pad
            hv = elems[w]
            pair_v = (hv, hv ** b * mv)
            pair_other = (elems[h_o], elems[e_o])
            (h0, e0), (h1, e1) = (pair_v, pair_other) if v == 0 else (pair_other, pair_v)
            return NPReceiverView(v, a, b, c_alt, h0, e0, h1, e1)

        return mapd(view, product(uniform(q), pads))

    return bind(_receiver_keys(q), rest)


def sender_real_view(G: Group, m0: GroupElem, m1: GroupElem, v: int) -> Dist:
    q = G.q

    @program
    def prog():
        a = yield uniform(q)
        b = yield uniform(q)
        c_alt = yield uniform(q)
        ab = a * b % q
        yield assert_guard(c_alt != ab)
        c0, c1 = _choices(v, ab, c_alt)
        return NPSenderView(m0, m1, G.pow(a), G.pow(b), G.pow(c0), G.pow(c1))

    return prog()


def sender_sim_view(G: Group, m0: GroupElem, m1: GroupElem) -> Dist:
    q = G.q

    @program
    def prog():
        a = yield uniform(q)
        b = yield uniform(q)
        c = yield uniform(q)
        ab = a * b % q
        yield assert_guard(c != ab)
        return NPSenderView(m0, m1, G.pow(a), G.pow(b), G.pow(ab), G.pow(c))

    return prog()


# -- DDH reduction ----------------------------------------------------------


def _adversary(G: Group, D: Distinguisher, m0, m1, position: int) -> Callable[[tuple], Dist]:
    if position not in (3, 4):
        raise ValueError("fresh element goes in position 3 or 4")

    def A(triple) -> Dist:
        alpha, beta, gamma = triple

        @program
        def prog():
            c = yield uniform(G.q)
            fresh = G.pow(c)
            # the sender's z0 != z1 check
            yield assert_guard(fresh != gamma)
            if position == 3:
                view = NPSenderView(m0, m1, alpha, beta, fresh, gamma)
            else:
                view = NPSenderView(m0, m1, alpha, beta, gamma, fresh)
            return (yield D(view))

        return prog()

    return A


def adv1(G: Group, D: Distinguisher, m0, m1) -> Callable[[tuple], Dist]:
    """DDH adversary feeding D ``(alpha, beta, g^c, gamma)``."""
    return _adversary(G, D, m0, m1, 3)


def adv2(G: Group, D: Distinguisher, m0, m1, position: int = 4) -> Callable[[tuple], Dist]:
    """DDH adversary feeding D ``(alpha, beta, gamma, g^c)``."""
    return _adversary(G, D, m0, m1, position)


def _accept(d: Dist) -> Fraction:
    return d.mass(True)


def ddh_advantage(G: Group, A: Callable[[tuple], Dist]) -> Fraction:
    """Pr[A(real triple) = 1] - Pr[A(random triple) = 1], signed."""
    return _accept(bind(ddh_real(G), A)) - _accept(bind(ddh_rand(G), A))


def reduction_identity(
    G: Group, D: Distinguisher, m0: GroupElem, m1: GroupElem, adv2_position: int = 4
) -> tuple[Fraction, Fraction, Fraction]:
    """(lhs, adv1, adv2) for the v = 1 sender case; expect lhs == adv1 - adv2."""
    lhs = _accept(bind(sender_real_view(G, m0, m1, 1), D)) - _accept(
        bind(sender_sim_view(G, m0, m1), D)
    )
    a1 = ddh_advantage(G, adv1(G, D, m0, m1))
    a2 = ddh_advantage(G, adv2(G, D, m0, m1, adv2_position))
    return lhs, a1, a2


# -- distinguishers ---------------------------------------------------------


def constant_distinguisher(bit: bool = False) -> Distinguisher:
    return lambda view: pure(bit)


def random_distinguishers(G: Group, n: int, seed: int) -> list[tuple[str, Distinguisher]]:
    """``n`` seeded random distinguishers over sender-view 4-tuples.

    The first is the constant-0 distinguisher.  The rest accept each tuple
    with a probability in {0, 1/4, 1/2, 3/4, 1} drawn from a seeded table.
    """
    rng = random.Random(seed)
    out: list[tuple[str, Distinguisher]] = []
    if n >= 1:
        out.append(("const0", constant_distinguisher(False)))
    elems = [h.value for h in G.elements()]
    for i in range(1, n):
        table = {}
        for t1 in elems:
            for t2 in elems:
                for t3 in elems:
                    for t4 in elems:
                        table[(t1, t2, t3, t4)] = rng.randrange(5)
        out.append((f"rand{i}", _table_distinguisher(table)))
    return out


def _table_distinguisher(table: dict) -> Distinguisher:
    def D(view: NPSenderView) -> Dist:
        k = table[(view.t1.value, view.t2.value, view.t3.value, view.t4.value)]
        return _bernoulli(Fraction(k, 4))

    return D


def _bernoulli(p: Fraction) -> Dist:
    return Dist({True: p, False: 1 - p})


def adversarial_family(G: Group) -> list[tuple[str, Distinguisher]]:
    """Projections, equality tests and (exponent backend only) dlog tests."""
    one = G.identity
    fam: list[tuple[str, Distinguisher]] = [
        ("const1", constant_distinguisher(True)),
        ("t1_is_identity", lambda w: pure(w.t1 == one)),
        ("t3_is_identity", lambda w: pure(w.t3 == one)),
        ("t4_is_identity", lambda w: pure(w.t4 == one)),
        ("t3_eq_t4", lambda w: pure(w.t3 == w.t4)),
        ("t3_lt_t4", lambda w: pure(w.t3 < w.t4)),
        ("m0_masks_t3", lambda w: pure(w.t3 * w.m0 == w.m1)),
    ]
    if G.backend == "exponent":
        fam += [
            ("t3_is_dh", lambda w: pure(w.t3 == w.t1 ** G.dlog(w.t2))),
            ("t4_is_dh", lambda w: pure(w.t4 == w.t1 ** G.dlog(w.t2))),
            ("t3_dh_and_not_t4", lambda w: pure(w.t3 == w.t1 ** G.dlog(w.t2) != w.t4)),
        ]
    return fam
