"""Deliberately broken protocol variants.

Each one changes a single line of an honest program.  The checks must notice
every one of them, otherwise a passing suite says nothing.
"""

from mpcbench import bitot_and as ba
from mpcbench import secmult
from mpcbench.bitot_and import AndViewA, BitOtView2
from mpcbench.dist import coin, mapd, program, uniform
from mpcbench.np_ot import Ciphertext, _choices, self_reduce
from mpcbench.secmult import SecMultView1


# -- secure multiplication --------------------------------------------------


def secmult_protocol_sign_flip(q, x, y):
    """P1 adds d1 instead of subtracting it."""

    def out(t):
        e1 = (y - t.c2) % q
        e2 = (x + t.c1) % q
        return (x * e1 + t.d1) % q, (e2 * t.c2 - t.d2) % q

    return mapd(out, secmult.trusted_init(q))


def secmult_real_view1_leaky(q, x, y):
    """The initializer reuses a as the mask r, so d1 = c1."""

    def view(t):
        a = t.c1
        e1 = (y - t.c2) % q
        s1 = (x * e1 - a) % q
        return SecMultView1(x, a, a, e1, s1, (x * y - s1) % q)

    return mapd(view, secmult.trusted_init(q))


# -- Naor-Pinkas --------------------------------------------------------------


def np_execute_wrong_key(G, m0, m1, v, convention="raw"):
    """Receiver strips the pad with a instead of b."""
    from mpcbench.dist import uniform_over

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
        ct = (Ciphertext(h0, m0 * z0), Ciphertext(h1, m1 * z1))[v]
        return ct.c * (ct.h ** a).inverse()

    return prog()


def np_receiver_view_no_rerandomize(G, m0, m1, v, convention="raw"):
    """Sender skips the self-reduction and encrypts under g^c directly."""
    from mpcbench.np_ot import NPReceiverView, _receiver_keys

    q = G.q

    def view(keys):
        a, b, c_alt = keys
        c0, c1 = _choices(v, a * b % q, c_alt)
        return NPReceiverView(v, a, b, c_alt, G.pow(a), G.pow(c0) * m0, G.pow(a), G.pow(c1) * m1)

    return mapd(view, _receiver_keys(q))


# -- bit OT and AND -------------------------------------------------------------


def bitot_execute_same_pad(m0, m1, b):
    """Both messages masked with r_e."""

    def out(t):
        e = b ^ t.d
        re = t.r1 if e else t.r0
        f0, f1 = m0 ^ re, m1 ^ re
        return (f1 if b else f0) ^ t.rd

    return mapd(out, ba.bitot_init())


def bitot_real_view2_same_pad(m0, m1, b):
    def view(t):
        e = b ^ t.d
        re = t.r1 if e else t.r0
        return BitOtView2(b, t.d, t.rd, m0 ^ re, m1 ^ re)

    return mapd(view, ba.bitot_init())


def and_messages_negated(a, u):
    """Negated-share messages; the output shares then xor to NAND."""
    return (not u), a ^ (not u)


def and_execute_negated(a, b):
    @program
    def prog():
        u = yield coin()
        m0, m1 = and_messages_negated(a, u)
        mb = yield ba.bitot_execute(m0, m1, b)
        return u, mb

    return prog()


def and_real_view_a_leaky(a, b):
    """A's embedded OT view carries B's bit in place of e."""

    @program
    def prog():
        u = yield coin()
        m0, m1 = ba.and_messages(a, u)
        t = yield ba.bitot_init()
        return AndViewA(a, u, ba.BitOtView1(m0, m1, t.r0, t.r1, b))

    return prog()
