"""Named check suites and the program registry used by the CLI.

Each suite turns one security parameter into a list of :class:`CheckReport`.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product as iproduct
from math import gcd
from typing import Callable

from . import bitot_and as ba
from . import np_ot, secmult
from .algebra import (
    Group,
    ddh_rand,
    ddh_real,
    ddh_sr,
    ddh_sr_non_triple,
    ddh_sr_simplified,
    ddh_sr_triple,
    exponent_group,
    schnorr_group,
)
from .dist import (
    Dist,
    bind,
    coin,
    mapd,
    pure,
    scale,
    tv_distance,
    uniform,
    weight,
)
from .secframe import (
    FAIL,
    PERFECT,
    CheckReport,
    Ensemble,
    InputVerdict,
    SecurityParam,
    check_correctness,
    check_perfect,
    check_statistical,
)

__all__ = ["PROGRAMS", "SUITES", "make_param", "run_suite"]

SUITE_NAMES = ("dist-laws", "secmult", "np-receiver", "np-sender", "bit-ot", "and-gate")
BITS = (False, True)


def make_param(q: int, backend: str = "exponent") -> SecurityParam:
    G = schnorr_group(q) if backend == "schnorr" else exponent_group(q)
    return SecurityParam(q, G)


# -- dist laws --------------------------------------------------------------


def _random_dist(rng: random.Random, size: int = 4) -> Dist:
    ws = [rng.randint(1, 6) for _ in range(size)]
    total = sum(ws) + rng.randint(0, 3)
    masses: dict = {}
    for w in ws:
        v = rng.randrange(10)
        masses[v] = masses.get(v, 0) + Fraction(w, total)
    return Dist(masses)


def _law_pairs(q: int, rng: random.Random, permutations: int):
    """Yield (law name, left, right) triples; every pair must be equal."""
    # monad laws and commutativity over random small distributions
    for i in range(20):
        d, e = _random_dist(rng), _random_dist(rng)
        table = {v: _random_dist(rng) for v in range(10)}
        table2 = {v: _random_dist(rng) for v in range(10)}
        k, h = table.__getitem__, table2.__getitem__
        v = rng.randrange(10)
        yield "left-identity", bind(pure(v), k), k(v)
        yield "right-identity", bind(d, pure), d
        yield "associativity", bind(bind(d, k), h), bind(d, lambda x: bind(k(x), h))
        yield "commutativity", bind(d, lambda x: bind(e, lambda y: pure((x, 2 * y + x)))), bind(
            e, lambda y: bind(d, lambda x: pure((x, 2 * y + x)))
        )
        yield "bind-const", bind(d, lambda _: e), scale(weight(d), e)
    yield "constant-cancels", bind(uniform(q), lambda _: uniform(2)), uniform(2)
    yield "bind-const", bind(scale(Fraction(1, 3), pure(0)), lambda _: uniform(2)), Dist(
        {0: Fraction(1, 6), 1: Fraction(1, 6)}
    )
    for _ in range(permutations):
        perm = list(range(q))
        rng.shuffle(perm)
        yield "uniform-permutation", mapd(perm.__getitem__, uniform(q)), uniform(q)
    for y in range(q):
        yield "otp-sub", mapd(lambda b: (y - b) % q, uniform(q)), uniform(q)
        yield "otp-add", mapd(lambda b: (y + b) % q, uniform(q)), uniform(q)
        for x in range(1, q):
            if gcd(x, q) == 1:
                yield "otp-affine", mapd(lambda b: (y + x * b) % q, uniform(q)), uniform(q)
    for c in BITS:
        yield "otp-xor", mapd(lambda r: c ^ r, coin()), coin()


def dist_laws(param: SecurityParam, seed: int = 0, permutations: int = 200) -> list[CheckReport]:
    rng = random.Random(seed)
    worst: dict[str, Fraction] = {}
    for name, left, right in _law_pairs(param.q, rng, permutations):
        tv = Fraction(0) if left == right else tv_distance(left, right)
        worst[name] = max(worst.get(name, Fraction(0)), tv)
    report = CheckReport("dist-laws", f"q={param.q}", kind="perfect", bound=Fraction(0))
    for name in sorted(worst):
        tv = worst[name]
        report.per_input.append(InputVerdict(name, PERFECT if tv == 0 else FAIL, tv))
    return [report]


# -- secmult ----------------------------------------------------------------


def _pairs_domain(p: SecurityParam):
    return list(iproduct(range(p.q), repeat=2))


def secmult_ensembles() -> dict[str, Ensemble]:
    def E(name, f):
        return Ensemble(lambda xy, p: f(p.q, *xy), _pairs_domain, name)

    return {
        "real1": E("secmult.real1", secmult.real_view1),
        "sim1": E("secmult.sim1", secmult.sim_view1),
        "real2": E("secmult.real2", secmult.real_view2),
        "sim2": E("secmult.sim2", secmult.sim_view2),
        "protocol": E("secmult.protocol", secmult.protocol),
        "functionality": E("secmult.functionality", secmult.functionality),
        "real1_outputs": E(
            "secmult.real1.outputs",
            lambda q, x, y: mapd(lambda w: (w.s1, w.s2), secmult.real_view1(q, x, y)),
        ),
        "real2_outputs": E(
            "secmult.real2.outputs",
            lambda q, x, y: mapd(lambda w: (w.s1, w.s2), secmult.real_view2(q, x, y)),
        ),
        "product": E("secmult.product", lambda q, x, y: pure(x * y % q)),
    }


def secmult_suite(param: SecurityParam, **_) -> list[CheckReport]:
    e = secmult_ensembles()
    q = param.q
    return [
        check_perfect(e["real1"], e["sim1"], param, "secmult.party1"),
        check_perfect(e["real2"], e["sim2"], param, "secmult.party2"),
        check_perfect(e["real1_outputs"], e["functionality"], param, "secmult.outputs1"),
        check_perfect(e["real2_outputs"], e["functionality"], param, "secmult.outputs2"),
        check_correctness(
            e["protocol"], e["product"], param, project=lambda s: sum(s) % q, suite="secmult.correctness"
        ),
    ]


# -- Naor-Pinkas ------------------------------------------------------------


def _np_domain(p: SecurityParam):
    elems = p.group.elements()
    return [(m0, m1, v) for m0 in elems for m1 in elems for v in (0, 1)]


def _msg_domain(p: SecurityParam):
    elems = p.group.elements()
    return [(m0, m1) for m0 in elems for m1 in elems]


def np_receiver_suite(param: SecurityParam, convention: str = "raw", **_) -> list[CheckReport]:
    G = param.group
    real = Ensemble(
        lambda i, p: np_ot.receiver_real_view(p.group, i[0], i[1], i[2], convention),
        _np_domain,
        "npot.real_receiver",
    )
    sim = Ensemble(
        lambda i, p: np_ot.receiver_sim_view(p.group, i[2], i[i[2]]), _np_domain, "npot.sim_receiver"
    )
    if convention == "simplified":
        views = check_perfect(real, sim, param, "np-receiver.views", convention)
    else:
        views = check_statistical(
            real, sim, param, Fraction(1, G.q), "np-receiver.views", convention
        )
    out = Ensemble(
        lambda i, p: np_ot.np_execute(p.group, i[0], i[1], i[2], convention), _np_domain, "npot.execute"
    )
    want = Ensemble(lambda i, p: pure(i[i[2]]), _np_domain, "npot.functionality")
    correct = check_correctness(out, want, param, suite="np-receiver.correctness")
    correct.convention = convention
    return [views, correct]


def np_sender_suite(
    param: SecurityParam, distinguishers: int = 100, seed: int = 0, **_
) -> list[CheckReport]:
    G = param.group
    real0 = Ensemble(
        lambda i, p: np_ot.sender_real_view(p.group, i[0], i[1], 0), _msg_domain, "npot.real_sender0"
    )
    sim = Ensemble(
        lambda i, p: np_ot.sender_sim_view(p.group, i[0], i[1]), _msg_domain, "npot.sim_sender"
    )
    v0 = check_perfect(real0, sim, param, "np-sender.v0")
    red = reduction_report(G, distinguishers, seed)
    return [v0, red]


def reduction_report(
    G: Group, distinguishers: int, seed: int, adv2_position: int = 4, m: tuple | None = None
) -> CheckReport:
    """Check lhs == adv1 - adv2 for every distinguisher; the tv slot holds |lhs|."""
    m0, m1 = m or (G.pow(1), G.pow(2))
    report = CheckReport("np-sender.reduction", str(G), f"seed={seed}", kind="reduction")
    family = np_ot.adversarial_family(G) + np_ot.random_distinguishers(G, distinguishers, seed)
    real1 = np_ot.sender_real_view(G, m0, m1, 1)
    sim = np_ot.sender_sim_view(G, m0, m1)
    report.notes.append(f"tv(real v=1, sim) = {tv_distance(real1, sim)}")
    for name, D in family:
        lhs, a1, a2 = np_ot.reduction_identity(G, D, m0, m1, adv2_position)
        holds = lhs == a1 - a2 and abs(lhs) <= abs(a1) + abs(a2)
        verdict = FAIL if not holds else PERFECT if lhs == 0 else "bounded"
        report.per_input.append(InputVerdict({"D": name, "lhs": lhs, "adv1": a1, "adv2": a2}, verdict, abs(lhs)))
    return report


# -- bit OT / AND -----------------------------------------------------------


def _bits3(_p):
    return list(iproduct(BITS, repeat=3))


def _bits2(_p):
    return list(iproduct(BITS, repeat=2))


def bitot_suite(param: SecurityParam, **_) -> list[CheckReport]:
    def E(name, f):
        return Ensemble(lambda i, p: f(*i), _bits3, name)

    r1 = E("bitot.real1", ba.bitot_real_view1)
    s1 = E("bitot.sim1", lambda m0, m1, b: ba.bitot_sim1(m0, m1))
    r2 = E("bitot.real2", ba.bitot_real_view2)
    s2 = E("bitot.sim2", lambda m0, m1, b: ba.bitot_sim2(b, m1 if b else m0))
    out = E("bitot.execute", ba.bitot_execute)
    want = E("bitot.functionality", lambda m0, m1, b: pure(m1 if b else m0))
    return [
        check_perfect(r1, s1, param, "bit-ot.party1"),
        check_perfect(r2, s2, param, "bit-ot.party2"),
        check_correctness(out, want, param, suite="bit-ot.correctness"),
    ]


def and_suite(param: SecurityParam, **_) -> list[CheckReport]:
    def E(name, f):
        return Ensemble(lambda i, p: f(*i), _bits2, name)

    ra = E("and.realA", ba.and_real_view_a)
    sa = E("and.simA", lambda a, b: ba.and_sim_a(a))
    rb = E("and.realB", ba.and_real_view_b)
    sb = E("and.simB", lambda a, b: ba.and_sim_b(b))
    out = E("and.execute", ba.and_execute)
    want = E("and.functionality", ba.and_functionality)
    return [
        check_perfect(ra, sa, param, "and-gate.partyA"),
        check_perfect(rb, sb, param, "and-gate.partyB"),
        check_correctness(out, want, param, project=lambda s: s[0] ^ s[1], suite="and-gate.correctness"),
    ]


SUITES: dict[str, Callable[..., list[CheckReport]]] = {
    "dist-laws": lambda param, seed=0, **_: dist_laws(param, seed),
    "secmult": secmult_suite,
    "np-receiver": np_receiver_suite,
    "np-sender": np_sender_suite,
    "bit-ot": bitot_suite,
    "and-gate": and_suite,
}


def run_suite(name: str, param: SecurityParam, **options) -> list[CheckReport]:
    return SUITES[name](param, **options)


# -- program registry for `tv` ----------------------------------------------


def _g(G: Group, inputs: dict, key: str):
    return G.pow(int(inputs.get(key, 0)))


def _b(inputs: dict, key: str) -> bool:
    return bool(int(inputs.get(key, 0)))


def _i(inputs: dict, key: str) -> int:
    return int(inputs.get(key, 0))


PROGRAMS: dict[str, tuple[str, Callable[[SecurityParam, dict], Dist]]] = {
    "uniform": ("uniform(q)", lambda p, i: uniform(p.q)),
    "coin": ("fair coin", lambda p, i: coin()),
    "ddh.real": ("(g^a, g^b, g^ab)", lambda p, i: ddh_real(p.group)),
    "ddh.rand": ("(g^a, g^b, g^c)", lambda p, i: ddh_rand(p.group)),
    "ddh_sr.raw": (
        "self-reduction of x,y,z (units)",
        lambda p, i: ddh_sr(p.group, _i(i, "x"), _i(i, "y"), _i(i, "z")),
    ),
    "ddh_sr.full": (
        "self-reduction of x,y,z (multiplier over Z_q)",
        lambda p, i: ddh_sr(p.group, _i(i, "x"), _i(i, "y"), _i(i, "z"), units=False),
    ),
    "ddh_sr.simplified": (
        "triple / non-triple program for x,y,z",
        lambda p, i: ddh_sr_simplified(p.group, _i(i, "x"), _i(i, "y"), _i(i, "z")),
    ),
    "ddh_sr.triple": (
        "triple program for x,y,z",
        lambda p, i: ddh_sr_triple(p.group, _i(i, "x"), _i(i, "y"), _i(i, "z")),
    ),
    "ddh_sr.non_triple": (
        "non-triple program for x,y,z",
        lambda p, i: ddh_sr_non_triple(p.group, _i(i, "x"), _i(i, "y"), _i(i, "z")),
    ),
    "secmult.real1": ("party-1 real view of x,y", lambda p, i: secmult.real_view1(p.q, _i(i, "x"), _i(i, "y"))),
    "secmult.sim1": ("party-1 simulator of x,y", lambda p, i: secmult.sim_view1(p.q, _i(i, "x"), _i(i, "y"))),
    "secmult.real2": ("party-2 real view of x,y", lambda p, i: secmult.real_view2(p.q, _i(i, "x"), _i(i, "y"))),
    "secmult.sim2": ("party-2 simulator of x,y", lambda p, i: secmult.sim_view2(p.q, _i(i, "x"), _i(i, "y"))),
    "secmult.protocol": ("output shares of x,y", lambda p, i: secmult.protocol(p.q, _i(i, "x"), _i(i, "y"))),
    "secmult.functionality": (
        "ideal shares of x,y",
        lambda p, i: secmult.functionality(p.q, _i(i, "x"), _i(i, "y")),
    ),
    "npot.real_receiver": (
        "receiver real view of m0,m1 (exponents),v; conv=raw|simplified|full",
        lambda p, i: np_ot.receiver_real_view(
            p.group, _g(p.group, i, "m0"), _g(p.group, i, "m1"), _i(i, "v"), i.get("conv", "raw")
        ),
    ),
    "npot.sim_receiver": (
        "receiver simulator of v and m_v",
        lambda p, i: np_ot.receiver_sim_view(
            p.group, _i(i, "v"), _g(p.group, i, "m1" if _i(i, "v") else "m0")
        ),
    ),
    "npot.real_sender": (
        "sender real view of m0,m1,v",
        lambda p, i: np_ot.sender_real_view(p.group, _g(p.group, i, "m0"), _g(p.group, i, "m1"), _i(i, "v")),
    ),
    "npot.sim_sender": (
        "sender simulator of m0,m1",
        lambda p, i: np_ot.sender_sim_view(p.group, _g(p.group, i, "m0"), _g(p.group, i, "m1")),
    ),
    "npot.execute": (
        "receiver output of m0,m1,v",
        lambda p, i: np_ot.np_execute(p.group, _g(p.group, i, "m0"), _g(p.group, i, "m1"), _i(i, "v")),
    ),
    "bitot.real1": (
        "bit-OT sender view of m0,m1,b",
        lambda p, i: ba.bitot_real_view1(_b(i, "m0"), _b(i, "m1"), _b(i, "b")),
    ),
    "bitot.sim1": ("bit-OT sender simulator", lambda p, i: ba.bitot_sim1(_b(i, "m0"), _b(i, "m1"))),
    "bitot.real2": (
        "bit-OT receiver view of m0,m1,b",
        lambda p, i: ba.bitot_real_view2(_b(i, "m0"), _b(i, "m1"), _b(i, "b")),
    ),
    "bitot.sim2": (
        "bit-OT receiver simulator of b, m_b",
        lambda p, i: ba.bitot_sim2(_b(i, "b"), _b(i, "m1") if _b(i, "b") else _b(i, "m0")),
    ),
    "and.realA": ("AND party A view of a,b", lambda p, i: ba.and_real_view_a(_b(i, "a"), _b(i, "b"))),
    "and.simA": ("AND party A simulator of a", lambda p, i: ba.and_sim_a(_b(i, "a"))),
    "and.realB": ("AND party B view of a,b", lambda p, i: ba.and_real_view_b(_b(i, "a"), _b(i, "b"))),
    "and.simB": ("AND party B simulator of b", lambda p, i: ba.and_sim_b(_b(i, "b"))),
}
