from collections import Counter
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpcbench.algebra import (
    FieldElem,
    Group,
    GroupMismatch,
    ModulusMismatch,
    ddh_rand,
    ddh_real,
    ddh_sr,
    ddh_sr_non_triple,
    ddh_sr_simplified,
    ddh_sr_triple,
    exponent_group,
    is_prime,
    schnorr_group,
)
from mpcbench.dist import PreconditionError, tv_distance


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@given(st.integers(0, 100), st.integers(0, 100))
def test_field_ops(a, b):
    q = 7
    x, y = FieldElem(a, q), FieldElem(b, q)
    assert (x + y).value == (a + b) % q
    assert (x - y).value == (a - b) % q
    assert (x * y).value == a * b % q
    if x.value:
        assert (x * x.inverse()).value == 1


def test_field_errors():
    with pytest.raises(ZeroDivisionError):
        FieldElem(0, 5).inverse()
    with pytest.raises(ModulusMismatch):
        FieldElem(1, 5) + FieldElem(1, 7)
    with pytest.raises(PreconditionError):
        FieldElem(1, 6)


@pytest.mark.parametrize("G", [exponent_group(5), schnorr_group(5), schnorr_group(11), schnorr_group(3)])
def test_group_laws(G):
    elems = G.elements()
    assert len(elems) == G.q
    for x in range(G.q):
        for y in range(G.q):
            assert G.pow(x) * G.pow(y) == G.pow(x + y)
        assert G.pow(x) * G.pow(x).inverse() == G.identity
    assert G.generator ** G.q == G.identity


def test_schnorr_values():
    G = schnorr_group(5)
    assert (G.p, G.g) == (11, 3)
    G2 = Group(5, 4, 11)
    assert G2.pow(2).value == 5
    with pytest.raises(PreconditionError):
        Group(5, 2, 11)  # 2 has order 10
    with pytest.raises(PreconditionError):
        G.element(2)  # non-residue
    assert str(G) == "schnorr(p=11,q=5,g=3)"


def test_mixing_groups_fails():
    with pytest.raises(GroupMismatch):
        exponent_group(5).pow(1) * schnorr_group(5).pow(1)


def test_dlog_only_in_exponent_space():
    assert exponent_group(7).dlog(exponent_group(7).pow(3)) == 3
    with pytest.raises(NotImplementedError):
        schnorr_group(5).dlog(schnorr_group(5).pow(3))


def test_ddh_supports():
    G = exponent_group(3)
    assert len(ddh_real(G)) == 9
    assert len(ddh_rand(G)) == 27
    assert tv_distance(ddh_real(G), ddh_rand(G)) == Fraction(2, 3)


def _raw_oracle(q, x, y, z):
    """Counts of (g^w1, g^w2) exponents by plain enumeration of (s, t)."""
    c = Counter()
    for t in range(1, q):
        for s in range(q):
            c[((x + s) * t % q, (z + s * y) * t % q)] += 1
    return {k: Fraction(v, q * (q - 1)) for k, v in c.items()}


def _tv_oracle(a: dict, b: dict) -> Fraction:
    keys = set(a) | set(b)
    return sum((abs(a.get(k, 0) - b.get(k, 0)) for k in keys), Fraction(0)) / 2


@pytest.mark.parametrize("q", [3, 5, 7])
def test_self_reduction_triples_exact(q):
    G = exponent_group(q)
    for x, y in product(range(q), repeat=2):
        assert ddh_sr(G, x, y, x * y) == ddh_sr_triple(G, x, y, x * y)


@pytest.mark.parametrize("q", [3, 5, 7])
def test_self_reduction_non_triples_against_oracle(q):
    G = exponent_group(q)
    uniform_pairs = {(u, v): Fraction(1, q * q) for u in range(q) for v in range(q)}
    for x, y, z in product(range(q), repeat=3):
        if (z - x * y) % q == 0:
            continue
        expected = _tv_oracle(_raw_oracle(q, x, y, z), uniform_pairs)
        assert expected == Fraction(1, q)
        assert tv_distance(ddh_sr(G, x, y, z), ddh_sr_non_triple(G, x, y, z)) == expected
        assert tv_distance(ddh_sr_simplified(G, x, y, z), ddh_sr_non_triple(G, x, y, z)) == 0


def test_self_reduction_preconditions():
    G = exponent_group(5)
    with pytest.raises(PreconditionError):
        ddh_sr_triple(G, 1, 2, 3)
    with pytest.raises(PreconditionError):
        ddh_sr_non_triple(G, 1, 2, 2)


def test_zero_multiplier_breaks_triples():
    # letting t range over all of Z_q puts extra mass on the identity
    G = exponent_group(5)
    assert ddh_sr(G, 1, 2, 2, units=False) != ddh_sr_triple(G, 1, 2, 2)
