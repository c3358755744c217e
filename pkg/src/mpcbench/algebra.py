"""Prime-field arithmetic and small prime-order cyclic groups.

Two group backends share one interface:

* exponent space: ``g^x`` is represented by ``x mod q`` itself, which makes
  discrete logs free (useful for adversarial distinguishers);
* Schnorr subgroup: the order-``q`` subgroup of ``Z_p^*`` with ``p = 2q + 1``.

Group elements support ``*`` (group operation), ``**`` (integer powers) and
``inverse()``.  Everything here is desk-scale: no constant-time arithmetic,
no cryptographic parameter sizes.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Optional

from .dist import Dist, PreconditionError, mapd, program, uniform

__all__ = [
    "FieldElem",
    "Group",
    "GroupElem",
    "GroupMismatch",
    "ModulusMismatch",
    "SCHNORR_TABLE",
    "ddh_rand",
    "ddh_real",
    "ddh_sr",
    "ddh_sr_non_triple",
    "ddh_sr_simplified",
    "ddh_sr_triple",
    "exponent_group",
    "fadd",
    "finv",
    "fmul",
    "fsub",
    "gmul",
    "gpow",
    "is_prime",
    "schnorr_group",
]


def is_prime(n: int) -> bool:
    """Trial division; fine for anything up to a few billion."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class ModulusMismatch(ValueError):
    pass


class GroupMismatch(ValueError):
    pass


# -- field ------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class FieldElem:
    """Residue modulo a prime ``q``."""

    value: int
    q: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise PreconditionError(f"modulus {self.q} is not prime")
        if not 0 <= self.value < self.q:
            object.__setattr__(self, "value", self.value % self.q)

    def _check(self, other: "FieldElem") -> None:
        if not isinstance(other, FieldElem):
            raise TypeError(f"expected FieldElem, got {type(other).__name__}")
        if other.q != self.q:
            raise ModulusMismatch(f"mod {self.q} vs mod {other.q}")

    def __add__(self, other):
        self._check(other)
        return FieldElem((self.value + other.value) % self.q, self.q)

    def __sub__(self, other):
        self._check(other)
        return FieldElem((self.value - other.value) % self.q, self.q)

    def __mul__(self, other):
        self._check(other)
        return FieldElem(self.value * other.value % self.q, self.q)

    def __neg__(self):
        return FieldElem(-self.value % self.q, self.q)

    def inverse(self) -> "FieldElem":
        if self.value == 0:
            raise ZeroDivisionError("zero has no inverse mod q")
        return FieldElem(pow(self.value, -1, self.q), self.q)

    def __int__(self):
        return self.value


def fadd(a: FieldElem, b: FieldElem) -> FieldElem:
    return a + b


def fsub(a: FieldElem, b: FieldElem) -> FieldElem:
    return a - b


def fmul(a: FieldElem, b: FieldElem) -> FieldElem:
    return a * b


def finv(a: FieldElem) -> FieldElem:
    return a.inverse()


# -- groups -----------------------------------------------------------------


@dataclass(frozen=True)
class Group:
    """Cyclic group of prime order ``q`` generated by ``g``.

    ``p is None`` selects the exponent-space backend (``g`` is then 1, the
    exponent of the generator).
    """

    q: int
    g: int = 1
    p: Optional[int] = None

    def __post_init__(self):
        if not is_prime(self.q):
            raise PreconditionError(f"group order {self.q} is not prime")
        if self.p is None:
            if self.g % self.q == 0:
                raise PreconditionError("generator exponent must be nonzero mod q")
            return
        if self.p != 2 * self.q + 1 or not is_prime(self.p):
            raise PreconditionError(f"p={self.p} is not a safe prime 2q+1 for q={self.q}")
        if not 1 < self.g < self.p or pow(self.g, self.q, self.p) != 1:
            raise PreconditionError(f"g={self.g} does not have order {self.q} mod {self.p}")

    @property
    def backend(self) -> str:
        return "exponent" if self.p is None else "schnorr"

    @property
    def generator(self) -> "GroupElem":
        return self.pow(1)

    @property
    def identity(self) -> "GroupElem":
        return GroupElem(0 if self.p is None else 1, self)

    def pow(self, x: int) -> "GroupElem":
        """``g^x``."""
        x = int(x) % self.q
        if self.p is None:
            return GroupElem(self.g * x % self.q, self)
        return GroupElem(pow(self.g, x, self.p), self)

    def elements(self) -> list["GroupElem"]:
        return sorted(self.pow(x) for x in range(self.q))

    def element(self, value: int) -> "GroupElem":
        """Validate a raw encoding and wrap it."""
        if self.p is None:
            if not 0 <= value < self.q:
                raise PreconditionError(f"{value} is not an exponent mod {self.q}")
        elif not 0 < value < self.p or pow(value, self.q, self.p) != 1:
            raise PreconditionError(f"{value} is not in the order-{self.q} subgroup mod {self.p}")
        return GroupElem(value, self)

    def dlog(self, h: "GroupElem") -> int:
        """Discrete log base g; only the exponent backend offers this."""
        if self.p is not None:
            raise NotImplementedError("dlog is only available in the exponent backend")
        self._own(h)
        return h.value * pow(self.g, -1, self.q) % self.q

    def _own(self, h: "GroupElem") -> None:
        if h.group != self:
            raise GroupMismatch(f"element of {h.group} used with {self}")

    def __str__(self):
        if self.p is None:
            return f"exp(q={self.q})"
        return f"schnorr(p={self.p},q={self.q},g={self.g})"


class GroupElem:
    """Element of a :class:`Group`, ordered by its raw encoding."""

    __slots__ = ("value", "group", "_hash")

    def __init__(self, value: int, group: Group):
        self.value = value
        self.group = group
        self._hash = hash((value, group.q, group.p))

    def __eq__(self, other):
        if not isinstance(other, GroupElem):
            return NotImplemented
        return self.value == other.value and (
            self.group is other.group or self.group == other.group
        )

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return (self.value, self.group.q) < (other.value, other.group.q)

    def __mul__(self, other: "GroupElem") -> "GroupElem":
        if not isinstance(other, GroupElem):
            return NotImplemented
        G = self.group
        if other.group is not G and other.group != G:
            raise GroupMismatch(f"cannot combine elements of {G} and {other.group}")
        if G.p is None:
            return GroupElem((self.value + other.value) % G.q, G)
        return GroupElem(self.value * other.value % G.p, G)

    def __pow__(self, k: int) -> "GroupElem":
        G = self.group
        k = int(k) % G.q
        if G.p is None:
            return GroupElem(self.value * k % G.q, G)
        return GroupElem(pow(self.value, k, G.p), G)

    def inverse(self) -> "GroupElem":
        return self ** (self.group.q - 1)

    def __repr__(self):
        return f"<{self.value}>"


def gpow(G: Group, x) -> GroupElem:
    return G.pow(int(x))


def gmul(u: GroupElem, v: GroupElem) -> GroupElem:
    return u * v


def exponent_group(q: int) -> Group:
    return Group(q)


# (p, q, g) with p = 2q + 1; each row is re-validated by Group() on use.
SCHNORR_TABLE: dict[int, tuple[int, int, int]] = {
    3: (7, 3, 2),
    5: (11, 5, 3),
    11: (23, 11, 2),
    23: (47, 23, 2),
    83: (167, 83, 2),
    131: (263, 131, 2),
}


def schnorr_group(q: int, p: int | None = None, g: int | None = None) -> Group:
    if p is None:
        if q not in SCHNORR_TABLE:
            raise PreconditionError(f"no built-in Schnorr parameters for q={q}")
        p, _, g = SCHNORR_TABLE[q]
    if g is None:
        # smallest quadratic residue other than 1 generates the subgroup
        g = next(h * h % p for h in range(2, p) if h * h % p != 1)
    return Group(q, g, p)


# -- DDH --------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def ddh_real(G: Group) -> Dist:
    """(g^a, g^b, g^ab) for independent uniform a, b."""
    q = G.q
    return mapd(lambda ab: (G.pow(ab[0]), G.pow(ab[1]), G.pow(ab[0] * ab[1])), _pairs(q))


@functools.lru_cache(maxsize=None)
def ddh_rand(G: Group) -> Dist:
    """(g^a, g^b, g^c) for independent uniform a, b, c."""
    q = G.q

    @program
    def prog():
        a = yield uniform(q)
        b = yield uniform(q)
        c = yield uniform(q)
        return G.pow(a), G.pow(b), G.pow(c)

    return prog()


@functools.lru_cache(maxsize=None)
def _pairs(q: int) -> Dist:
    @program
    def prog():
        a = yield uniform(q)
        b = yield uniform(q)
        return a, b

    return prog()


@functools.lru_cache(maxsize=4096)
def ddh_sr(G: Group, x: int, y: int, z: int, units: bool = True) -> Dist:
    """Random self-reduction of the exponent tuple (x, y, z).

    Outputs ``(g, g^((x+s)t), g^y, g^((z+s*y)t))`` with ``s`` uniform in
    ``Z_q`` and ``t`` uniform in ``Z_q^*`` (or in all of ``Z_q`` when
    ``units=False``; with t = 0 allowed, DDH triples no longer map to
    uniformly distributed triples).
    """
    q = G.q
    x, y, z = x % q, y % q, z % q
    g, gy = G.generator, G.pow(y)
    ts = _units(q) if units else uniform(q)

    @program
    def prog():
        t = yield ts
        s = yield uniform(q)
        return g, G.pow((x + s) * t), gy, G.pow((z + s * y) * t)

    return prog()


@functools.lru_cache(maxsize=None)
def _units(q: int) -> Dist:
    return mapd(lambda u: u + 1, uniform(q - 1))


@functools.lru_cache(maxsize=4096)
def ddh_sr_triple(G: Group, x: int, y: int, z: int) -> Dist:
    """Simplified self-reduction for inputs with ``z = x*y``."""
    q = G.q
    if (z - x * y) % q:
        raise PreconditionError(f"({x}, {y}, {z}) is not a DDH triple mod {q}")
    g, gy = G.generator, G.pow(y)
    return mapd(lambda w: (g, G.pow(w), gy, G.pow(y * w)), uniform(q))


@functools.lru_cache(maxsize=4096)
def ddh_sr_non_triple(G: Group, x: int, y: int, z: int) -> Dist:
    """Simplified self-reduction for inputs with ``z != x*y``."""
    q = G.q
    if (z - x * y) % q == 0:
        raise PreconditionError(f"({x}, {y}, {z}) is a DDH triple mod {q}")
    g, gy = G.generator, G.pow(y)
    return mapd(lambda w: (g, G.pow(w[0]), gy, G.pow(w[1])), _pairs(q))


def ddh_sr_simplified(G: Group, x: int, y: int, z: int) -> Dist:
    """Dispatch to the triple or non-triple simplified program."""
    if (z - x * y) % G.q == 0:
        return ddh_sr_triple(G, x, y, z)
    return ddh_sr_non_triple(G, x, y, z)
