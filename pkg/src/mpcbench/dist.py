"""Exact finite subprobability distributions.

A :class:`Dist` maps values to strictly positive rational masses whose total
is at most one.  Masses are held as integer numerators over one shared
denominator, reduced so that every distribution has exactly one
representation; structural equality is therefore distribution equality.

Probabilistic programs can be written with :func:`bind` and :func:`mapd`, or
as generators decorated with :func:`program`::

    @program
    def two_coins():
        a = yield coin()
        b = yield coin()
        return a and b
"""

from __future__ import annotations

import functools
from collections import defaultdict
from fractions import Fraction
from math import gcd, lcm
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping

__all__ = [
    "Dist",
    "PreconditionError",
    "assert_guard",
    "bind",
    "coin",
    "dist_equal",
    "fmt_rational",
    "is_lossless",
    "mapd",
    "mass",
    "product",
    "program",
    "pure",
    "scale",
    "tv_distance",
    "uniform",
    "uniform_over",
    "weight",
]

UNIT = ()


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


class Dist:
    """Immutable finite subprobability distribution with exact masses."""

    __slots__ = ("_num", "_den", "_hash", "_sorted")

    def __init__(self, masses: Mapping[Hashable, Any] | None = None):
        masses = masses or {}
        fracs = {v: Fraction(m) for v, m in masses.items()}
        for v, m in fracs.items():
            if m < 0:
                raise PreconditionError(f"negative mass {m} for {v!r}")
        den = lcm(*(m.denominator for m in fracs.values())) if fracs else 1
        num = {v: m.numerator * (den // m.denominator) for v, m in fracs.items()}
        self._init(num, den)
        if sum(self._num.values()) > self._den:
            raise PreconditionError("total mass exceeds 1")

    def _init(self, num: dict, den: int) -> None:
        num = {v: n for v, n in num.items() if n}
        g = den
        for n in num.values():
            g = gcd(g, n)
            if g == 1:
                break
        if not num:
            g = den
        if g > 1:
            num = {v: n // g for v, n in num.items()}
            den //= g
        self._num = num
        self._den = den
        self._hash = None
        self._sorted = None

    @classmethod
    def _make(cls, num: dict, den: int) -> "Dist":
        d = cls.__new__(cls)
        d._init(num, den)
        return d

    # -- inspection ---------------------------------------------------------

    def mass(self, value) -> Fraction:
        return Fraction(self._num.get(value, 0), self._den)

    def weight(self) -> Fraction:
        return Fraction(sum(self._num.values()), self._den)

    def support(self) -> list:
        return [v for v, _ in self._items()]

    def items(self) -> list[tuple[Any, Fraction]]:
        """(value, mass) pairs sorted by value."""
        return [(v, Fraction(n, self._den)) for v, n in self._items()]

    def _items(self) -> list[tuple[Any, int]]:
        if self._sorted is None:
            try:
                self._sorted = sorted(self._num.items(), key=lambda kv: kv[0])
            except TypeError:
                self._sorted = sorted(self._num.items(), key=lambda kv: repr(kv[0]))
        return self._sorted

    def __len__(self) -> int:
        return len(self._num)

    def __iter__(self) -> Iterator:
        return iter(self.support())

    def __contains__(self, value) -> bool:
        return value in self._num

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dist):
            return NotImplemented
        return self._den == other._den and self._num == other._num

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._den, frozenset(self._num.items())))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{v!r}: {fmt_rational(m)}" for v, m in self.items())
        return "{" + body + "}"

    def render(self) -> str:
        """One ``value: num/den`` line per support point."""
        return "\n".join(f"{v!r}: {fmt_rational(m)}" for v, m in self.items())

    # -- monad --------------------------------------------------------------

    def bind(self, k: Callable[[Any], "Dist"]) -> "Dist":
        return bind(self, k)

    def map(self, f: Callable) -> "Dist":
        return mapd(f, self)

    def __rshift__(self, k):
        return bind(self, k)


def fmt_rational(r) -> str:
    """Always ``num/den``, including integers (``0/1``, ``1/1``)."""
    r = Fraction(r)
    return f"{r.numerator}/{r.denominator}"


def pure(v) -> Dist:
    return Dist._make({v: 1}, 1)


def uniform(n: int) -> Dist:
    """Uniform over ``0 .. n-1``."""
    if n < 1:
        raise PreconditionError("uniform needs n >= 1")
    return _uniform_cached(n)


@functools.lru_cache(maxsize=256)
def _uniform_cached(n: int) -> Dist:
    return Dist._make(dict.fromkeys(range(n), 1), n)


def uniform_over(values: Iterable) -> Dist:
    """Uniform over a finite nonempty set of values."""
    vals = set(values)
    if not vals:
        raise PreconditionError("uniform_over needs a nonempty set")
    return Dist._make(dict.fromkeys(vals, 1), len(vals))


def coin() -> Dist:
    return _COIN


_COIN = Dist._make({False: 1, True: 1}, 2)


def assert_guard(b: bool) -> Dist:
    """Continue with unit when ``b`` holds, otherwise abort (weight 0)."""
    return pure(UNIT) if b else Dist._make({}, 1)


def bind(d: Dist, k: Callable[[Any], Dist]) -> Dist:
    inner = [(n, k(v)) for v, n in d._num.items()]
    if not inner:
        return Dist._make({}, 1)
    common = lcm(*(q._den for _, q in inner))
    acc: dict = defaultdict(int)
    for n, q in inner:
        f = n * (common // q._den)
        for w, m in q._num.items():
            acc[w] += f * m
    return Dist._make(acc, d._den * common)


def mapd(f: Callable, d: Dist) -> Dist:
    acc: dict = defaultdict(int)
    for v, n in d._num.items():
        acc[f(v)] += n
    return Dist._make(acc, d._den)


def product(*ds: Dist) -> Dist:
    """Joint distribution of independent components, as tuples."""
    out = pure(())
    for d in ds:
        out = bind(out, lambda t, d=d: mapd(lambda v, t=t: t + (v,), d))
    return out


def scale(r, d: Dist) -> Dist:
    r = Fraction(r)
    if r < 0 or r * d.weight() > 1:
        raise PreconditionError(f"scale factor {r} out of range")
    return Dist._make({v: n * r.numerator for v, n in d._num.items()}, d._den * r.denominator)


def weight(d: Dist) -> Fraction:
    return d.weight()


def mass(d: Dist, v) -> Fraction:
    return d.mass(v)


def is_lossless(d: Dist) -> bool:
    return sum(d._num.values()) == d._den


def tv_distance(a: Dist, b: Dist) -> Fraction:
    """Half the L1 distance between the mass functions."""
    den = lcm(a._den, b._den)
    fa, fb = den // a._den, den // b._den
    total = 0
    for v, n in a._num.items():
        total += abs(n * fa - b._num.get(v, 0) * fb)
    for v, n in b._num.items():
        if v not in a._num:
            total += n * fb
    return Fraction(total, 2 * den)


def dist_equal(a: Dist, b: Dist) -> bool:
    return a == b


# -- generator programs ------------------------------------------------------


def program(genfn: Callable) -> Callable[..., Dist]:
    """Turn a generator that yields Dists into a function returning a Dist.

    Each ``x = yield d`` binds ``x`` to every support point of ``d`` in turn.
    The generator body must be deterministic given the yielded values, since
    every path is re-executed from the start.
    """

    @functools.wraps(genfn)
    def run(*args, **kwargs) -> Dist:
        by_den: dict = defaultdict(lambda: defaultdict(int))

        def explore(prefix: list, num: int, den: int) -> None:
            gen = genfn(*args, **kwargs)
            try:
                d = gen.send(None)
                for choice in prefix:
                    d = gen.send(choice)
            except StopIteration as stop:
                by_den[den][stop.value] += num
                return
            if not isinstance(d, Dist):
                raise TypeError(f"program yielded {type(d).__name__}, expected Dist")
            for v, n in d._num.items():
                explore(prefix + [v], num * n, den * d._den)

        explore([], 1, 1)
        if not by_den:
            return Dist._make({}, 1)
        common = lcm(*by_den)
        acc: dict = defaultdict(int)
        for den, vals in by_den.items():
            f = common // den
            for v, n in vals.items():
                acc[v] += n * f
        return Dist._make(acc, common)

    return run
