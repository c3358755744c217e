"""Simulation-based security checks over exact ensembles.

An :class:`Ensemble` is an input-indexed family of distributions at a fixed
security parameter.  Two ensembles are compared input by input, either for
exact equality (perfect security) or up to a total-variation bound, which is
the advantage of the best possible distinguisher.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, Iterable, Optional, Sequence

from .algebra import Group, is_prime
from .dist import Dist, PreconditionError, fmt_rational, mapd, tv_distance

log = logging.getLogger(__name__)

__all__ = [
    "CheckReport",
    "DomainMismatch",
    "Ensemble",
    "InputVerdict",
    "SecurityParam",
    "check_correctness",
    "check_perfect",
    "check_statistical",
    "distinguisher_advantage",
    "hybrid_bound",
    "max_advantage_bruteforce",
]

PERFECT = "perfect"
BOUNDED = "bounded"
FAIL = "fail"


class DomainMismatch(ValueError):
    pass


@dataclass(frozen=True)
class SecurityParam:
    """The concrete size parameter: a prime ``q`` and optionally a group."""

    q: int
    group: Optional[Group] = None

    def __post_init__(self):
        if not is_prime(self.q):
            raise PreconditionError(f"q={self.q} is not prime")
        if self.group is not None and self.group.q != self.q:
            raise PreconditionError("group order does not match q")

    def __str__(self):
        return f"q={self.q}" if self.group is None else str(self.group)


@dataclass
class Ensemble:
    """``fn(input, param) -> Dist`` together with its finite input domain."""

    fn: Callable[[Any, SecurityParam], Dist]
    domain: Callable[[SecurityParam], Iterable]
    name: str = ""

    def __call__(self, inp, param: SecurityParam) -> Dist:
        return self.fn(inp, param)

    def inputs(self, param: SecurityParam) -> list:
        return list(self.domain(param))


@dataclass
class InputVerdict:
    input: Any
    verdict: str
    tv: Fraction


@dataclass
class CheckReport:
    suite: str
    param: str
    convention: str = ""
    per_input: list[InputVerdict] = field(default_factory=list)
    bound: Optional[Fraction] = None
    kind: str = "perfect"
    elapsed: float = 0.0
    notes: list[str] = field(default_factory=list)
    extra_pass: bool = True

    @property
    def max_tv(self) -> Fraction:
        return max((r.tv for r in self.per_input), default=Fraction(0))

    @property
    def passed(self) -> bool:
        return self.extra_pass and all(r.verdict != FAIL for r in self.per_input)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "param": self.param,
            "convention": self.convention,
            "per_input": [
                {"input": _jsonable(r.input), "verdict": r.verdict, "tv": fmt_rational(r.tv)}
                for r in self.per_input
            ],
            "max_tv": fmt_rational(self.max_tv),
            "bound": None if self.bound is None else fmt_rational(self.bound),
            "pass": self.passed,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = [
            f"suite {self.suite}  param {self.param}  convention {self.convention or '-'}",
            f"  max_tv {fmt_rational(self.max_tv)}  bound "
            f"{'-' if self.bound is None else fmt_rational(self.bound)}  "
            f"{'PASS' if self.passed else 'FAIL'}",
        ]
        for r in self.per_input:
            lines.append(f"  {_jsonable(r.input)}  {r.verdict}  {fmt_rational(r.tv)}")
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (tuple, list)):
        return [_jsonable(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return fmt_rational(value)
    if hasattr(value, "value"):
        return value.value
    return str(value)


def _paired_inputs(A: Ensemble, B: Ensemble, param: SecurityParam) -> list:
    ia, ib = A.inputs(param), B.inputs(param)
    if ia != ib:
        raise DomainMismatch(f"{A.name or 'A'} and {B.name or 'B'} have different input domains")
    return ia


def check_perfect(
    A: Ensemble, B: Ensemble, param: SecurityParam, suite: str = "", convention: str = ""
) -> CheckReport:
    """Per-input exact equality."""
    t0 = time.perf_counter()
    report = CheckReport(suite, str(param), convention, kind="perfect", bound=Fraction(0))
    for inp in _paired_inputs(A, B, param):
        a, b = A(inp, param), B(inp, param)
        if a == b:
            report.per_input.append(InputVerdict(inp, PERFECT, Fraction(0)))
        else:
            report.per_input.append(InputVerdict(inp, FAIL, tv_distance(a, b)))
    report.elapsed = time.perf_counter() - t0
    log.info("%s %s: max tv %s in %.2fs", suite, param, report.max_tv, report.elapsed)
    return report


def check_statistical(
    A: Ensemble,
    B: Ensemble,
    param: SecurityParam,
    bound,
    suite: str = "",
    convention: str = "",
) -> CheckReport:
    """Per-input TV distance compared against ``bound``."""
    bound = Fraction(bound)
    t0 = time.perf_counter()
    report = CheckReport(suite, str(param), convention, kind="statistical", bound=bound)
    for inp in _paired_inputs(A, B, param):
        tv = tv_distance(A(inp, param), B(inp, param))
        verdict = PERFECT if tv == 0 else BOUNDED if tv <= bound else FAIL
        report.per_input.append(InputVerdict(inp, verdict, tv))
    report.elapsed = time.perf_counter() - t0
    log.info("%s %s: max tv %s (bound %s)", suite, param, report.max_tv, bound)
    return report


def distinguisher_advantage(D: Callable[[Any], Dist], dA: Dist, dB: Dist) -> Fraction:
    """|Pr[D(A) = 1] - Pr[D(B) = 1]| for a (possibly randomized) D."""

    def accept(d: Dist) -> Fraction:
        return sum((m * D(v).mass(True) for v, m in d.items()), Fraction(0))

    return abs(accept(dA) - accept(dB))


def max_advantage_bruteforce(dA: Dist, dB: Dist) -> Fraction:
    """Best deterministic distinguisher, found by trying every acceptance set."""
    points = sorted(set(dA.support()) | set(dB.support()), key=repr)
    if len(points) > 16:
        raise PreconditionError("brute force limited to 16 support points")
    best = Fraction(0)
    for k in range(len(points) + 1):
        for accept in combinations(points, k):
            s = set(accept)
            best = max(best, distinguisher_advantage(lambda v: _point(v in s), dA, dB))
    return best


def _point(b: bool) -> Dist:
    return Dist({b: 1})


def hybrid_bound(chain: Sequence[Dist]) -> tuple[Fraction, Fraction]:
    """(tv(first, last), sum of adjacent tv) for a chain of hybrids."""
    if len(chain) < 2:
        raise PreconditionError("a hybrid chain needs at least two distributions")
    steps = sum((tv_distance(x, y) for x, y in zip(chain, chain[1:])), Fraction(0))
    return tv_distance(chain[0], chain[-1]), steps


def check_correctness(
    protocol_out: Ensemble,
    functionality: Ensemble,
    param: SecurityParam,
    project: Callable | None = None,
    suite: str = "",
) -> CheckReport:
    """Mass on which the protocol output differs from the functionality.

    ``project`` maps a protocol output to the value the functionality
    produces (e.g. summing additive shares); the projected functionality must
    be deterministic.  The disagreement mass is stored in the ``tv`` slot.
    """
    t0 = time.perf_counter()
    report = CheckReport(suite, str(param), kind="correctness", bound=Fraction(0))
    for inp in _paired_inputs(protocol_out, functionality, param):
        out = protocol_out(inp, param)
        if project is not None:
            out = mapd(project, out)
        expected = functionality(inp, param)
        if len(expected) != 1:
            raise PreconditionError("functionality must be deterministic after projection")
        (target,) = expected.support()
        bad = out.weight() - out.mass(target)
        report.per_input.append(InputVerdict(inp, PERFECT if bad == 0 else FAIL, bad))
    report.elapsed = time.perf_counter() - t0
    return report
