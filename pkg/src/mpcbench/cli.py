"""Command-line front end.

Exit codes: 0 pass, 1 check or session failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .algebra import is_prime, schnorr_group
from .dist import PreconditionError, fmt_rational, tv_distance
from .netexec import codec as C
from .netexec.roles import ROLES
from .netexec.session import SessionAbort, SessionConfig, replay, serve
from .netexec.transcript import Transcript, TranscriptError
from .np_ot import random_distinguishers, reduction_identity
from .suites import PROGRAMS, SUITE_NAMES, make_param, run_suite

DEFAULT_MAX_Q = 1009
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def max_q() -> int:
    raw = os.environ.get("MPC_DESK_MAX_Q")
    if raw is None:
        return DEFAULT_MAX_Q
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"MPC_DESK_MAX_Q={raw!r} is not an integer") from None


def prime(text: str) -> int:
    try:
        q = int(text)
    except ValueError:
        raise UsageError(f"{text!r} is not an integer") from None
    if not is_prime(q):
        raise UsageError(f"q={q} is not prime")
    if q > max_q():
        raise UsageError(f"q={q} exceeds the desk-scale bound {max_q()} (set MPC_DESK_MAX_Q)")
    return q


def prime_list(text: str) -> list[int]:
    return [prime(t) for t in text.split(",") if t.strip()]


def address(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise UsageError(f"address {text!r} is not host:port")
    return host or "127.0.0.1", int(port)


def key_values(pairs) -> dict[str, str]:
    out = {}
    for item in pairs or []:
        k, sep, v = item.partition("=")
        if not sep or not k:
            raise UsageError(f"--input expects key=value, got {item!r}")
        out[k] = v
    return out


# -- verify ---------------------------------------------------------------


def cmd_verify(args) -> int:
    qs = prime_list(args.q)
    if not qs:
        raise UsageError("--q needs at least one prime")
    suites = SUITE_NAMES if args.suite == "all" else (args.suite,)
    reports = []
    for q in qs:
        param = make_param(q, args.backend)
        for name in suites:
            reports += run_suite(name, param, convention=args.ddh_sr, seed=args.seed)
    ok = all(r.passed for r in reports)
    if args.format == "json":
        text = json.dumps(
            {"pass": ok, "reports": [r.to_dict() for r in reports]}, sort_keys=True, indent=2
        )
    else:
        text = "\n\n".join(r.to_text() for r in reports) + f"\n\n{'PASS' if ok else 'FAIL'}"
    _emit(text, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


# -- tv ---------------------------------------------------------------------


def cmd_tv(args) -> int:
    if args.list:
        for pid, (desc, _) in PROGRAMS.items():
            print(f"{pid:24} {desc}")
        return EXIT_OK
    if args.left is None or args.right is None or args.q is None:
        raise UsageError("tv needs --left, --right and --q")
    for pid in (args.left, args.right):
        if pid not in PROGRAMS:
            raise UsageError(f"unknown program id {pid!r}; try --list")
    param = make_param(prime(args.q), args.backend)
    inputs = key_values(args.input)
    try:
        left = PROGRAMS[args.left][1](param, inputs)
        right = PROGRAMS[args.right][1](param, inputs)
    except (PreconditionError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    print(fmt_rational(tv_distance(left, right)))
    return EXIT_OK


# -- reduce -----------------------------------------------------------------


def cmd_reduce(args) -> int:
    if args.distinguishers < 1:
        raise UsageError("--distinguishers must be at least 1")
    if args.adv2_position not in (3, 4):
        raise UsageError("--adv2-position must be 3 or 4")
    G = make_param(prime(args.q), args.backend).group
    m0, m1 = G.pow(1), G.pow(2)
    family = random_distinguishers(G, args.distinguishers, args.seed)
    ok = True
    for name, D in family:
        lhs, a1, a2 = reduction_identity(G, D, m0, m1, args.adv2_position)
        holds = lhs == a1 - a2
        ok &= holds
        print(f"{name} {fmt_rational(lhs)} {fmt_rational(a1)} {fmt_rational(a2)} {'OK' if holds else 'VIOLATED'}")
    print("identity holds" if ok else "identity violated")
    return EXIT_OK if ok else EXIT_FAIL


# -- run / replay -----------------------------------------------------------


def _run_input(protocol: str, role: str, kv: dict, q: int, p, g):
    def need(key):
        if key not in kv:
            raise UsageError(f"{role} in {protocol} needs --input {key}=...")
        try:
            return int(kv[key])
        except ValueError:
            raise UsageError(f"--input {key} must be an integer") from None

    def bit(key):
        v = need(key)
        if v not in (0, 1):
            raise UsageError(f"--input {key} must be 0 or 1")
        return bool(v)

    if role == "TI":
        return None
    if protocol == "secmult":
        v = need("x" if role == "P1" else "y")
        if not 0 <= v < q:
            raise UsageError(f"input must lie in [0, {q})")
        return v
    if protocol == "np-ot":
        if role == "P1":
            G = schnorr_group(q, p, g)
            return G.pow(need("m0")), G.pow(need("m1"))
        return int(bit("v"))
    if protocol == "bit-ot":
        return (bit("m0"), bit("m1")) if role == "P1" else bit("b")
    return bit("a") if role == "P1" else bit("b")


def _show(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return str(int(value))
    return str(getattr(value, "value", value))


def cmd_run(args) -> int:
    protocol, role = args.protocol, args.role
    if role not in ROLES[protocol]:
        raise UsageError(f"{protocol} has no {role} role")
    q = prime(args.q) if args.q is not None else (2 if protocol in ("bit-ot", "and-gate") else None)
    if q is None:
        raise UsageError(f"{protocol} needs --q")
    try:
        cfg = SessionConfig(
            role=role,
            protocol=protocol,
            q=q,
            seed=args.seed,
            p=args.p,
            g=args.g,
            listen=address(args.listen) if args.listen else None,
            connect=address(args.connect) if args.connect else None,
            ti=address(args.ti) if args.ti else None,
            session_id=args.session,
            transcript=args.transcript,
            timeout=args.timeout,
        )
        cfg.input = _run_input(protocol, role, key_values(args.input), q, cfg.p, cfg.g)
    except PreconditionError as exc:
        raise UsageError(str(exc)) from None
    if role in ("TI", "P1") and cfg.listen is None:
        raise UsageError(f"{role} needs --listen")
    if role != "TI" and cfg.has_ti and cfg.ti is None:
        raise UsageError(f"{role} needs --ti")
    if role == "P2" and cfg.connect is None:
        raise UsageError("P2 needs --connect")
    try:
        result = serve(cfg)
    except SessionAbort as exc:
        print(f"{role} abort: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(f"{role} {protocol} output {_show(result.output)}")
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        t = Transcript.load(args.transcript)
    except (OSError, TranscriptError) as exc:
        print(f"REPLAY FAIL: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.role and args.role != t.role or args.protocol and args.protocol != t.protocol:
        print(f"REPLAY FAIL: transcript is {t.protocol}/{t.role}", file=sys.stderr)
        return EXIT_FAIL
    if args.seed is not None and args.seed != t.seed:
        print(f"REPLAY FAIL: transcript seed is {t.seed}", file=sys.stderr)
        return EXIT_FAIL
    try:
        res = replay(t)
    except (C.DecodeError, TranscriptError, PreconditionError) as exc:
        print(f"REPLAY FAIL: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if not res.ok:
        print(f"REPLAY FAIL: {res.detail}", file=sys.stderr)
        return EXIT_FAIL
    print(f"REPLAY OK {t.protocol} {t.role} output {_show(res.run.output)}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mpcbench", description="Exact security checks and networked runs.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run check suites")
    v.add_argument("--suite", choices=SUITE_NAMES + ("all",), default="all")
    v.add_argument("--q", default="5")
    v.add_argument("--ddh-sr", choices=("raw", "simplified"), default="raw")
    v.add_argument("--backend", choices=("exponent", "schnorr"), default="exponent")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out")
    v.add_argument("--format", choices=("json", "text"), default="json")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("tv", help="exact TV distance between two named programs")
    t.add_argument("--left")
    t.add_argument("--right")
    t.add_argument("--q")
    t.add_argument("--list", action="store_true", help="show program ids")
    t.add_argument("--input", action="append", metavar="KEY=VALUE")
    t.add_argument("--backend", choices=("exponent", "schnorr"), default="exponent")
    t.set_defaults(func=cmd_tv)

    r = sub.add_parser("reduce", help="check the DDH reduction identity")
    r.add_argument("--q", required=True)
    r.add_argument("--distinguishers", type=int, default=100)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--adv2-position", type=int, default=4, help=argparse.SUPPRESS)
    r.add_argument("--backend", choices=("exponent", "schnorr"), default="exponent")
    r.set_defaults(func=cmd_reduce)

    n = sub.add_parser("run", help="run one party of a networked session")
    n.add_argument("--role", choices=("P1", "P2", "TI"), required=True)
    n.add_argument("--protocol", choices=tuple(ROLES), required=True)
    n.add_argument("--q")
    n.add_argument("--p", type=int)
    n.add_argument("--g", type=int)
    n.add_argument("--listen")
    n.add_argument("--connect")
    n.add_argument("--ti")
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("--session", type=int, default=0)
    n.add_argument("--transcript")
    n.add_argument("--timeout", type=float, default=10.0)
    n.add_argument("--input", action="append", metavar="KEY=VALUE")
    n.set_defaults(func=cmd_run)

    p = sub.add_parser("replay", help="replay a stored transcript")
    p.add_argument("--transcript", required=True)
    p.add_argument("--role", choices=("P1", "P2", "TI"))
    p.add_argument("--protocol", choices=tuple(ROLES))
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
