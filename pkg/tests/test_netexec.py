import threading
from collections import Counter
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpcbench import secmult
from mpcbench.algebra import schnorr_group
from mpcbench.dist import PreconditionError
from mpcbench.netexec import codec as C
from mpcbench.netexec import (
    CounterRng,
    SessionConfig,
    Transcript,
    replay,
    run_local_session,
    sample_view,
    view_from_transcripts,
)
from mpcbench.netexec.session import execute_in_memory

G5 = schnorr_group(5)


# -- codec --------------------------------------------------------------------


def test_field_encoding():
    assert C.encode_field(3, 7) == bytes.fromhex("0000000000000003")
    for v in range(7):
        assert C.decode_field(C.encode_field(v, 7), 7) == v
    with pytest.raises(C.DecodeError):
        C.decode_field(C.encode_field(3, 7), 3)
    with pytest.raises(C.DecodeError):
        C.decode_field(b"\x00" * 9, 7)
    with pytest.raises(PreconditionError):
        C.encode_field(7, 7)


def test_group_and_bit_encoding():
    for h in G5.elements():
        assert C.decode_group(C.encode_group(h), G5) == h
    with pytest.raises(C.DecodeError):
        C.decode_group(C.encode_group(G5.pow(1))[:7], G5)
    with pytest.raises(C.DecodeError):
        C.decode_group((2).to_bytes(8, "big"), G5)  # not in the subgroup
    assert C.encode_bit(True) == b"\x01" and C.decode_bit(b"\x00") is False
    with pytest.raises(C.DecodeError):
        C.decode_bit(b"\x02")


@given(st.sampled_from(sorted(C.PAYLOAD_SIZES)), st.data())
def test_frame_round_trip(stype, data):
    tag = data.draw(st.sampled_from(sorted(C.PAYLOAD_SIZES[stype])))
    payload = data.draw(st.binary(min_size=C.PAYLOAD_SIZES[stype][tag], max_size=C.PAYLOAD_SIZES[stype][tag]))
    raw = C.encode_frame(stype, tag, payload)
    assert int.from_bytes(raw[:4], "big") == len(raw) - 4
    assert C.decode_frame(raw) == C.Frame(stype, tag, payload)


def test_bad_frames():
    good = C.encode_frame(C.SECMULT, C.SM_E2, bytes(8))
    for bad in (good[:-1], good + b"\x00", good[:3], C.encode_frame(C.SECMULT, C.SM_E2, bytes(7)),
                C.encode_frame(0x09, C.SM_E2, bytes(8)), C.encode_frame(C.SECMULT, 0x77, bytes(8))):
        with pytest.raises(C.DecodeError):
            C.decode_frame(bad)


def test_hello_round_trip():
    h = C.Hello("TI", 7, 0, 0, 42)
    assert C.Hello.decode(h.encode()) == h
    assert len(h.encode()) == C.HELLO_SIZE


def test_counter_rng():
    a, b = CounterRng(5, "P1"), CounterRng(5, "P1")
    assert [a.below(1000) for _ in range(20)] == [b.below(1000) for _ in range(20)]
    c, d = CounterRng(5, "P1"), CounterRng(5, "P2")
    assert [c.below(1 << 30) for _ in range(4)] != [d.below(1 << 30) for _ in range(4)]
    rng = CounterRng(9)
    counts = Counter(rng.below(3) for _ in range(3000))
    assert set(counts) == {0, 1, 2} and min(counts.values()) > 850
    with pytest.raises(ValueError):
        CounterRng(-1)


# -- sessions -----------------------------------------------------------------


def test_secmult_example():
    r = run_local_session("secmult", (3, 4), q=7, seed=11)
    assert all(x.ok for x in r.values())
    assert (r["P1"].output + r["P2"].output) % 7 == 5


def test_npot_example_matches_execute():
    m0, m1 = G5.pow(2), G5.pow(4)
    r = run_local_session("np-ot", (m0, m1, 1), q=5, seed=3)
    assert r["P2"].output == m1 and r["P1"].output is None


def test_and_example():
    r = run_local_session("and-gate", (True, True), q=2, seed=1)
    assert r["P1"].output ^ r["P2"].output is True


@pytest.mark.parametrize("seed", range(5))
def test_bitot_sessions(seed):
    for m0, m1, b in product((False, True), repeat=3):
        r = run_local_session("bit-ot", (m0, m1, b), q=2, seed=seed)
        assert r["P2"].output == (m1 if b else m0)


def test_transcripts_replay_and_are_deterministic(tmp_path):
    first = run_local_session("secmult", (2, 6), q=7, seed=99, transcript_dir=tmp_path)
    paths = {role: tmp_path / f"secmult-0-{role}.mpct" for role in first}
    stored = {role: p.read_bytes() for role, p in paths.items()}
    assert stored["P1"][:4] == b"MPCT" and len(stored["P1"]) > 16
    again = run_local_session("secmult", (2, 6), q=7, seed=99)
    for role, res in again.items():
        assert res.transcript.to_bytes() == stored[role]
        assert replay(Transcript.load(paths[role])).ok


def test_tampered_transcript_fails_replay():
    r = run_local_session("secmult", (2, 6), q=7, seed=1)
    raw = bytearray(r["P1"].transcript.to_bytes())
    raw[-1] ^= 1  # flip a bit of the recorded output
    assert not replay(Transcript.from_bytes(bytes(raw))).ok


def test_transcript_view_equals_sample_view():
    r = run_local_session("secmult", (1, 2), q=3, seed=17)
    transcripts = {role: res.transcript for role, res in r.items()}
    for party in ("P1", "P2"):
        assert view_from_transcripts(transcripts, party) == sample_view("secmult", (1, 2), 17, party, q=3)


def test_sampled_view_relation():
    for seed in range(50):
        v = sample_view("secmult", (2, 1), seed, "P1", q=5)
        assert v.s1 == (v.x * v.e1 - v.d1) % 5
        assert v in secmult.real_view1(5, 2, 1)


def test_parameter_mismatch_aborts_both():
    r = run_local_session("np-ot", (G5.pow(1), G5.pow(2), 0), q=5, seed=0, overrides={"P2": {"session_id": 9}})
    assert r["P1"].error.reason == C.PARAM_MISMATCH
    assert r["P2"].error.reason == C.PARAM_MISMATCH


def test_mismatch_against_initializer_aborts_everyone():
    r = run_local_session("secmult", (1, 1), q=7, seed=0, overrides={"P1": {"q": 5}}, timeout=3)
    assert {res.error.reason for res in r.values()} == {C.PARAM_MISMATCH}


def test_malformed_frame_aborts(tmp_path):
    import socket

    server = socket.create_server(("127.0.0.1", 0))
    addr = server.getsockname()[:2]
    cfg = SessionConfig("P1", "np-ot", 5, seed=0, input=(G5.pow(1), G5.pow(2)), listen_sock=server, timeout=3)
    out = {}

    def run():
        from mpcbench.netexec import SessionAbort, serve

        try:
            serve(cfg)
        except SessionAbort as exc:
            out["err"] = exc

    t = threading.Thread(target=run)
    t.start()
    with socket.create_connection(addr) as s:
        hello = C.Hello("P2", 5, G5.p, G5.g, 0)
        s.sendall(C.encode_frame(C.NPOT, C.HELLO, hello.encode()))
        s.recv(100)
        s.sendall(C.encode_frame(C.NPOT, C.NP_QUERY, bytes(31))[:-2])  # truncated
        s.sendall((1 << 20).to_bytes(4, "big"))
    t.join(5)
    assert out["err"].reason == C.MALFORMED


def test_equal_query_components_rejected():
    # a receiver that sends z0 == z1 trips the sender's check
    from mpcbench.netexec.roles import Context, npot_sender

    ctx = Context(5, CounterRng(0), G5)
    gen = npot_sender(ctx, (G5.pow(1), G5.pow(2)))
    next(gen)
    same = b"".join(C.encode_group(G5.pow(i)) for i in (1, 2, 3, 3))
    from mpcbench.netexec.roles import ProtocolCheckFailed

    with pytest.raises(ProtocolCheckFailed):
        gen.send(same)


def test_config_validation():
    with pytest.raises(PreconditionError):
        SessionConfig("TI", "np-ot", 5)
    with pytest.raises(PreconditionError):
        SessionConfig("P1", "secmult", 6)
    with pytest.raises(PreconditionError):
        SessionConfig("P1", "np-ot", 7)  # no built-in Schnorr group


def test_in_memory_matches_network():
    r = run_local_session("and-gate", (True, False), q=2, seed=5)
    runs = execute_in_memory("and-gate", (True, False), q=2, seed=5)
    assert {k: v.output for k, v in runs.items()} == {k: v.output for k, v in r.items()}
