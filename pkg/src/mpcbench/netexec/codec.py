"""Fixed-width value encodings and the length-prefixed frame format.

Frame layout::

    length (4 bytes, big-endian, counts everything after itself)
    session_type (1 byte)
    msg_tag (1 byte)
    payload

Field and group elements are 8-byte big-endian unsigned integers, bits are a
single 0x00/0x01 byte.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from ..algebra import Group, GroupElem
from ..dist import PreconditionError

SECMULT, NPOT, BITOT, ANDGATE = 0x01, 0x02, 0x03, 0x04
SESSION_TYPES = {"secmult": SECMULT, "np-ot": NPOT, "bit-ot": BITOT, "and-gate": ANDGATE}
PROTOCOL_NAMES = {v: k for k, v in SESSION_TYPES.items()}

HELLO = 0x00
ERROR = 0xFF

# secmult
SM_SHARES_P1, SM_SHARES_P2, SM_E2, SM_E1 = 0x10, 0x11, 0x12, 0x13
# Naor-Pinkas
NP_QUERY, NP_CIPHERTEXTS = 0x20, 0x21
# bit OT (also embedded in the AND gate)
OT_PADS_P1, OT_PADS_P2, OT_E, OT_F = 0x30, 0x31, 0x32, 0x33

HELLO_SIZE = 33
MAX_FRAME = 1 << 12

PAYLOAD_SIZES: dict[int, dict[int, int]] = {
    SECMULT: {SM_SHARES_P1: 16, SM_SHARES_P2: 16, SM_E2: 8, SM_E1: 8},
    NPOT: {NP_QUERY: 32, NP_CIPHERTEXTS: 32},
    BITOT: {OT_PADS_P1: 2, OT_PADS_P2: 2, OT_E: 1, OT_F: 2},
    ANDGATE: {OT_PADS_P1: 2, OT_PADS_P2: 2, OT_E: 1, OT_F: 2},
}
for _sizes in PAYLOAD_SIZES.values():
    _sizes[HELLO] = HELLO_SIZE
    _sizes[ERROR] = 1

# error reason codes; 0x00 is local only and never sent
PEER_CLOSED = 0x00
PARAM_MISMATCH = 0x01
MALFORMED = 0x02
UNEXPECTED = 0x03
CHECK_FAILED = 0x04
ROLE_ERROR = 0x05
REASONS = {
    PEER_CLOSED: "peer disconnected",
    PARAM_MISMATCH: "parameter mismatch",
    MALFORMED: "malformed frame",
    UNEXPECTED: "unexpected message",
    CHECK_FAILED: "protocol check failed",
    ROLE_ERROR: "unexpected peer role",
}

ROLE_CODES = {"P1": 1, "P2": 2, "TI": 3}
ROLE_NAMES = {v: k for k, v in ROLE_CODES.items()}


class DecodeError(ValueError):
    pass


_U64 = struct.Struct(">Q")
_HEADER = struct.Struct(">IBB")


# -- scalars ----------------------------------------------------------------


def encode_field(value: int, q: int) -> bytes:
    if not 0 <= value < q:
        raise PreconditionError(f"{value} is not reduced mod {q}")
    return _U64.pack(value)


def decode_field(data: bytes, q: int) -> int:
    if len(data) != 8:
        raise DecodeError(f"field element needs 8 bytes, got {len(data)}")
    (value,) = _U64.unpack(data)
    if value >= q:
        raise DecodeError(f"{value} out of range mod {q}")
    return value


def encode_group(h: GroupElem) -> bytes:
    return _U64.pack(h.value)


def decode_group(data: bytes, G: Group) -> GroupElem:
    if len(data) != 8:
        raise DecodeError(f"group element needs 8 bytes, got {len(data)}")
    (value,) = _U64.unpack(data)
    try:
        return G.element(value)
    except PreconditionError as exc:
        raise DecodeError(str(exc)) from None


def encode_bit(b: bool) -> bytes:
    return b"\x01" if b else b"\x00"


def decode_bit(data: bytes) -> bool:
    if len(data) != 1 or data[0] > 1:
        raise DecodeError(f"bad bit encoding {data!r}")
    return data[0] == 1


def split(data: bytes, width: int) -> list[bytes]:
    if len(data) % width:
        raise DecodeError(f"payload of {len(data)} bytes is not a multiple of {width}")
    return [data[i : i + width] for i in range(0, len(data), width)]


def fields(data: bytes, q: int) -> list[int]:
    return [decode_field(c, q) for c in split(data, 8)]


def group_elems(data: bytes, G: Group) -> list[GroupElem]:
    return [decode_group(c, G) for c in split(data, 8)]


def bits(data: bytes) -> list[bool]:
    return [decode_bit(data[i : i + 1]) for i in range(len(data))]


# -- frames -----------------------------------------------------------------


@dataclass(frozen=True)
class Frame:
    session_type: int
    tag: int
    payload: bytes

    def encode(self) -> bytes:
        return _HEADER.pack(len(self.payload) + 2, self.session_type, self.tag) + self.payload


def encode_frame(session_type: int, tag: int, payload: bytes) -> bytes:
    return Frame(session_type, tag, payload).encode()


def decode_frame(data: bytes) -> Frame:
    """Decode exactly one frame; trailing bytes are an error."""
    if len(data) < _HEADER.size:
        raise DecodeError("truncated frame header")
    length, stype, tag = _HEADER.unpack_from(data)
    if length < 2 or length > MAX_FRAME:
        raise DecodeError(f"bad frame length {length}")
    if len(data) != 4 + length:
        raise DecodeError(f"frame length {length} but {len(data) - 4} bytes present")
    frame = Frame(stype, tag, data[_HEADER.size :])
    check_frame(frame)
    return frame


def check_frame(frame: Frame) -> None:
    sizes = PAYLOAD_SIZES.get(frame.session_type)
    if sizes is None:
        raise DecodeError(f"unknown session type {frame.session_type:#04x}")
    want = sizes.get(frame.tag)
    if want is None:
        raise DecodeError(f"unknown tag {frame.tag:#04x} for session type {frame.session_type:#04x}")
    if len(frame.payload) != want:
        raise DecodeError(f"tag {frame.tag:#04x} carries {want} bytes, got {len(frame.payload)}")


@dataclass(frozen=True)
class Hello:
    role: str
    q: int
    p: int
    g: int
    session_id: int

    def encode(self) -> bytes:
        return bytes([ROLE_CODES[self.role]]) + b"".join(
            _U64.pack(v) for v in (self.q, self.p, self.g, self.session_id)
        )

    @classmethod
    def decode(cls, data: bytes) -> "Hello":
        if len(data) != HELLO_SIZE:
            raise DecodeError("bad hello size")
        if data[0] not in ROLE_NAMES:
            raise DecodeError(f"unknown role code {data[0]}")
        q, p, g, sid = (_U64.unpack_from(data, 1 + 8 * i)[0] for i in range(4))
        return cls(ROLE_NAMES[data[0]], q, p, g, sid)

    def params(self) -> tuple[int, int, int, int]:
        return self.q, self.p, self.g, self.session_id
