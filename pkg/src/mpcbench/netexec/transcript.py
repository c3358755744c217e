"""Per-party transcript files.

Layout: a 16-byte header (``MPCT``, version, session type, role code, one
reserved byte, 8-byte seed) followed by records.  Each record is a kind
byte, a peer role byte (0 for local records) and one length-prefixed frame.
Input and output records reuse the frame layout with tags 0xF0 / 0xF1.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

from . import codec as C

MAGIC = b"MPCT"
VERSION = 1
_HEADER = struct.Struct(">4sBBBBQ")

SENT, RECEIVED, INPUT, OUTPUT = 0x01, 0x02, 0x03, 0x04
INPUT_TAG, OUTPUT_TAG = 0xF0, 0xF1


class TranscriptError(ValueError):
    pass


@dataclass(frozen=True)
class Record:
    kind: int
    peer: str  # "" for local records
    frame: bytes

    @property
    def decoded(self) -> C.Frame:
        length, stype, tag = struct.unpack_from(">IBB", self.frame)
        return C.Frame(stype, tag, self.frame[6:])

    @property
    def tag(self) -> int:
        return self.frame[5]

    @property
    def payload(self) -> bytes:
        return self.frame[6:]


@dataclass
class Transcript:
    protocol: str
    role: str
    seed: int
    records: list[Record] = field(default_factory=list)

    @property
    def session_type(self) -> int:
        return C.SESSION_TYPES[self.protocol]

    def add(self, kind: int, peer: str, frame: bytes) -> None:
        self.records.append(Record(kind, peer, frame))

    def add_local(self, kind: int, payload: bytes) -> None:
        tag = INPUT_TAG if kind == INPUT else OUTPUT_TAG
        self.add(kind, "", C.encode_frame(self.session_type, tag, payload))

    def messages(self) -> Iterator[Record]:
        return (r for r in self.records if r.kind in (SENT, RECEIVED))

    def local(self, kind: int) -> Optional[bytes]:
        for r in self.records:
            if r.kind == kind:
                return r.payload
        return None

    def own_hello(self) -> C.Hello:
        for r in self.messages():
            if r.kind == SENT and r.tag == C.HELLO:
                return C.Hello.decode(r.payload)
        raise TranscriptError("transcript has no outgoing hello")

    @property
    def session_id(self) -> int:
        return self.own_hello().session_id

    def to_bytes(self) -> bytes:
        out = [
            _HEADER.pack(MAGIC, VERSION, self.session_type, C.ROLE_CODES[self.role], 0, self.seed)
        ]
        for r in self.records:
            peer = C.ROLE_CODES[r.peer] if r.peer else 0
            out.append(bytes([r.kind, peer]) + r.frame)
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Transcript":
        if len(data) < _HEADER.size:
            raise TranscriptError("truncated transcript header")
        magic, version, stype, role, _, seed = _HEADER.unpack_from(data)
        if magic != MAGIC or version != VERSION:
            raise TranscriptError("not a transcript file")
        if stype not in C.PROTOCOL_NAMES or role not in C.ROLE_NAMES:
            raise TranscriptError("bad session type or role in header")
        t = cls(C.PROTOCOL_NAMES[stype], C.ROLE_NAMES[role], seed)
        pos = _HEADER.size
        while pos < len(data):
            if pos + 6 > len(data):
                raise TranscriptError("truncated record")
            kind, peer = data[pos], data[pos + 1]
            (length,) = struct.unpack_from(">I", data, pos + 2)
            end = pos + 6 + length
            if kind not in (SENT, RECEIVED, INPUT, OUTPUT) or end > len(data):
                raise TranscriptError("malformed record")
            if peer and peer not in C.ROLE_NAMES:
                raise TranscriptError("bad peer code")
            t.add(kind, C.ROLE_NAMES.get(peer, ""), data[pos + 2 : end])
            pos = end
        return t

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "Transcript":
        return cls.from_bytes(Path(path).read_bytes())
