"""Networked execution of the protocols with seeded, replayable transcripts."""

from .codec import DecodeError, decode_frame, encode_frame
from .rng import CounterRng
from .session import (
    SessionAbort,
    SessionConfig,
    SessionResult,
    execute_in_memory,
    replay,
    run_local_session,
    sample_view,
    serve,
    view_from_transcripts,
)
from .transcript import Transcript

__all__ = [
    "CounterRng",
    "DecodeError",
    "SessionAbort",
    "SessionConfig",
    "SessionResult",
    "Transcript",
    "decode_frame",
    "encode_frame",
    "execute_in_memory",
    "replay",
    "run_local_session",
    "sample_view",
    "serve",
    "view_from_transcripts",
]
