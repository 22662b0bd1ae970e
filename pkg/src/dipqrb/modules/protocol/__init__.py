"""Beacon protocol: round loop, scoring and transcripts."""

from dipqrb.modules.protocol.schemas import (
    PROTOCOL_CONFIG_KEYS,
    ProtocolConfig,
    Transcript,
    TranscriptReport,
)
from dipqrb.modules.protocol.scoring import score_function
from dipqrb.modules.protocol.session import ClientSession, ServerSession, run_session
from dipqrb.modules.protocol.streams import (
    ClientStreams,
    CountedStream,
    ServerStreams,
    session_seed,
)
from dipqrb.modules.protocol.transcript import check_transcript, raw_string

__all__ = [
    "PROTOCOL_CONFIG_KEYS",
    "ClientSession",
    "ClientStreams",
    "CountedStream",
    "ProtocolConfig",
    "ServerSession",
    "ServerStreams",
    "Transcript",
    "TranscriptReport",
    "check_transcript",
    "raw_string",
    "run_session",
    "score_function",
    "session_seed",
]
