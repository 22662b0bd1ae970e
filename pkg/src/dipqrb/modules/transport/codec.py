"""Binary framing: 4-byte big-endian payload length, 1-byte type, payload."""

from __future__ import annotations

import math
import struct

import pydantic

from dipqrb.contracts import Mode, Outcome, RoundAnnouncement, SessionStatus
from dipqrb.exceptions import FrameError
from dipqrb.modules.transport.schemas import (
    MAX_PAYLOAD,
    ClientAck,
    ConfigMessage,
    ErrorMessage,
    Hello,
    Message,
    MessageType,
    SessionEnd,
)

HEADER = struct.Struct(">IB")
_HELLO = struct.Struct(">HI")
_CONFIG = struct.Struct(">IdBddddddddB")
_ANNOUNCE = struct.Struct(">QBBBBB")
_ACK = struct.Struct(">Q")
_END = struct.Struct(">B")

_MODES = (Mode.SEMI_DI, Mode.FULLY_DI)
_STATUSES = (SessionStatus.COMPLETED, SessionStatus.ABORTED, SessionStatus.TRANSPORT_ERROR)


def _payload(message: Message) -> tuple[MessageType, bytes]:
    if isinstance(message, Hello):
        return MessageType.HELLO, _HELLO.pack(message.version, message.session_id)
    if isinstance(message, ConfigMessage):
        has_route1 = message.gamma_route1 is not None
        return MessageType.CONFIG, _CONFIG.pack(
            message.n,
            message.gamma,
            int(has_route1),
            message.gamma_route1 if has_route1 else 0.0,
            message.p_switch,
            *message.p_x,
            *message.p_y,
            *message.p_z,
            _MODES.index(message.mode),
        )
    if isinstance(message, RoundAnnouncement):
        return MessageType.ROUND_ANNOUNCE, _ANNOUNCE.pack(
            message.i, message.s, message.x, message.y, int(message.a), int(message.b)
        )
    if isinstance(message, ClientAck):
        return MessageType.CLIENT_ACK, _ACK.pack(message.i)
    if isinstance(message, SessionEnd):
        return MessageType.SESSION_END, _END.pack(_STATUSES.index(message.status))
    if isinstance(message, ErrorMessage):
        code = message.code.encode("utf-8")
        if len(code) > 255:
            raise FrameError("Error code too long", code="malformed")
        return MessageType.ERROR, bytes([len(code)]) + code + message.text.encode("utf-8")
    raise FrameError(f"Cannot encode {type(message).__name__}", code="unknown_type")


def encode(message: Message) -> bytes:
    """Frame one message."""
    msg_type, payload = _payload(message)
    if len(payload) > MAX_PAYLOAD:
        raise FrameError(f"Payload of {len(payload)} bytes exceeds {MAX_PAYLOAD}", code="too_large")
    return HEADER.pack(len(payload), int(msg_type)) + payload


def _unpack(layout: struct.Struct, payload: bytes) -> tuple:
    if len(payload) != layout.size:
        raise FrameError(
            f"Payload has {len(payload)} bytes, expected {layout.size}", code="malformed"
        )
    return layout.unpack(payload)


def _decode_payload(msg_type: MessageType, payload: bytes) -> Message:
    if msg_type is MessageType.HELLO:
        version, session_id = _unpack(_HELLO, payload)
        return Hello(version=version, session_id=session_id)

    if msg_type is MessageType.CONFIG:
        n, gamma, has_route1, route1, p_switch, x0, x1, y0, y1, z0, z1, mode = _unpack(
            _CONFIG, payload
        )
        if has_route1 not in (0, 1) or (has_route1 == 0 and payload[13:21] != bytes(8)):
            raise FrameError("Bad gamma_route1 flag", code="malformed")
        if not all(math.isfinite(v) for v in (gamma, route1, p_switch, x0, x1, y0, y1, z0, z1)):
            raise FrameError("Non-finite value in CONFIG", code="malformed")
        if mode >= len(_MODES):
            raise FrameError(f"Unknown mode {mode}", code="alphabet")
        return ConfigMessage(
            n=n,
            gamma=gamma,
            gamma_route1=route1 if has_route1 else None,
            p_switch=p_switch,
            p_x=(x0, x1),
            p_y=(y0, y1),
            p_z=(z0, z1),
            mode=_MODES[mode],
        )

    if msg_type is MessageType.ROUND_ANNOUNCE:
        i, s, x, y, a, b = _unpack(_ANNOUNCE, payload)
        if max(s, x, y) > 1 or max(a, b) > int(Outcome.VOID):
            raise FrameError("Announcement field outside its alphabet", code="alphabet")
        return RoundAnnouncement(i=i, s=s, x=x, y=y, a=a, b=b)

    if msg_type is MessageType.CLIENT_ACK:
        (i,) = _unpack(_ACK, payload)
        return ClientAck(i=i)

    if msg_type is MessageType.SESSION_END:
        (status,) = _unpack(_END, payload)
        if status >= len(_STATUSES):
            raise FrameError(f"Unknown session status {status}", code="alphabet")
        return SessionEnd(status=_STATUSES[status])

    if not payload or len(payload) < 1 + payload[0]:
        raise FrameError("Error message shorter than its code", code="malformed")
    size = payload[0]
    try:
        return ErrorMessage(
            code=payload[1 : 1 + size].decode("utf-8"),
            text=payload[1 + size :].decode("utf-8"),
        )
    except UnicodeDecodeError as e:
        raise FrameError(f"Error message is not UTF-8: {e}", code="malformed") from e


def decode_header(header: bytes) -> tuple[int, MessageType]:
    """Payload length and type from a 5-byte header.

    Raises:
        FrameError: On a short header, unknown type or oversized payload
    """
    if len(header) < HEADER.size:
        raise FrameError(f"Header needs {HEADER.size} bytes, got {len(header)}", code="truncated")
    length, raw_type = HEADER.unpack(header[: HEADER.size])
    try:
        msg_type = MessageType(raw_type)
    except ValueError:
        raise FrameError(f"Unknown message type {raw_type}", code="unknown_type") from None
    if length > MAX_PAYLOAD:
        raise FrameError(f"Payload of {length} bytes exceeds {MAX_PAYLOAD}", code="too_large")
    return length, msg_type


def decode(data: bytes) -> Message:
    """Parse exactly one frame.

    Raises:
        FrameError: On truncation, trailing bytes, unknown types or
            out-of-alphabet fields
    """
    length, msg_type = decode_header(data)
    payload = data[HEADER.size :]
    if len(payload) < length:
        raise FrameError(
            f"Frame declares {length} payload bytes, {len(payload)} present", code="truncated"
        )
    if len(payload) > length:
        raise FrameError(f"{len(payload) - length} trailing bytes after frame", code="malformed")
    try:
        return _decode_payload(msg_type, payload)
    except pydantic.ValidationError as e:
        raise FrameError(f"Invalid {msg_type.name} fields: {e}", code="alphabet") from e
