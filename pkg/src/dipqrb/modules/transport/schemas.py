"""Wire message schemas."""

from __future__ import annotations

from enum import IntEnum

from pydantic import BaseModel, ConfigDict, Field

from dipqrb.contracts import Mode, RoundAnnouncement, SessionStatus
from dipqrb.modules.protocol import ProtocolConfig

PROTOCOL_VERSION = 1
MAX_PAYLOAD = 1 << 20

Pair = tuple[float, float]


class MessageType(IntEnum):
    HELLO = 1
    CONFIG = 2
    ROUND_ANNOUNCE = 3
    CLIENT_ACK = 4
    SESSION_END = 5
    ERROR = 6


class Hello(BaseModel):
    """Client greeting with the requested session id."""

    model_config = ConfigDict(frozen=True)

    version: int = Field(PROTOCOL_VERSION, ge=0, le=0xFFFF)
    session_id: int = Field(..., ge=0, le=0xFFFFFFFF)


class ConfigMessage(BaseModel):
    """Public session parameters announced by the server."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, le=0xFFFFFFFF)
    gamma: float
    gamma_route1: float | None = None
    p_switch: float
    p_x: Pair
    p_y: Pair
    p_z: Pair
    mode: Mode

    @classmethod
    def from_config(cls, config: ProtocolConfig) -> ConfigMessage:
        return cls(
            n=config.n,
            gamma=config.gamma,
            gamma_route1=config.gamma_route1,
            p_switch=config.p_switch,
            p_x=config.p_x,
            p_y=config.p_y,
            p_z=config.p_z,
            mode=config.mode,
        )

    def mismatches(self, config: ProtocolConfig) -> list[str]:
        """Names of fields that differ from the client's own config."""
        return [
            name
            for name in ("n", "gamma", "gamma_route1", "p_switch", "p_x", "p_y", "p_z", "mode")
            if getattr(self, name) != getattr(config, name)
        ]


class ClientAck(BaseModel):
    model_config = ConfigDict(frozen=True)

    i: int = Field(..., ge=0)


class SessionEnd(BaseModel):
    model_config = ConfigDict(frozen=True)

    status: SessionStatus


class ErrorMessage(BaseModel):
    """Error with a machine-readable code (``version``, ``session_in_use``, ...)."""

    model_config = ConfigDict(frozen=True)

    code: str = Field(..., min_length=1, max_length=255)
    text: str = ""


Message = Hello | ConfigMessage | RoundAnnouncement | ClientAck | SessionEnd | ErrorMessage
