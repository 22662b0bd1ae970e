"""Wire protocol and transports for live beacon sessions."""

from dipqrb.modules.transport.channel import (
    Channel,
    QueueChannel,
    StreamChannel,
    loopback_pair,
)
from dipqrb.modules.transport.client import connect, run_client_session, run_remote_session
from dipqrb.modules.transport.codec import decode, decode_header, encode
from dipqrb.modules.transport.schemas import (
    PROTOCOL_VERSION,
    ClientAck,
    ConfigMessage,
    ErrorMessage,
    Hello,
    Message,
    MessageType,
    SessionEnd,
)
from dipqrb.modules.transport.server import BeaconServer, ack_due

__all__ = [
    "PROTOCOL_VERSION",
    "BeaconServer",
    "Channel",
    "ClientAck",
    "ConfigMessage",
    "ErrorMessage",
    "Hello",
    "Message",
    "MessageType",
    "QueueChannel",
    "SessionEnd",
    "StreamChannel",
    "ack_due",
    "connect",
    "decode",
    "decode_header",
    "encode",
    "loopback_pair",
    "run_client_session",
    "run_remote_session",
]
