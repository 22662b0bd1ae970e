"""Beacon client: drives a ClientSession over a channel."""

from __future__ import annotations

import asyncio
import logging

from dipqrb.contracts import RoundAnnouncement
from dipqrb.exceptions import BeaconError, TransportError
from dipqrb.modules.photonic_sim import OpticalModel
from dipqrb.modules.protocol import ClientSession, ProtocolConfig, Transcript
from dipqrb.modules.transport.channel import StreamChannel
from dipqrb.modules.transport.schemas import (
    PROTOCOL_VERSION,
    ClientAck,
    ConfigMessage,
    ErrorMessage,
    Hello,
    SessionEnd,
)
from dipqrb.modules.transport.server import ack_due
from dipqrb.settings import settings
from dipqrb.utils.retry import RetryError, retry_async

logger = logging.getLogger(__name__)


@retry_async()
async def connect(host: str | None = None, port: int | None = None) -> StreamChannel:
    """Open a socket channel to a beacon server, retrying with backoff."""
    reader, writer = await asyncio.open_connection(
        host or settings.host, settings.port if port is None else port
    )
    return StreamChannel(reader, writer)


async def run_client_session(
    config: ProtocolConfig,
    model: OpticalModel,
    channel,
    session_id: int = 0,
    ack_every: int | None = None,
) -> Transcript:
    """Run the client side of one session.

    Any transport or protocol failure ends the session with status
    ``transport_error`` and the rounds received so far.

    Args:
        config: Client config (its seeds drive Z, T and C)
        model: Optical model for the client detector
        channel: Connected channel
        session_id: Requested session id
        ack_every: ACK cadence; must match the server

    Returns:
        Transcript of the session
    """
    ack_every = ack_every or settings.ack_every
    client = ClientSession(config, model, session_id)
    try:
        await channel.send(Hello(version=PROTOCOL_VERSION, session_id=session_id))
        reply = await channel.recv()
        if isinstance(reply, ErrorMessage):
            return client.fail(f"{reply.code}: {reply.text}")
        if not isinstance(reply, ConfigMessage):
            return client.fail(f"Expected CONFIG, got {type(reply).__name__}")
        mismatched = reply.mismatches(config)
        if mismatched:
            await channel.send(ErrorMessage(code="config_mismatch", text=",".join(mismatched)))
            return client.fail(f"Server config differs in {', '.join(mismatched)}")

        while not client.complete:
            message = await channel.recv()
            if isinstance(message, ErrorMessage):
                return client.fail(f"{message.code}: {message.text}")
            if not isinstance(message, RoundAnnouncement):
                return client.fail(f"Expected ROUND_ANNOUNCE, got {type(message).__name__}")
            client.receive(message)
            if ack_due(message.i, config.n, ack_every):
                await channel.send(ClientAck(i=message.i))

        try:
            end = await channel.recv()
            if not isinstance(end, SessionEnd):
                logger.warning(
                    f"Session {session_id}: expected SESSION_END, got {type(end).__name__}"
                )
        except TransportError as e:
            # Every round arrived; a missing SESSION_END does not void them.
            logger.warning(f"Session {session_id}: no SESSION_END ({e})")
        return client.finish()
    except BeaconError as e:
        return client.fail(str(e))
    finally:
        try:
            await channel.close()
        except TransportError:
            pass


async def run_remote_session(
    config: ProtocolConfig,
    model: OpticalModel,
    host: str | None = None,
    port: int | None = None,
    session_id: int = 0,
    ack_every: int | None = None,
) -> Transcript:
    """Connect over TCP and run one client session.

    Raises:
        TransportError: If no connection could be opened
    """
    try:
        channel = await connect(host, port)
    except RetryError as e:
        raise TransportError(f"Could not reach beacon server: {e.last_exception}") from e
    return await run_client_session(config, model, channel, session_id, ack_every)
