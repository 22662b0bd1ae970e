"""Beacon server: one handler per client session."""

from __future__ import annotations

import asyncio
import logging
from collections.abc import Callable

from dipqrb.contracts import SessionStatus
from dipqrb.exceptions import FrameError, TransportError
from dipqrb.modules.photonic_sim import OpticalModel
from dipqrb.modules.protocol import ProtocolConfig, ServerSession
from dipqrb.modules.transport.channel import Channel, QueueChannel, StreamChannel, loopback_pair
from dipqrb.modules.transport.schemas import (
    PROTOCOL_VERSION,
    ClientAck,
    ConfigMessage,
    ErrorMessage,
    Hello,
    SessionEnd,
)
from dipqrb.settings import settings
from dipqrb.utils.observability import get_metrics

logger = logging.getLogger(__name__)

SessionFactory = Callable[[int], ServerSession]


def ack_due(i: int, n: int, ack_every: int) -> bool:
    """Whether the client acknowledges round ``i`` of ``n``."""
    return (i + 1) % ack_every == 0 or i == n - 1


class BeaconServer:
    """Runs the server side of the protocol for concurrent clients.

    Sessions share only the read-only config and model; each gets its own
    seed streams derived from its session id.
    """

    def __init__(
        self,
        config: ProtocolConfig,
        model: OpticalModel,
        session_factory: SessionFactory | None = None,
        ack_every: int | None = None,
        max_sessions: int | None = None,
    ):
        self.config = config
        self.model = model
        self.session_factory = session_factory or (
            lambda session_id: ServerSession(config, model, session_id)
        )
        self.ack_every = ack_every or settings.ack_every
        self.max_sessions = max_sessions
        self.finished_sessions = 0
        self._active: set[int] = set()
        self._tasks: set[asyncio.Task] = set()
        self._done = asyncio.Event()

    async def _refuse(self, channel: Channel, code: str, text: str) -> None:
        logger.warning(f"Refusing session: {code} ({text})")
        try:
            await channel.send(ErrorMessage(code=code, text=text))
        except TransportError:
            pass

    async def handle(self, channel: Channel) -> None:
        """Serve one client from HELLO to SESSION_END."""
        session_id = None
        try:
            hello = await channel.recv()
            if not isinstance(hello, Hello):
                await self._refuse(channel, "protocol", "Expected HELLO")
                return
            if hello.version != PROTOCOL_VERSION:
                await self._refuse(
                    channel, "version", f"Server speaks version {PROTOCOL_VERSION}"
                )
                return
            if hello.session_id in self._active:
                await self._refuse(
                    channel, "session_in_use", f"Session {hello.session_id} is active"
                )
                return

            session_id = hello.session_id
            self._active.add(session_id)
            await self._run(channel, session_id)
        except FrameError as e:
            await self._refuse(channel, e.code, str(e))
        except TransportError as e:
            logger.warning(f"Session {session_id} transport failure: {e}")
            get_metrics().increment("transport_errors")
        finally:
            if session_id is not None:
                self._active.discard(session_id)
                self.finished_sessions += 1
                if self.max_sessions and self.finished_sessions >= self.max_sessions:
                    self._done.set()
            await channel.close()

    async def _run(self, channel: Channel, session_id: int) -> None:
        session = self.session_factory(session_id)
        n = session.config.n
        logger.info(f"Session {session_id} started ({n} rounds)")
        await channel.send(ConfigMessage.from_config(session.config))

        while not session.finished:
            announcement = session.announce()
            await channel.send(announcement)
            if ack_due(announcement.i, n, self.ack_every):
                reply = await channel.recv()
                if not isinstance(reply, ClientAck) or reply.i != announcement.i:
                    await self._refuse(
                        channel, "protocol", f"Expected ACK for round {announcement.i}"
                    )
                    return

        await channel.send(SessionEnd(status=SessionStatus.COMPLETED))
        logger.info(f"Session {session_id} finished")

    def connect_loopback(self) -> QueueChannel:
        """Client end of a new in-process connection."""
        client_end, server_end = loopback_pair()
        task = asyncio.create_task(self.handle(server_end))
        self._tasks.add(task)
        task.add_done_callback(self._tasks.discard)
        return client_end

    async def start(self, host: str | None = None, port: int | None = None) -> asyncio.Server:
        """Listen on a TCP socket; port 0 picks a free port."""

        async def on_connect(reader, writer):
            await self.handle(StreamChannel(reader, writer))

        server = await asyncio.start_server(
            on_connect,
            host or settings.host,
            settings.port if port is None else port,
        )
        bound = server.sockets[0].getsockname()
        logger.info(f"Beacon server listening on {bound[0]}:{bound[1]}")
        return server

    async def serve(self, host: str | None = None, port: int | None = None) -> None:
        """Listen until ``max_sessions`` sessions ended (or forever)."""
        server = await self.start(host, port)
        async with server:
            if self.max_sessions:
                await self._done.wait()
            else:
                await server.serve_forever()
