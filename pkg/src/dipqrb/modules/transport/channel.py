"""Ordered message channels over sockets or in-process queues."""

from __future__ import annotations

import asyncio
import logging
from typing import Protocol

from dipqrb.exceptions import TransportError
from dipqrb.modules.transport.codec import HEADER, decode, decode_header, encode
from dipqrb.modules.transport.schemas import Message

logger = logging.getLogger(__name__)


class Channel(Protocol):
    """Reliable, ordered, bidirectional message stream."""

    async def send(self, message: Message) -> None: ...

    async def recv(self) -> Message: ...

    async def close(self) -> None: ...


class StreamChannel:
    """Channel over an asyncio stream pair."""

    def __init__(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        self._reader = reader
        self._writer = writer

    @property
    def peer(self) -> str:
        return str(self._writer.get_extra_info("peername"))

    async def send(self, message: Message) -> None:
        try:
            self._writer.write(encode(message))
            await self._writer.drain()
        except (ConnectionError, OSError) as e:
            raise TransportError(f"Send to {self.peer} failed: {e}") from e

    async def recv(self) -> Message:
        """Read one frame.

        Raises:
            TransportError: If the connection closes mid-frame
            FrameError: If the frame is malformed
        """
        try:
            header = await self._reader.readexactly(HEADER.size)
            length, _ = decode_header(header)
            payload = await self._reader.readexactly(length)
        except (asyncio.IncompleteReadError, ConnectionError, OSError) as e:
            raise TransportError(f"Connection to {self.peer} closed") from e
        return decode(header + payload)

    async def close(self) -> None:
        if self._writer.is_closing():
            return
        self._writer.close()
        try:
            await self._writer.wait_closed()
        except (ConnectionError, OSError):
            pass


_CLOSED = object()


class QueueChannel:
    """In-process channel; frames still pass through the codec."""

    def __init__(self, inbox: asyncio.Queue, outbox: asyncio.Queue):
        self._inbox = inbox
        self._outbox = outbox
        self._closed = False

    async def send(self, message: Message) -> None:
        if self._closed:
            raise TransportError("Channel is closed")
        await self._outbox.put(encode(message))

    async def recv(self) -> Message:
        frame = await self._inbox.get()
        if frame is _CLOSED:
            raise TransportError("Peer closed the channel")
        return decode(frame)

    async def close(self) -> None:
        if not self._closed:
            self._closed = True
            await self._outbox.put(_CLOSED)


def loopback_pair() -> tuple[QueueChannel, QueueChannel]:
    """Two connected in-process channel ends."""
    forward: asyncio.Queue = asyncio.Queue()
    backward: asyncio.Queue = asyncio.Queue()
    return QueueChannel(backward, forward), QueueChannel(forward, backward)
