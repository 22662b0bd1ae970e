"""Tests for the wire codec and live transports."""

import asyncio

import pytest

from dipqrb.contracts import Outcome, RoundAnnouncement, SessionStatus
from dipqrb.exceptions import FrameError, TransportError
from dipqrb.modules.protocol import ProtocolConfig, ServerSession, run_session
from dipqrb.modules.transport import (
    PROTOCOL_VERSION,
    BeaconServer,
    ClientAck,
    ConfigMessage,
    ErrorMessage,
    Hello,
    SessionEnd,
    ack_due,
    decode,
    decode_header,
    encode,
    loopback_pair,
    run_client_session,
    run_remote_session,
)
from dipqrb.settings import settings

ANNOUNCE_FRAME = bytes.fromhex("0000000d03" + "00" * 8 + "0100010002")


class TestCodec:
    """Test cases for framing."""

    def test_announcement_bytes(self):
        message = RoundAnnouncement(i=0, s=1, x=0, y=1, a=0, b="void")
        assert encode(message) == ANNOUNCE_FRAME
        assert decode(ANNOUNCE_FRAME) == message

    @pytest.mark.parametrize(
        "message",
        [
            Hello(session_id=7),
            ConfigMessage(
                n=10,
                gamma=0.1,
                p_switch=0.5,
                p_x=(0.5, 0.5),
                p_y=(0.5, 0.5),
                p_z=(0.5, 0.5),
                mode="semi_di",
            ),
            ClientAck(i=99),
            SessionEnd(status=SessionStatus.TRANSPORT_ERROR),
            ErrorMessage(code="version", text="Server speaks version 1"),
        ],
    )
    def test_canonical_reencoding(self, message):
        frame = encode(message)
        assert encode(decode(frame)) == frame

    def test_truncated_payload(self):
        with pytest.raises(FrameError) as exc:
            decode(ANNOUNCE_FRAME[:-2])
        assert exc.value.code == "truncated"

    def test_truncated_header(self):
        with pytest.raises(FrameError) as exc:
            decode_header(b"\x00\x00")
        assert exc.value.code == "truncated"

    def test_trailing_bytes(self):
        with pytest.raises(FrameError) as exc:
            decode(ANNOUNCE_FRAME + b"\x00")
        assert exc.value.code == "malformed"

    def test_unknown_type(self):
        with pytest.raises(FrameError) as exc:
            decode(bytes.fromhex("0000000009"))
        assert exc.value.code == "unknown_type"

    def test_oversized_payload(self):
        with pytest.raises(FrameError) as exc:
            decode_header(bytes.fromhex("ffffffff01"))
        assert exc.value.code == "too_large"

    @pytest.mark.parametrize("fields", ["0200010002", "0100010003", "0100010000"])
    def test_outside_alphabet(self, fields):
        # s=2, b=3, and s=1 with a clicked b
        with pytest.raises(FrameError) as exc:
            decode(bytes.fromhex("0000000d03" + "00" * 8 + fields))
        assert exc.value.code == "alphabet"

    def test_unknown_session_status(self):
        with pytest.raises(FrameError) as exc:
            decode(bytes.fromhex("000000010507"))
        assert exc.value.code == "alphabet"


class TestAckCadence:
    """Test cases for the acknowledgement schedule."""

    def test_every_k_and_last(self):
        due = [i for i in range(10) if ack_due(i, 10, 4)]
        assert due == [3, 7, 9]


def small_config(n: int = 100) -> ProtocolConfig:
    return ProtocolConfig(n=n, gamma=0.2, seed_server=11, seed_client=12, seed_switch=13)


async def drop_after(channel, config, model, rounds: int) -> None:
    """Serve ``rounds`` announcements, then hang up."""
    hello = await channel.recv()
    session = ServerSession(config, model, hello.session_id)
    await channel.send(ConfigMessage.from_config(config))
    for _ in range(rounds):
        await channel.send(session.announce())
    await channel.close()


class TestLoopback:
    """Test cases for in-process sessions through the server."""

    async def test_concurrent_clients_are_isolated(self, ideal_model):
        config = small_config()
        server = BeaconServer(config, ideal_model, ack_every=16)
        transcripts = await asyncio.gather(
            *(
                run_client_session(
                    config, ideal_model, server.connect_loopback(), session_id=k, ack_every=16
                )
                for k in range(3)
            )
        )
        assert [t.status for t in transcripts] == [SessionStatus.COMPLETED] * 3
        assert sorted(t.session_id for t in transcripts) == [0, 1, 2]
        assert len({t.to_jsonl() for t in transcripts}) == 3
        assert server.finished_sessions == 3

    async def test_fifo_indices(self, ideal_model):
        config = small_config()
        server = BeaconServer(config, ideal_model, ack_every=7)
        transcript = await run_client_session(
            config, ideal_model, server.connect_loopback(), session_id=4, ack_every=7
        )
        assert [record.i for record in transcript.records] == list(range(config.n))

    async def test_matches_in_process_run(self, ideal_model):
        config = small_config()
        server = BeaconServer(config, ideal_model)
        transcript = await run_client_session(
            config, ideal_model, server.connect_loopback(), session_id=2
        )
        assert transcript.to_jsonl() == run_session(config, ideal_model, session_id=2).to_jsonl()

    async def test_version_mismatch(self, ideal_model):
        server = BeaconServer(small_config(), ideal_model)
        channel = server.connect_loopback()
        await channel.send(Hello(version=PROTOCOL_VERSION + 1, session_id=0))
        reply = await channel.recv()
        assert isinstance(reply, ErrorMessage)
        assert reply.code == "version"

    async def test_session_in_use(self, ideal_model):
        config = small_config()
        server = BeaconServer(config, ideal_model, ack_every=1)

        first = server.connect_loopback()
        await first.send(Hello(session_id=5))
        assert isinstance(await first.recv(), ConfigMessage)
        assert isinstance(await first.recv(), RoundAnnouncement)

        second = server.connect_loopback()
        await second.send(Hello(session_id=5))
        reply = await second.recv()
        assert isinstance(reply, ErrorMessage)
        assert reply.code == "session_in_use"

        await first.close()

    async def test_client_sees_refusal(self, ideal_model):
        config = small_config()
        server = BeaconServer(config, ideal_model, ack_every=1)
        blocker = server.connect_loopback()
        await blocker.send(Hello(session_id=1))
        await blocker.recv()
        await blocker.recv()

        transcript = await run_client_session(
            config, ideal_model, server.connect_loopback(), session_id=1, ack_every=1
        )
        assert transcript.status is SessionStatus.TRANSPORT_ERROR
        assert transcript.rounds == 0
        await blocker.close()

    async def test_config_mismatch(self, ideal_model):
        server = BeaconServer(small_config(), ideal_model)
        transcript = await run_client_session(
            small_config(n=99), ideal_model, server.connect_loopback()
        )
        assert transcript.status is SessionStatus.TRANSPORT_ERROR
        assert transcript.rounds == 0


class TestConnectionDrop:
    """Test cases for sessions cut short."""

    async def test_drop_after_fifty_rounds(self, ideal_model):
        config = small_config()
        client_end, server_end = loopback_pair()
        server_task = asyncio.create_task(drop_after(server_end, config, ideal_model, 50))

        transcript = await run_client_session(config, ideal_model, client_end, ack_every=1024)
        await server_task

        assert transcript.status is SessionStatus.TRANSPORT_ERROR
        assert transcript.rounds == 50
        assert transcript.entropy_estimate is None
        full = run_session(config, ideal_model)
        assert transcript.records == full.records[:50]

    async def test_recv_after_close(self):
        left, right = loopback_pair()
        await left.close()
        with pytest.raises(TransportError):
            await right.recv()
        with pytest.raises(TransportError):
            await left.send(ClientAck(i=0))

    async def test_unreachable_server(self, ideal_model, monkeypatch):
        monkeypatch.setattr(settings, "connect_base_delay", 0.0)
        with pytest.raises(TransportError):
            await run_remote_session(small_config(), ideal_model, host="127.0.0.1", port=1)


class TestSocketTransport:
    """Test cases for TCP sessions."""

    async def test_transport_equivalence(self, ideal_model):
        config = small_config(n=1000)
        expected = [run_session(config, ideal_model, session_id=k).to_jsonl() for k in range(3)]

        loopback_server = BeaconServer(config, ideal_model, ack_every=64)
        loopback = await asyncio.gather(
            *(
                run_client_session(
                    config,
                    ideal_model,
                    loopback_server.connect_loopback(),
                    session_id=k,
                    ack_every=64,
                )
                for k in range(3)
            )
        )

        socket_server = BeaconServer(config, ideal_model, ack_every=64)
        listener = await socket_server.start("127.0.0.1", 0)
        port = listener.sockets[0].getsockname()[1]
        try:
            remote = await asyncio.gather(
                *(
                    run_remote_session(
                        config, ideal_model, "127.0.0.1", port, session_id=k, ack_every=64
                    )
                    for k in range(3)
                )
            )
        finally:
            listener.close()
            await listener.wait_closed()

        assert [t.to_jsonl() for t in loopback] == expected
        assert [t.to_jsonl() for t in remote] == expected
        assert all(t.status is SessionStatus.COMPLETED for t in remote)

    async def test_blanked_bob_on_the_wire(self, ideal_model):
        config = small_config()
        client_end, server_end = loopback_pair()
        server_task = asyncio.create_task(drop_after(server_end, config, ideal_model, 30))
        await client_end.send(Hello(session_id=0))
        assert isinstance(await client_end.recv(), ConfigMessage)
        for _ in range(30):
            announcement = await client_end.recv()
            if announcement.s == 1:
                assert announcement.b is Outcome.VOID
        await server_task
