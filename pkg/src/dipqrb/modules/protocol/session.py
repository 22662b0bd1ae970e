"""Server and client round state machines."""

from __future__ import annotations

import logging
import time

from dipqrb.contracts import (
    AbortReason,
    Mode,
    Outcome,
    RoundAnnouncement,
    RoundRecord,
    SessionStatus,
)
from dipqrb.exceptions import ValidationError
from dipqrb.modules.behavior import RoundStatistics
from dipqrb.modules.photonic_sim import (
    OpticalModel,
    sample_client_outcome,
    sample_server_outcomes,
)
from dipqrb.modules.protocol.schemas import ProtocolConfig, Transcript
from dipqrb.modules.protocol.scoring import score_function
from dipqrb.modules.protocol.streams import ClientStreams, ServerStreams
from dipqrb.utils.observability import log_session

logger = logging.getLogger(__name__)


def _merged(outcome: Outcome) -> Outcome:
    return Outcome.ZERO if outcome is Outcome.VOID else outcome


class ServerSession:
    """Routes each pair, measures on the server side and announces P_i."""

    def __init__(self, config: ProtocolConfig, model: OpticalModel, session_id: int = 0):
        config.check_model(model)
        self.config = config
        self.model = model
        self.session_id = session_id
        self.streams = ServerStreams.create(config.seed_server, config.seed_switch, session_id)
        self.next_index = 0

    @property
    def finished(self) -> bool:
        return self.next_index >= self.config.n

    def announce(self) -> RoundAnnouncement:
        """Run the server side of the next round.

        Raises:
            ValidationError: If all rounds were already announced
        """
        if self.finished:
            raise ValidationError(f"Session {self.session_id} already ran {self.config.n} rounds")

        config = self.config
        s = self.streams.switch.bit(config.p_switch)
        x = self.streams.inputs.bit(config.p_x[1])
        y = self.streams.inputs.bit(config.p_y[1])
        a, b = sample_server_outcomes(self.model, self.streams.optics, s, x, y)
        if config.mode is Mode.FULLY_DI:
            a = _merged(a)
            if s == 0:
                b = _merged(b)

        announcement = RoundAnnouncement(i=self.next_index, s=s, x=x, y=y, a=a, b=b)
        self.next_index += 1
        return announcement


class ClientSession:
    """Consumes announcements, measures the routed half and scores rounds."""

    def __init__(self, config: ProtocolConfig, model: OpticalModel, session_id: int = 0):
        config.check_model(model)
        self.config = config
        self.model = model
        self.session_id = session_id
        self.streams = ClientStreams.create(config.seed_client, session_id)
        self.records: list[RoundRecord] = []
        self.statistics = RoundStatistics()
        self._start = time.perf_counter()

    @property
    def complete(self) -> bool:
        return len(self.records) >= self.config.n

    def receive(self, announcement: RoundAnnouncement) -> RoundRecord:
        """Finish one round from the server's announcement.

        Raises:
            ValidationError: On an out-of-order index or an extra round
        """
        expected = len(self.records)
        if self.complete:
            raise ValidationError(f"Unexpected round {announcement.i} after {self.config.n} rounds")
        if announcement.i != expected:
            raise ValidationError(f"Expected round {expected}, got {announcement.i}")

        s, x, a = announcement.s, announcement.x, announcement.a
        z = self.streams.inputs.bit(self.config.p_z[1])
        t = self.streams.inputs.bit(self.config.gamma_for(s))
        if s == 0:
            c = Outcome.VOID
        else:
            c = sample_client_outcome(
                self.model,
                self.streams.optics,
                x,
                z,
                a,
                merge_void=self.config.mode is Mode.FULLY_DI,
            )

        record = RoundRecord(
            i=announcement.i,
            s=s,
            x=x,
            y=announcement.y,
            z=z,
            a=a,
            b=announcement.b,
            c=c,
            t=t,
            d=score_function(s, x, announcement.y, z, a, announcement.b, c, t),
        )
        self.records.append(record)
        self.statistics.add(record)
        return record

    def finish(self) -> Transcript:
        """Accepted-set check and entropy estimate after the last round.

        Raises:
            ValidationError: If rounds are still missing
        """
        if not self.complete:
            raise ValidationError(
                f"Session {self.session_id} has {len(self.records)} of {self.config.n} rounds"
            )

        config = self.config
        frequencies = self.statistics.score_frequencies()
        entropy = None
        status = SessionStatus.COMPLETED
        reason = None

        if config.accepted_set is not None and not config.accepted_set.contains(frequencies):
            status, reason = SessionStatus.ABORTED, AbortReason.OUTSIDE_ACCEPTED_SET
        elif config.min_tradeoff is not None:
            entropy = config.n * config.min_tradeoff.evaluate(frequencies)
            if entropy < config.n * config.threshold:
                status, reason = SessionStatus.ABORTED, AbortReason.BELOW_THRESHOLD

        return self._transcript(status, reason, entropy)

    def fail(self, detail: str = "") -> Transcript:
        """Transcript of a session cut short by the transport."""
        logger.warning(
            f"Session {self.session_id} lost its transport after {len(self.records)} rounds"
            + (f": {detail}" if detail else "")
        )
        return self._transcript(SessionStatus.TRANSPORT_ERROR, AbortReason.TRANSPORT_ERROR, None)

    def _transcript(
        self, status: SessionStatus, reason: AbortReason | None, entropy: float | None
    ) -> Transcript:
        transcript = Transcript(
            config_hash=self.config.config_hash(),
            session_id=self.session_id,
            mode=self.config.mode,
            n=self.config.n,
            records=list(self.records),
            status=status,
            abort_reason=reason,
            score_counts=self.statistics.score_counts(),
            frequencies=self.statistics.score_frequencies(),
            entropy_estimate=entropy,
        )
        log_session(
            session_id=self.session_id,
            rounds=transcript.rounds,
            status=status.value,
            entropy_estimate=entropy,
            latency_ms=(time.perf_counter() - self._start) * 1000,
            reason=reason.value if reason else None,
        )
        return transcript


def run_session(config: ProtocolConfig, model: OpticalModel, session_id: int = 0) -> Transcript:
    """Run a whole session in process, server and client side by side.

    Args:
        config: Protocol parameters and seeds
        model: Optical model simulating the source and detectors
        session_id: Session identifier (enters the seed derivation)

    Returns:
        Completed or aborted transcript
    """
    server = ServerSession(config, model, session_id)
    client = ClientSession(config, model, session_id)
    while not server.finished:
        client.receive(server.announce())
    return client.finish()
