"""Transcript post-processing."""

from __future__ import annotations

from collections import Counter

from dipqrb.contracts import SCORES, Mode, Outcome, SessionStatus
from dipqrb.exceptions import AbortedTranscriptError
from dipqrb.modules.protocol.schemas import Transcript, TranscriptReport
from dipqrb.modules.protocol.scoring import score_function


def raw_string(transcript: Transcript) -> list[Outcome]:
    """Client outcomes of the S=1 rounds in round order.

    Rounds where Alice did not herald (a = ∅) are kept; the entropy
    estimate counts heralded generation rounds only, so including them
    never raises the extracted length.

    Raises:
        AbortedTranscriptError: If the session did not complete
    """
    if not transcript.is_completed:
        raise AbortedTranscriptError(
            f"Session {transcript.session_id} ended with status {transcript.status.value}"
        )
    return [record.c for record in transcript.records if record.s == 1]


def check_transcript(transcript: Transcript) -> TranscriptReport:
    """Re-derive scores and frequencies and compare with the stored ones."""
    violations = []

    for position, record in enumerate(transcript.records):
        if record.i != position:
            violations.append(f"record {position} has index {record.i}")
        expected = score_function(
            record.s, record.x, record.y, record.z, record.a, record.b, record.c, record.t
        )
        if record.d is not expected:
            violations.append(
                f"round {record.i} scored {record.d.value}, expected {expected.value}"
            )
        if transcript.mode is Mode.FULLY_DI:
            routed = (record.a, record.c) if record.s == 1 else (record.a, record.b)
            if Outcome.VOID in routed:
                violations.append(f"round {record.i} carries ∅ in fully-DI mode")

    if transcript.status is not SessionStatus.TRANSPORT_ERROR and transcript.rounds != transcript.n:
        violations.append(f"{transcript.rounds} rounds recorded, {transcript.n} configured")

    counts = Counter(record.d for record in transcript.records)
    for score in SCORES:
        stored = transcript.score_counts.get(score, 0)
        if stored != counts.get(score, 0):
            violations.append(
                f"count of {score.value}: stored {stored}, recounted {counts.get(score, 0)}"
            )
        if transcript.rounds:
            frequency = counts.get(score, 0) / transcript.rounds
            if transcript.frequencies.get(score, 0.0) != frequency:
                violations.append(f"frequency of {score.value} does not match the records")

    return TranscriptReport(
        rounds=transcript.rounds, status=transcript.status, violations=violations
    )
