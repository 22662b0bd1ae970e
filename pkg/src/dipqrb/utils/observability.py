"""Observability utilities for logging and metrics.

Provides structured logging for solver runs, protocol sessions
and rate scans.
"""

from __future__ import annotations

import logging
import time
from contextlib import contextmanager


class MetricsCollector:
    """Collects counters and latency histograms in process.

    Memory-bounded: limits histogram samples to prevent unbounded growth.
    """

    MAX_HISTOGRAM_SAMPLES = 1000

    def __init__(self):
        """Initialize collector."""
        self._counters: dict[str, int] = {}
        self._histograms: dict[str, list[float]] = {}

    def increment(self, name: str, value: int = 1, tags: dict | None = None) -> None:
        """Increment a counter metric.

        Args:
            name: Metric name
            value: Value to add
            tags: Optional tags
        """
        key = f"{name}:{tags}" if tags else name
        self._counters[key] = self._counters.get(key, 0) + value

    def counter(self, name: str, tags: dict | None = None) -> int:
        """Current value of a counter (0 if never incremented)."""
        key = f"{name}:{tags}" if tags else name
        return self._counters.get(key, 0)

    def record_latency(self, name: str, latency_ms: float, tags: dict | None = None) -> None:
        """Record a latency measurement.

        Args:
            name: Metric name
            latency_ms: Latency in milliseconds
            tags: Optional tags
        """
        key = f"{name}:{tags}" if tags else name
        samples = self._histograms.setdefault(key, [])

        if len(samples) >= self.MAX_HISTOGRAM_SAMPLES:
            # Drop the oldest 10%
            del samples[: self.MAX_HISTOGRAM_SAMPLES // 10]

        samples.append(latency_ms)
        logging.debug(f"metric.{name}: {latency_ms:.2f}ms")

    def get_stats(self, name: str) -> dict:
        """Get statistics for a latency metric.

        Args:
            name: Metric name

        Returns:
            Statistics dict (empty if no samples)
        """
        values = self._histograms.get(name, [])
        if not values:
            return {}

        ordered = sorted(values)
        return {
            "count": len(values),
            "avg": sum(values) / len(values),
            "min": ordered[0],
            "max": ordered[-1],
            "p50": ordered[len(values) // 2],
        }


_metrics = MetricsCollector()


def get_metrics() -> MetricsCollector:
    """Get the global metrics collector."""
    return _metrics


@contextmanager
def measure_latency(operation: str, tags: dict | None = None):
    """Context manager to measure operation latency.

    Args:
        operation: Operation name
        tags: Optional tags
    """
    start = time.perf_counter()
    try:
        yield
    finally:
        latency_ms = (time.perf_counter() - start) * 1000
        _metrics.record_latency(operation, latency_ms, tags)


def log_solve(
    dimension: int,
    num_constraints: int,
    status: str,
    iterations: int,
    gap: float,
    latency_ms: float,
) -> None:
    """Log a completed SDP solve.

    Args:
        dimension: Matrix dimension
        num_constraints: Number of equality constraints
        status: Final solver status
        iterations: Iterations used
        gap: Final duality gap
        latency_ms: Wall time
    """
    logger = logging.getLogger("dipqrb.sdp")

    log_data = {
        "event": "sdp_solve",
        "dimension": dimension,
        "num_constraints": num_constraints,
        "status": status,
        "iterations": iterations,
        "gap": gap,
        "latency_ms": round(latency_ms, 2),
    }

    if status == "optimal":
        logger.info("SDP solved", extra=log_data)
    else:
        logger.warning(f"SDP solve ended with status {status}", extra=log_data)

    _metrics.increment("sdp_solves", tags={"status": status})
    _metrics.record_latency("sdp_latency", latency_ms)


def log_session(
    session_id: int,
    rounds: int,
    status: str,
    entropy_estimate: float | None,
    latency_ms: float,
    reason: str | None = None,
) -> None:
    """Log the outcome of a protocol session.

    Args:
        session_id: Session identifier
        rounds: Rounds recorded
        status: Final transcript status
        entropy_estimate: Certified entropy (bits) if computed
        latency_ms: Wall time
        reason: Abort reason if any
    """
    logger = logging.getLogger("dipqrb.protocol")

    log_data = {
        "event": "session",
        "session_id": session_id,
        "rounds": rounds,
        "status": status,
        "entropy_estimate": entropy_estimate,
        "latency_ms": round(latency_ms, 2),
    }

    if reason:
        log_data["reason"] = reason

    if status == "completed":
        logger.info("Session completed", extra=log_data)
    else:
        logger.warning(f"Session {status}", extra=log_data)

    _metrics.increment("sessions", tags={"status": status})
    _metrics.record_latency("session_latency", latency_ms)


def log_scan_point(eta: float, status: str, rate: float, latency_ms: float) -> None:
    """Log one rate-scan point.

    Args:
        eta: Client detection efficiency
        status: Solver status for the point
        rate: Certified rate per heralded event
        latency_ms: Wall time
    """
    logger = logging.getLogger("dipqrb.certifier")
    logger.info(
        f"Scan point eta_c={eta:.4f} rate={rate:.6f}",
        extra={
            "event": "scan_point",
            "eta_c": eta,
            "status": status,
            "rate": rate,
            "latency_ms": round(latency_ms, 2),
        },
    )
    _metrics.increment("scan_points", tags={"status": status})
