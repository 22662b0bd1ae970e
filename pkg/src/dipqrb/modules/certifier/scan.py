"""Efficiency sweeps of the certified rate."""

from __future__ import annotations

import csv
import logging
import math
import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import TextIO

from dipqrb.contracts import ConstraintMode, Mode
from dipqrb.exceptions import BeaconError, ValidationError
from dipqrb.modules.certifier.program import guessing_probability
from dipqrb.modules.certifier.schemas import GuessingProgramSpec, ScanPoint
from dipqrb.modules.certifier.service import min_entropy_rate
from dipqrb.modules.photonic_sim import OpticalModel, exact_behavior
from dipqrb.modules.sdp import SolverOptions
from dipqrb.settings import settings
from dipqrb.utils.observability import log_scan_point

logger = logging.getLogger(__name__)

SCAN_COLUMNS = (
    "eta_c",
    "pg_upper",
    "p_gen",
    "rate_per_heralded_event",
    "solver_status",
    "gap",
)


def _scan_point(
    model: OpticalModel,
    eta: float,
    mode: Mode,
    constraint_mode: ConstraintMode,
    level: int,
    extras: tuple[str, ...],
    opts: SolverOptions | None,
) -> ScanPoint:
    start = time.perf_counter()
    try:
        spec = GuessingProgramSpec(
            behavior=exact_behavior(model.with_client_efficiency(eta)),
            constraint_mode=constraint_mode,
            mode=mode,
            level=level,
            extras=extras,
        )
        result = guessing_probability(spec, opts)
        rate = min_entropy_rate(result.pg_upper, result.p_gen) / result.herald_rate
        point = ScanPoint(
            eta_c=eta,
            pg_upper=result.pg_upper,
            p_gen=result.p_gen,
            rate_per_heralded_event=rate,
            solver_status=result.status.value,
            gap=result.gap,
        )
    except BeaconError as e:
        logger.warning(f"Scan point eta_c={eta} failed: {e}")
        status = getattr(e, "status", None) or type(e).__name__
        point = ScanPoint(eta_c=eta, solver_status=status)

    latency_ms = (time.perf_counter() - start) * 1000
    log_scan_point(eta, point.solver_status, point.rate_per_heralded_event, latency_ms)
    return point


def rate_scan(
    model: OpticalModel,
    etas: Sequence[float],
    mode: Mode = Mode.SEMI_DI,
    constraint_mode: ConstraintMode = ConstraintMode.FULL_DISTRIBUTION,
    level: int | None = None,
    extras: Sequence[str] | None = None,
    workers: int | None = None,
    opts: SolverOptions | None = None,
) -> list[ScanPoint]:
    """Certified rate per heralded event for each client efficiency.

    Failed points are recorded with their status and NaN values; the scan
    continues.

    Args:
        model: Base optical model; only eta_c is varied
        etas: Client efficiencies in (0, 1]
        mode: Security mode
        constraint_mode: Program constraints
        level: Hierarchy level (settings default)
        extras: Extra monomial patterns (settings default)
        workers: Thread pool size (settings default)
        opts: Solver options

    Returns:
        Scan points sorted by eta_c

    Raises:
        ValidationError: If a sweep value is outside (0, 1]
    """
    for eta in etas:
        if not 0.0 < eta <= 1.0:
            raise ValidationError(f"Sweep values must lie in (0, 1], got {eta}")

    level = settings.npa_level if level is None else level
    extras = tuple(settings.npa_extras if extras is None else extras)
    workers = max(1, workers or settings.scan_workers)

    logger.info(f"Rate scan over {len(etas)} points with {workers} worker(s)")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        points = list(
            pool.map(
                lambda eta: _scan_point(
                    model, float(eta), mode, constraint_mode, level, extras, opts
                ),
                etas,
            )
        )
    return sorted(points, key=lambda point: point.eta_c)


def _format(value: float) -> str:
    return "" if math.isnan(value) else f"{value:.10g}"


def write_scan_csv(points: Sequence[ScanPoint], stream: TextIO, plot_data: bool = False) -> None:
    """Write scan points as CSV, or as bare ``eta_c,rate`` pairs for plotting."""
    writer = csv.writer(stream, lineterminator="\n")
    if plot_data:
        for point in points:
            writer.writerow([_format(point.eta_c), _format(point.rate_per_heralded_event)])
        return

    writer.writerow(SCAN_COLUMNS)
    for point in points:
        writer.writerow(
            [
                _format(point.eta_c),
                _format(point.pg_upper),
                _format(point.p_gen),
                _format(point.rate_per_heralded_event),
                point.solver_status,
                _format(point.gap),
            ]
        )


def save_scan_csv(points: Sequence[ScanPoint], path: str | Path, plot_data: bool = False) -> None:
    with open(path, "w", newline="") as f:
        write_scan_csv(points, f, plot_data=plot_data)
