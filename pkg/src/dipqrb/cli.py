"""Command-line front end.

Exit codes: 0 success, 1 protocol abort or transport failure, 2 usage
error, 3 certification (solver) failure.
"""

from __future__ import annotations

import argparse
import asyncio
import io
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from dipqrb.contracts import ConstraintMode, Mode
from dipqrb.exceptions import (
    AbortedTranscriptError,
    BeaconError,
    FrameError,
    TransportError,
    ValidationError,
)
from dipqrb.logging_conf import setup_logging
from dipqrb.modules.certifier import (
    GuessingProgramSpec,
    asymptotic_rate,
    build_min_tradeoff,
    guessing_probability,
    honest_accepted_set,
    honest_score_distribution,
    min_entropy_rate,
    rate_scan,
    write_scan_csv,
)
from dipqrb.modules.extractor import (
    ToeplitzSeed,
    bits_to_hex,
    extract,
    output_length,
    raw_to_bits,
    read_bits,
)
from dipqrb.modules.photonic_sim import OpticalModel, dump_behavior_csv, exact_behavior
from dipqrb.modules.protocol import (
    ProtocolConfig,
    Transcript,
    check_transcript,
    raw_string,
    run_session,
)
from dipqrb.modules.transport import BeaconServer, run_remote_session
from dipqrb.settings import settings
from dipqrb.utils.configfile import read_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ABORT = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3

DEFAULT_ROUNDS = 10_000


class UsageError(Exception):
    """Flags are individually valid but do not fit together."""


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value experiment config file")
    common.add_argument("--eta-c", type=float, help="Client detection efficiency")
    common.add_argument("--level", type=int, help="Hierarchy level")
    common.add_argument("--gamma", type=float, help="Test-round probability")
    common.add_argument("--rounds", type=int, help="Number of protocol rounds")
    common.add_argument("--seed-server", type=int)
    common.add_argument("--seed-client", type=int)
    common.add_argument("--seed-switch", type=int)
    common.add_argument("--mode", choices=[m.value for m in Mode])
    common.add_argument(
        "--constraints",
        choices=[c.value for c in ConstraintMode],
        default=ConstraintMode.FULL_DISTRIBUTION.value,
    )
    common.add_argument("--out", type=Path, help="Output file (stdout when omitted)")
    common.add_argument("--log-level", default=None)
    return common


def _acceptance_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--accept", action="store_true", help="Abort outside the honest box of the run model"
    )
    parser.add_argument(
        "--expected",
        type=Path,
        help="Model config whose honest box is enforced (implies --accept)",
    )


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="dipqrb", description="Device-independent private randomness beacon toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser(
        "simulate",
        parents=[common],
        help="Dump the exact behavior, or run an in-process session with --rounds",
    )
    _acceptance_flags(simulate)

    certify = sub.add_parser("certify", parents=[common], help="Certify one efficiency point")
    certify.add_argument(
        "--tradeoff",
        action="store_true",
        help="Also build the min-tradeoff function and the asymptotic rate",
    )

    scan = sub.add_parser("rate-scan", parents=[common], help="Sweep the client efficiency")
    scan.add_argument("--eta-from", type=float, default=0.4)
    scan.add_argument("--eta-to", type=float, default=1.0)
    scan.add_argument("--step", type=float, default=0.05)
    scan.add_argument("--workers", type=int, default=None)
    scan.add_argument("--plot-data", action="store_true", help="Bare eta_c,rate pairs")

    server = sub.add_parser("run-server", parents=[common], help="Serve beacon sessions")
    server.add_argument("--host", default=None)
    server.add_argument("--port", type=int, default=None)
    server.add_argument("--ack-every", type=int, default=None)
    server.add_argument("--sessions", type=int, default=None, help="Exit after N sessions")

    client = sub.add_parser("run-client", parents=[common], help="Run one client session")
    client.add_argument("--host", default=None)
    client.add_argument("--port", type=int, default=None)
    client.add_argument("--ack-every", type=int, default=None)
    client.add_argument("--session-id", type=int, default=0)
    _acceptance_flags(client)

    ext = sub.add_parser("extract", parents=[common], help="Toeplitz-hash a raw string")
    source = ext.add_mutually_exclusive_group(required=True)
    source.add_argument("--in", dest="input", type=Path, help="Raw bits (.hex or binary)")
    source.add_argument("--transcript", type=Path, help="Completed transcript (JSONL)")
    ext.add_argument("--seed", type=Path, required=True, help="Hex seed file")
    ext.add_argument("--out-bits", type=int, default=None)

    check = sub.add_parser("check", parents=[common], help="Re-verify a transcript")
    check.add_argument("--transcript", type=Path, required=True)

    return parser


def load_model(args: argparse.Namespace) -> OpticalModel:
    model = OpticalModel.load(args.config) if args.config else OpticalModel()
    if args.eta_c is not None:
        model = model.with_client_efficiency(args.eta_c)
    return model


def load_protocol_config(args: argparse.Namespace) -> ProtocolConfig:
    """Config file values, overridden by whichever flags were given."""
    overrides = {
        "n": args.rounds,
        "gamma": args.gamma,
        "seed_server": args.seed_server,
        "seed_client": args.seed_client,
        "seed_switch": args.seed_switch,
        "mode": args.mode,
    }
    overrides = {key: value for key, value in overrides.items() if value is not None}
    values = read_config(args.config) if args.config else {}
    if "n" not in values and "n" not in overrides:
        overrides["n"] = DEFAULT_ROUNDS
    return ProtocolConfig.from_config(values, **overrides)


def program_spec(args: argparse.Namespace, model: OpticalModel) -> GuessingProgramSpec:
    mode = args.mode or Mode.SEMI_DI
    spec = GuessingProgramSpec(
        behavior=exact_behavior(model),
        constraint_mode=args.constraints,
        mode=mode,
    )
    return spec if args.level is None else spec.replace(level=args.level)


def with_acceptance(
    args: argparse.Namespace, config: ProtocolConfig, model: OpticalModel
) -> ProtocolConfig:
    """Attach the honest accepted set when --accept or --expected is given."""
    if args.expected is not None:
        model = OpticalModel.load(args.expected)
    elif not args.accept:
        return config
    q = honest_score_distribution(
        exact_behavior(model), config.gamma, config.mode, config.gamma_route1
    )
    return config.model_copy(update={"accepted_set": honest_accepted_set(q, config.n)})


def emit(args: argparse.Namespace, text: str) -> None:
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {args.out}")


def finish_session(args: argparse.Namespace, transcript: Transcript) -> int:
    if args.out is not None:
        transcript.save(args.out)
    summary = {
        "session_id": transcript.session_id,
        "status": transcript.status.value,
        "rounds": transcript.rounds,
        "abort_reason": transcript.abort_reason.value if transcript.abort_reason else None,
        "entropy_estimate": transcript.entropy_estimate,
    }
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK if transcript.is_completed else EXIT_ABORT


def cmd_simulate(args: argparse.Namespace) -> int:
    model = load_model(args)
    if args.rounds is None:
        if args.out is None:
            raise UsageError("simulate needs --out for the behavior CSV")
        dump_behavior_csv(model, args.out)
        return EXIT_OK

    config = load_protocol_config(args)
    config = with_acceptance(args, config, model)
    return finish_session(args, run_session(config, model))


def cmd_certify(args: argparse.Namespace) -> int:
    model = load_model(args)
    spec = program_spec(args, model)
    result = guessing_probability(spec)
    rate = min_entropy_rate(result.pg_upper, result.p_gen)
    report = {
        "eta_c": model.eta_c,
        "pg_upper": result.pg_upper,
        "p_gen": result.p_gen,
        "herald_rate": result.herald_rate,
        "rate": rate,
        "rate_per_heralded_event": rate / result.herald_rate,
        "solver_status": result.status.value,
        "gap": result.gap,
    }

    if args.tradeoff:
        config = load_protocol_config(args)
        tradeoff = build_min_tradeoff(spec, config.gamma, gamma_route1=config.gamma_route1)
        q = honest_score_distribution(spec.behavior, config.gamma, spec.mode, config.gamma_route1)
        report["tradeoff_constant"] = tradeoff.constant
        report["tradeoff_at_honest"] = tradeoff.evaluate(q)
        report["asymptotic_rate"] = asymptotic_rate(tradeoff, honest_accepted_set(q, config.n))

    emit(args, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def sweep(start: float, stop: float, step: float) -> list[float]:
    """Inclusive grid, rounded so 0.4 + k·0.05 lands on 0.45, 0.5, ..."""
    if step <= 0 or stop < start:
        raise UsageError("Need --step > 0 and --eta-to ≥ --eta-from")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 10) for k in range(count)]


def cmd_rate_scan(args: argparse.Namespace) -> int:
    model = load_model(args)
    points = rate_scan(
        model,
        sweep(args.eta_from, args.eta_to, args.step),
        mode=Mode(args.mode or Mode.SEMI_DI),
        constraint_mode=ConstraintMode(args.constraints),
        level=args.level,
        workers=args.workers,
    )
    buffer = io.StringIO()
    write_scan_csv(points, buffer, plot_data=args.plot_data)
    emit(args, buffer.getvalue())

    solved = [p for p in points if not np.isnan(p.rate_per_heralded_event)]
    return EXIT_OK if solved else EXIT_SOLVER


def cmd_run_server(args: argparse.Namespace) -> int:
    model = load_model(args)
    config = load_protocol_config(args)
    server = BeaconServer(config, model, ack_every=args.ack_every, max_sessions=args.sessions)
    asyncio.run(server.serve(args.host, args.port))
    return EXIT_OK


def cmd_run_client(args: argparse.Namespace) -> int:
    model = load_model(args)
    config = load_protocol_config(args)
    config = with_acceptance(args, config, model)
    transcript = asyncio.run(
        run_remote_session(
            config,
            model,
            args.host,
            args.port,
            session_id=args.session_id,
            ack_every=args.ack_every,
        )
    )
    return finish_session(args, transcript)


def cmd_extract(args: argparse.Namespace) -> int:
    if args.transcript is not None:
        transcript = Transcript.load(args.transcript)
        bits = raw_to_bits(raw_string(transcript), transcript.mode)
        if args.out_bits is None:
            if transcript.entropy_estimate is None:
                raise UsageError("Transcript has no entropy estimate; pass --out-bits")
            args.out_bits = output_length(max(transcript.entropy_estimate, 0.0))
    else:
        bits = read_bits(args.input)
        if args.out_bits is None:
            raise UsageError("--out-bits is required with --in")
    if args.out_bits < 0:
        raise UsageError("--out-bits must be non-negative")

    seed_text = "".join(args.seed.read_text(encoding="utf-8").split())
    required = ToeplitzSeed.required_length(len(bits), args.out_bits)
    seed = ToeplitzSeed.from_hex(seed_text, length=required)
    out = extract(bits, seed, args.out_bits)

    text = bits_to_hex(out)
    emit(args, text + "\n" if text else "")
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    report = check_transcript(Transcript.load(args.transcript))
    emit(args, report.model_dump_json(indent=2) + "\n")
    return EXIT_OK if report.passed else EXIT_ABORT


COMMANDS = {
    "simulate": cmd_simulate,
    "certify": cmd_certify,
    "rate-scan": cmd_rate_scan,
    "run-server": cmd_run_server,
    "run-client": cmd_run_client,
    "extract": cmd_extract,
    "check": cmd_check,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Parse flags, run one command and map failures to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    setup_logging(args.log_level or settings.log_level)

    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"dipqrb: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, FrameError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE
    except (AbortedTranscriptError, TransportError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_ABORT
    except BeaconError as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_SOLVER


def run() -> None:
    sys.exit(main())
