"""Tests for the command-line front end."""

import csv
import json

import pytest

from dipqrb.cli import EXIT_ABORT, EXIT_OK, EXIT_USAGE, main, sweep
from dipqrb.contracts import SessionStatus
from dipqrb.modules.behavior import read_behavior_csv
from dipqrb.modules.extractor import ToeplitzSeed, raw_to_bits
from dipqrb.modules.photonic_sim import OpticalModel
from dipqrb.modules.protocol import Transcript, raw_string
from dipqrb.settings import settings


@pytest.fixture
def session_file(tmp_path):
    path = tmp_path / "session.jsonl"
    assert main(["simulate", "--rounds", "500", "--gamma", "0.3", "--out", str(path)]) == EXIT_OK
    return path


class TestUsage:
    """Test cases for argument handling."""

    def test_missing_command(self):
        assert main([]) == EXIT_USAGE

    def test_unknown_mode(self):
        assert main(["certify", "--mode", "trusted"]) == EXIT_USAGE

    def test_help(self):
        assert main(["--help"]) == EXIT_OK

    def test_simulate_needs_output(self):
        assert main(["simulate"]) == EXIT_USAGE

    def test_invalid_efficiency(self, tmp_path):
        assert main(["simulate", "--eta-c", "1.5", "--out", str(tmp_path / "b.csv")]) == EXIT_USAGE

    def test_sweep_grid(self):
        assert len(sweep(0.4, 1.0, 0.05)) == 13
        assert sweep(0.4, 0.5, 0.05) == [0.4, 0.45, 0.5]


class TestSimulate:
    """Test cases for behavior dumps and in-process sessions."""

    def test_behavior_dump(self, tmp_path):
        path = tmp_path / "behavior.csv"
        assert main(["simulate", "--eta-c", "0.8", "--out", str(path)]) == EXIT_OK
        assert read_behavior_csv(path).table1.sum() == pytest.approx(4.0)

    def test_session_is_reproducible(self, tmp_path, capsys):
        outputs = []
        for name in ("one.jsonl", "two.jsonl"):
            path = tmp_path / name
            args = ["simulate", "--rounds", "300", "--seed-client", "8", "--out", str(path)]
            assert main(args) == EXIT_OK
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1]
        summary = json.loads(capsys.readouterr().out.splitlines()[-1])
        assert summary["status"] == "completed"
        assert summary["rounds"] == 300

    def test_sabotaged_session_aborts(self, tmp_path):
        config = tmp_path / "classical.env"
        expected = tmp_path / "ideal.env"
        OpticalModel(angles_b=(0.0, 0.0)).save(config)
        OpticalModel().save(expected)
        out = tmp_path / "aborted.jsonl"
        code = main(
            [
                "simulate",
                "--config",
                str(config),
                "--rounds",
                "20000",
                "--gamma",
                "0.5",
                "--expected",
                str(expected),
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_ABORT
        assert Transcript.load(out).status is SessionStatus.ABORTED


class TestCheck:
    """Test cases for transcript verification."""

    def test_clean_transcript(self, session_file, capsys):
        assert main(["check", "--transcript", str(session_file)]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["violations"] == []

    def test_tampered_transcript(self, session_file, tmp_path):
        lines = session_file.read_text().splitlines()
        first = json.loads(lines[0])
        first["i"] = 7
        lines[0] = json.dumps(first)
        tampered = tmp_path / "tampered.jsonl"
        tampered.write_text("\n".join(lines) + "\n")
        assert main(["check", "--transcript", str(tampered)]) == EXIT_ABORT


class TestExtract:
    """Test cases for the extract command."""

    def test_zero_output_bits(self, tmp_path, capsys):
        (tmp_path / "raw.bin").write_bytes(bytes([0xA5, 0x3C]))
        (tmp_path / "seed.hex").write_text("ffff\n")
        code = main(
            [
                "extract",
                "--in",
                str(tmp_path / "raw.bin"),
                "--seed",
                str(tmp_path / "seed.hex"),
                "--out-bits",
                "0",
            ]
        )
        assert code == EXIT_OK
        assert capsys.readouterr().out == ""

    def test_zero_seed(self, tmp_path):
        (tmp_path / "raw.bin").write_bytes(bytes([0xA5, 0x3C]))
        (tmp_path / "seed.hex").write_text("000000")
        out = tmp_path / "out.hex"
        code = main(
            [
                "extract",
                "--in",
                str(tmp_path / "raw.bin"),
                "--seed",
                str(tmp_path / "seed.hex"),
                "--out-bits",
                "8",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        assert out.read_text() == "00\n"

    def test_requires_output_length(self, tmp_path):
        (tmp_path / "raw.bin").write_bytes(b"\x01")
        (tmp_path / "seed.hex").write_text("ff")
        code = main(
            ["extract", "--in", str(tmp_path / "raw.bin"), "--seed", str(tmp_path / "seed.hex")]
        )
        assert code == EXIT_USAGE

    def test_short_seed(self, tmp_path):
        (tmp_path / "raw.bin").write_bytes(bytes(4))
        (tmp_path / "seed.hex").write_text("ff")
        code = main(
            [
                "extract",
                "--in",
                str(tmp_path / "raw.bin"),
                "--seed",
                str(tmp_path / "seed.hex"),
                "--out-bits",
                "4",
            ]
        )
        assert code == EXIT_USAGE

    def test_from_transcript(self, session_file, tmp_path, capsys):
        transcript = Transcript.load(session_file)
        raw_bits = len(raw_to_bits(raw_string(transcript), transcript.mode))
        needed = ToeplitzSeed.required_length(raw_bits, 16)
        (tmp_path / "seed.hex").write_text("a5" * (needed // 8 + 1))
        code = main(
            [
                "extract",
                "--transcript",
                str(session_file),
                "--seed",
                str(tmp_path / "seed.hex"),
                "--out-bits",
                "16",
            ]
        )
        assert code == EXIT_OK
        assert len(capsys.readouterr().out.strip()) == 4


class TestRunClient:
    """Test cases for the network client command."""

    def test_unreachable_server(self, monkeypatch):
        monkeypatch.setattr(settings, "connect_base_delay", 0.0)
        assert main(["run-client", "--port", "1", "--rounds", "10"]) == EXIT_ABORT


@pytest.mark.slow
class TestCertify:
    """Test cases for solver-backed commands."""

    def test_positive_rate_at_full_efficiency(self, capsys):
        assert main(["certify", "--eta-c", "1.0"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["pg_upper"] < 1.0
        assert report["rate"] > 0.0

    def test_rate_scan_csv(self, tmp_path):
        out = tmp_path / "scan.csv"
        code = main(
            [
                "rate-scan",
                "--eta-from",
                "0.9",
                "--eta-to",
                "1.0",
                "--step",
                "0.05",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        with open(out, newline="") as f:
            rows = list(csv.DictReader(f))
        assert [float(row["eta_c"]) for row in rows] == [0.9, 0.95, 1.0]
        rates = [float(row["rate_per_heralded_event"]) for row in rows]
        assert all(later >= earlier - 1e-6 for earlier, later in zip(rates, rates[1:]))
