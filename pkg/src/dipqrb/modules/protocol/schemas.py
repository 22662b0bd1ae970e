"""Protocol schemas."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from dipqrb.contracts import SCORES, AbortReason, Mode, RoundRecord, Score, SessionStatus
from dipqrb.exceptions import ValidationError
from dipqrb.modules.certifier import AcceptedSet, MinTradeoff
from dipqrb.modules.photonic_sim import OpticalModel
from dipqrb.utils.configfile import read_config, split_list, write_config
from dipqrb.utils.serialization import json_serializer

Pair = tuple[float, float]

PROTOCOL_CONFIG_KEYS = (
    "n",
    "gamma",
    "gamma_route1",
    "p_switch",
    "p_x",
    "p_y",
    "p_z",
    "threshold",
    "seed_server",
    "seed_client",
    "seed_switch",
    "mode",
)


class ProtocolConfig(BaseModel):
    """Session parameters shared by server and client."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, description="Number of rounds")
    gamma: float = Field(0.1, gt=0.0, lt=1.0, description="Test probability (S=0 rounds)")
    gamma_route1: float | None = Field(
        None, gt=0.0, lt=1.0, description="Test probability for S=1 rounds (defaults to gamma)"
    )
    p_switch: float = Field(0.5, gt=0.0, lt=1.0, description="Pr[S=1]")
    p_x: Pair = (0.5, 0.5)
    p_y: Pair = (0.5, 0.5)
    p_z: Pair = (0.5, 0.5)
    threshold: float = Field(0.0, ge=0.0, description="Per-round entropy threshold h (bits)")
    seed_server: int = Field(1, ge=0)
    seed_client: int = Field(2, ge=0)
    seed_switch: int = Field(3, ge=0)
    mode: Mode = Mode.SEMI_DI
    accepted_set: AcceptedSet | None = None
    min_tradeoff: MinTradeoff | None = None

    @field_validator("p_x", "p_y", "p_z", mode="before")
    @classmethod
    def parse_pair(cls, value):
        return split_list(value)

    @field_validator("gamma_route1", mode="before")
    @classmethod
    def parse_optional(cls, value):
        if isinstance(value, str) and value.strip().lower() in ("", "none"):
            return None
        return value

    @model_validator(mode="after")
    def check_inputs(self):
        for name in ("p_x", "p_y", "p_z"):
            dist = getattr(self, name)
            if min(dist) < 0 or abs(sum(dist) - 1.0) > 1e-12:
                raise ValueError(f"{name} must be a distribution, got {dist}")
        seeds = (self.seed_server, self.seed_client, self.seed_switch)
        if len(set(seeds)) != 3:
            raise ValueError(f"Server, client and switch seeds must differ, got {seeds}")
        return self

    def gamma_for(self, s: int) -> float:
        if s == 1 and self.gamma_route1 is not None:
            return self.gamma_route1
        return self.gamma

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form."""
        payload = json.dumps(self.model_dump(mode="json"), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def check_model(self, model: OpticalModel) -> None:
        """Require the model's input distributions to match this config.

        Raises:
            ValidationError: On any mismatch
        """
        for name in ("p_switch", "p_x", "p_y", "p_z"):
            if getattr(self, name) != getattr(model, name):
                raise ValidationError(
                    f"{name} differs between protocol config and optical model: "
                    f"{getattr(self, name)} vs {getattr(model, name)}"
                )

    def to_config(self) -> dict[str, object]:
        values = {key: getattr(self, key) for key in PROTOCOL_CONFIG_KEYS}
        return {key: value for key, value in values.items() if value is not None}

    @classmethod
    def from_config(cls, values: dict[str, str], **overrides) -> ProtocolConfig:
        """Build from a key=value mapping, ignoring unrelated keys."""
        fields = {key: values[key] for key in PROTOCOL_CONFIG_KEYS if key in values}
        fields.update(overrides)
        return cls(**fields)

    def save(self, path: str | Path) -> None:
        write_config(path, self.to_config())

    @classmethod
    def load(cls, path: str | Path, **overrides) -> ProtocolConfig:
        return cls.from_config(read_config(path), **overrides)


class Transcript(BaseModel):
    """Client-side record of one session."""

    config_hash: str
    session_id: int = 0
    mode: Mode = Mode.SEMI_DI
    n: int = Field(..., ge=1, description="Configured number of rounds")
    records: list[RoundRecord] = Field(default_factory=list)
    status: SessionStatus
    abort_reason: AbortReason | None = None
    score_counts: dict[Score, int] = Field(default_factory=dict)
    frequencies: dict[Score, float] = Field(default_factory=dict)
    entropy_estimate: float | None = Field(None, description="n · f(frequencies) in bits")

    @property
    def rounds(self) -> int:
        return len(self.records)

    @property
    def is_completed(self) -> bool:
        return self.status is SessionStatus.COMPLETED

    def footer(self) -> dict:
        return {
            "footer": True,
            "config_hash": self.config_hash,
            "session_id": self.session_id,
            "mode": self.mode.value,
            "n": self.n,
            "rounds": self.rounds,
            "status": self.status.value,
            "abort_reason": self.abort_reason.value if self.abort_reason else None,
            "score_counts": {score.value: self.score_counts.get(score, 0) for score in SCORES},
            "frequencies": {score.value: self.frequencies.get(score, 0.0) for score in SCORES},
            "entropy_estimate": self.entropy_estimate,
        }

    def to_jsonl(self) -> str:
        """One JSON object per round, then the footer."""
        lines = [
            json.dumps(record.model_dump(mode="json"), default=json_serializer)
            for record in self.records
        ]
        lines.append(json.dumps(self.footer(), default=json_serializer))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> Transcript:
        """Parse :meth:`to_jsonl` output.

        Raises:
            ValidationError: If the footer is missing or inconsistent
        """
        records = []
        footer = None
        for number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            data = json.loads(line)
            if data.get("footer"):
                footer = data
                continue
            if footer is not None:
                raise ValidationError(f"Record after footer on line {number}")
            records.append(RoundRecord.model_validate(data))

        if footer is None:
            raise ValidationError("Transcript has no footer line")
        if footer["rounds"] != len(records):
            raise ValidationError(
                f"Footer declares {footer['rounds']} rounds, found {len(records)}"
            )
        return cls(
            config_hash=footer["config_hash"],
            session_id=footer["session_id"],
            mode=footer["mode"],
            n=footer["n"],
            records=records,
            status=footer["status"],
            abort_reason=footer["abort_reason"],
            score_counts=footer["score_counts"],
            frequencies=footer["frequencies"],
            entropy_estimate=footer["entropy_estimate"],
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> Transcript:
        return cls.from_jsonl(Path(path).read_text(encoding="utf-8"))


class TranscriptReport(BaseModel):
    """Result of re-checking a transcript's invariants."""

    rounds: int
    status: SessionStatus
    violations: list[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations
