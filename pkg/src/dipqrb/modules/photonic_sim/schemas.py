"""Photonic simulation schemas."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from dipqrb.contracts import DoubleClickRule
from dipqrb.exceptions import ValidationError
from dipqrb.utils.configfile import read_config, split_list, write_config

Pair = tuple[float, float]

CONFIG_KEYS = (
    "eta_a",
    "eta_b",
    "eta_c",
    "angles_a",
    "angles_b",
    "angles_c",
    "p_switch",
    "p_x",
    "p_y",
    "p_z",
    "double_click_rule",
)


class OpticalModel(BaseModel):
    """Lossy polarization measurements on a single entangled pair.

    Angles are in degrees. Efficiencies model a beamsplitter of that
    transmissivity in front of an ideal detector pair.
    """

    model_config = ConfigDict(frozen=True)

    eta_a: float = Field(1.0, ge=0.0, le=1.0, description="Alice detection efficiency")
    eta_b: float = Field(1.0, ge=0.0, le=1.0, description="Bob detection efficiency")
    eta_c: float = Field(1.0, ge=0.0, le=1.0, description="Charlie detection efficiency")
    angles_a: Pair = Field((0.0, 45.0), description="Alice rotation per input x")
    angles_b: Pair = Field((22.5, -22.5), description="Bob rotation per input y")
    angles_c: Pair = Field((0.0, 45.0), description="Charlie rotation per input z")
    p_switch: float = Field(0.5, gt=0.0, lt=1.0, description="Pr[S=1]")
    p_x: Pair = Field((0.5, 0.5), description="Distribution of X")
    p_y: Pair = Field((0.5, 0.5), description="Distribution of Y")
    p_z: Pair = Field((0.5, 0.5), description="Distribution of Z")
    double_click_rule: DoubleClickRule = DoubleClickRule.RANDOM_BIT

    @field_validator("angles_a", "angles_b", "angles_c", "p_x", "p_y", "p_z", mode="before")
    @classmethod
    def parse_pair(cls, value):
        return split_list(value)

    @model_validator(mode="after")
    def check_input_dists(self):
        for name in ("p_x", "p_y", "p_z"):
            dist = getattr(self, name)
            if min(dist) < 0 or abs(sum(dist) - 1.0) > 1e-12:
                raise ValueError(f"{name} must be a distribution, got {dist}")
        return self

    def with_client_efficiency(self, eta_c: float) -> OpticalModel:
        """Copy of this model with a different client efficiency."""
        if not 0.0 <= eta_c <= 1.0:
            raise ValidationError(f"eta_c must lie in [0, 1], got {eta_c}")
        return self.model_copy(update={"eta_c": float(eta_c)})

    def to_config(self) -> dict[str, object]:
        return {key: getattr(self, key) for key in CONFIG_KEYS}

    @classmethod
    def from_config(cls, values: dict[str, str]) -> OpticalModel:
        """Build from a key=value mapping, ignoring unrelated keys."""
        return cls(**{key: values[key] for key in CONFIG_KEYS if key in values})

    def save(self, path: str | Path) -> None:
        write_config(path, self.to_config())

    @classmethod
    def load(cls, path: str | Path) -> OpticalModel:
        return cls.from_config(read_config(path))


@dataclass(frozen=True)
class TwoQubitState:
    """Pure polarization state over the basis HH, HV, VH, VV."""

    coefficients: np.ndarray = field(
        default_factory=lambda: np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    )

    def __post_init__(self):
        amplitudes = np.asarray(self.coefficients, dtype=complex)
        if amplitudes.shape != (4,):
            raise ValidationError("A two-qubit state needs exactly 4 amplitudes")
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > 1e-12:
            raise ValidationError(f"State is not normalized (norm {norm})")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "coefficients", amplitudes)

    def overlap(self, other: TwoQubitState) -> complex:
        """Inner product <self|other>."""
        return complex(np.vdot(self.coefficients, other.coefficients))

    def density_matrix(self) -> np.ndarray:
        return np.outer(self.coefficients, self.coefficients.conj())
