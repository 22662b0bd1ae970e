"""Per-round protocol record."""

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_serializer,
    field_validator,
    model_validator,
)

from dipqrb.contracts.common import Outcome, Score


class RoundRecord(BaseModel):
    """One round of the routed Bell test as seen by the client.

    Blanking is enforced on ingestion: S=1 forces B=∅ and S=0 forces C=∅.
    Generation rounds (t=0) always carry the score ⊥.
    """

    model_config = ConfigDict(frozen=True)

    i: int = Field(..., ge=0, description="Round index")
    s: int = Field(..., ge=0, le=1, description="Switch setting")
    x: int = Field(..., ge=0, le=1, description="Alice input")
    y: int = Field(..., ge=0, le=1, description="Bob input")
    z: int = Field(..., ge=0, le=1, description="Charlie input")
    a: Outcome = Field(..., description="Alice outcome")
    b: Outcome = Field(..., description="Bob outcome")
    c: Outcome = Field(..., description="Charlie outcome")
    t: int = Field(..., ge=0, le=1, description="Test flag")
    d: Score = Field(..., description="Test score")

    @field_validator("a", "b", "c", mode="before")
    @classmethod
    def parse_outcome(cls, value):
        return Outcome.parse(value)

    @model_validator(mode="after")
    def check_blanking(self):
        if self.s == 1 and self.b is not Outcome.VOID:
            raise ValueError("s=1 requires b=void")
        if self.s == 0 and self.c is not Outcome.VOID:
            raise ValueError("s=0 requires c=void")
        if self.t == 0 and self.d is not Score.BOT:
            raise ValueError("generation rounds must carry the bot score")
        return self

    @field_serializer("a", "b", "c")
    def serialize_outcome(self, value: Outcome):
        return value.label if value is Outcome.VOID else int(value)


class RoundAnnouncement(BaseModel):
    """Server broadcast P_i = (S, X, Y, A, B) for round ``i``."""

    model_config = ConfigDict(frozen=True)

    i: int = Field(..., ge=0, description="Round index")
    s: int = Field(..., ge=0, le=1, description="Switch setting")
    x: int = Field(..., ge=0, le=1, description="Alice input")
    y: int = Field(..., ge=0, le=1, description="Bob input")
    a: Outcome = Field(..., description="Alice outcome")
    b: Outcome = Field(..., description="Bob outcome")

    @field_validator("a", "b", mode="before")
    @classmethod
    def parse_outcome(cls, value):
        return Outcome.parse(value)

    @model_validator(mode="after")
    def check_blanking(self):
        if self.s == 1 and self.b is not Outcome.VOID:
            raise ValueError("s=1 requires b=void")
        return self
