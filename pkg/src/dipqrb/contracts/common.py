"""Common enums shared across modules."""

from enum import Enum, IntEnum


class Outcome(IntEnum):
    """Measurement outcome; VOID is the no-click symbol."""

    ZERO = 0
    ONE = 1
    VOID = 2

    @property
    def label(self) -> str:
        """Text form used in CSV and JSON-lines files."""
        return "void" if self is Outcome.VOID else str(int(self))

    @classmethod
    def parse(cls, value: "int | str | Outcome") -> "Outcome":
        """Parse 0, 1, 2, "0", "1" or "void"."""
        if isinstance(value, str):
            text = value.strip().lower()
            if text in ("void", "∅", "none", "2"):
                return cls.VOID
            return cls(int(text))
        return cls(int(value))


class Mode(str, Enum):
    """Protocol security mode."""

    SEMI_DI = "semi_di"
    FULLY_DI = "fully_di"


class DoubleClickRule(str, Enum):
    """How simultaneous clicks are squashed to one outcome."""

    RANDOM_BIT = "random_bit"
    FIXED_ZERO = "fixed_zero"
    INCONCLUSIVE = "inconclusive"


class Score(str, Enum):
    """Test-register alphabet D."""

    BOT = "bot"
    CHSH_WIN = "chsh_win"
    CHSH_LOSS = "chsh_loss"
    SERVER_NOCLICK = "server_noclick"
    AGREE_0 = "agree_0"
    ERROR_0 = "error_0"
    CLIENT_NOCLICK_0 = "client_noclick_0"
    AGREE_1 = "agree_1"
    ERROR_1 = "error_1"
    CLIENT_NOCLICK_1 = "client_noclick_1"
    OFFBASIS = "offbasis"


SCORES: tuple[Score, ...] = tuple(Score)


class SessionStatus(str, Enum):
    """Final transcript status."""

    COMPLETED = "completed"
    ABORTED = "aborted"
    TRANSPORT_ERROR = "transport_error"


class AbortReason(str, Enum):
    """Why a session did not complete."""

    OUTSIDE_ACCEPTED_SET = "outside_accepted_set"
    BELOW_THRESHOLD = "below_threshold"
    TRANSPORT_ERROR = "transport_error"


class SolverStatus(str, Enum):
    """SDP solver termination status."""

    OPTIMAL = "optimal"
    MAX_ITER = "max_iter"
    INFEASIBLE_PRIMAL = "infeasible_primal"
    INFEASIBLE_DUAL = "infeasible_dual"
    NUMERICAL_FAILURE = "numerical_failure"


class ConstraintMode(str, Enum):
    """Which behavior statistics constrain the guessing program."""

    FULL_DISTRIBUTION = "full_distribution"
    COARSE_GRAINED = "coarse_grained"
