"""Verdict and exit-code constants."""

from enum import Enum, IntEnum


class Verdict(str, Enum):
    """Outcome of a numerical certificate."""

    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"
    NON_EXHAUSTIVE = "non_exhaustive"

    def __str__(self) -> str:
        return self.value

    @property
    def ok(self) -> bool:
        return self in (Verdict.PASS, Verdict.NON_EXHAUSTIVE)


class RunStatus(str, Enum):
    """Outcome of a scenario run."""

    COMPLETED = "completed"
    INVALID = "invalid"
    TUNING_FAILED = "tuning_failed"
    DIVERGED = "diverged"

    def __str__(self) -> str:
        return self.value


class ExitCode(IntEnum):
    """Process exit codes of the batch runner."""

    OK = 0
    INVALID = 1
    TUNING = 2
    DIVERGENCE = 3

    @classmethod
    def for_status(cls, status: RunStatus) -> "ExitCode":
        return {
            RunStatus.COMPLETED: cls.OK,
            RunStatus.INVALID: cls.INVALID,
            RunStatus.TUNING_FAILED: cls.TUNING,
            RunStatus.DIVERGED: cls.DIVERGENCE,
        }[status]
