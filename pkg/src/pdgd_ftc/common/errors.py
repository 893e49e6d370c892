"""Exception hierarchy for synthesis, simulation and scenario handling."""

from typing import List, Optional, Sequence, Tuple


class FtcError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(FtcError, ValueError):
    """Matrix or vector dimensions do not agree."""


class StructuralError(FtcError, ValueError):
    """Topology or interconnection data is inconsistent."""

    def __init__(self, message: str, offender: Optional[object] = None):
        super().__init__(message)
        self.offender = offender


class PreconditionError(FtcError, ValueError):
    """A parameter lies outside its admissible range."""

    def __init__(self, message: str, bound: Optional[float] = None):
        super().__init__(message)
        self.bound = bound


class RankError(FtcError, ValueError):
    """Stacked constraint matrix lacks full row rank."""

    def __init__(self, message: str, sigma_min: float):
        super().__init__(message)
        self.sigma_min = sigma_min


class NumericError(FtcError, ArithmeticError):
    """A dense solve or factorization failed."""


class InfeasibleError(FtcError, ValueError):
    """No point satisfies the constraints."""


class UnsupportedError(FtcError, NotImplementedError):
    """Requested operation is not available for this input."""


class TuningError(FtcError, ValueError):
    """Dual gain violates the closed-loop tuning condition."""

    def __init__(self, message: str, eta: float, minimal_eta: float, beta: float):
        super().__init__(message)
        self.eta = eta
        self.minimal_eta = minimal_eta
        self.beta = beta


class DivergenceError(FtcError, RuntimeError):
    """Integration produced a non-finite state."""

    def __init__(self, message: str, last_finite_time: float):
        super().__init__(message)
        self.last_finite_time = last_finite_time


class ScenarioError(FtcError, ValueError):
    """Scenario file failed schema validation or could not be read."""

    def __init__(self, message: str, violations: Sequence[Tuple[str, str]] = ()):
        super().__init__(message)
        self.violations: List[Tuple[str, str]] = list(violations)

    def pointers(self) -> List[str]:
        """JSON pointers of all violations."""
        return [pointer for pointer, _ in self.violations]
