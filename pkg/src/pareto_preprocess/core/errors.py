from typing import Any, List, Optional, Sequence


class ParetoError(Exception):
    """Base class for every failure raised by pareto_preprocess."""


class InstanceValidationError(ParetoError):
    def __init__(
        self, message: str, ids: Sequence[str] = (), report: Optional[Any] = None
    ) -> None:
        super().__init__(message)
        self.ids: List[str] = list(ids)
        self.report = report


class DisjointnessViolation(InstanceValidationError):
    pass


class ContainmentViolation(InstanceValidationError):
    pass


class GeneralPositionViolation(InstanceValidationError):
    pass


class PreprocessError(ParetoError):
    pass


class EmptyAfterTruncation(PreprocessError):
    pass


class ReconstructionError(ParetoError):
    pass


class PredicateNotMonotone(ReconstructionError):
    pass


class InvariantViolation(ReconstructionError):
    pass


class OracleContainmentViolation(ReconstructionError):
    pass


class ResolutionMismatch(ReconstructionError):
    pass


class AnalysisError(ParetoError):
    pass


class LimitExceeded(AnalysisError):
    pass


class VerificationFailure(AnalysisError):
    def __init__(self, clause: str, message: str) -> None:
        super().__init__(f"[{clause}] {message}")
        self.clause = clause


class GenerationRetryExceeded(ParetoError):
    pass
