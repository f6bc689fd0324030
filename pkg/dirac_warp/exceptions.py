"""
Exception hierarchy.

Every error carries an ``ErrorCode`` and optional ``ErrorDetails`` so that the
CLI can turn it into an ``ErrorReport`` without inspecting the message.
"""

from typing import Any, List

from .models.error import ErrorCode, ErrorDetails, ErrorReport, get_error_message


class DiracWarpError(Exception):
    code: ErrorCode = ErrorCode.INTERNAL_ERROR

    def __init__(
        self,
        message: str | None = None,
        *,
        details: ErrorDetails | None = None,
        context: str = "generic",
        **template_args: Any,
    ):
        self.details = details
        self.message = message or get_error_message(self.code, context, **template_args)
        super().__init__(self.message)

    def to_report(self) -> ErrorReport:
        details = self.details if self.details is not None and self.details.has_content() else None
        return ErrorReport(error_code=self.code, message=self.message, details=details)


class InvalidIndexError(DiracWarpError, ValueError):
    code = ErrorCode.INVALID_INDEX


class DomainError(DiracWarpError, ValueError):
    code = ErrorCode.DOMAIN_ERROR


class EvaluationError(DiracWarpError, ArithmeticError):
    code = ErrorCode.EVALUATION_ERROR


class QuadratureDegreeError(DiracWarpError, ValueError):
    code = ErrorCode.QUADRATURE_DEGREE


class PositivityError(DiracWarpError, ArithmeticError):
    code = ErrorCode.POSITIVITY


class AdmissibilityError(DiracWarpError, ValueError):
    code = ErrorCode.ADMISSIBILITY


class InsufficientDomainError(DiracWarpError, ValueError):
    code = ErrorCode.INSUFFICIENT_DOMAIN


class DimensionMismatchError(DiracWarpError, ValueError):
    code = ErrorCode.DIMENSION_MISMATCH


class BlowUpError(DiracWarpError, ArithmeticError):
    """The state became non-finite; ``time`` is the last instant reached."""

    code = ErrorCode.BLOW_UP

    def __init__(self, time: float, message: str | None = None):
        self.time = float(time)
        super().__init__(message, details=ErrorDetails(time=self.time), time=self.time)


class NoContractionError(DiracWarpError, RuntimeError):
    code = ErrorCode.NO_CONTRACTION

    def __init__(self, horizon: float, ratios: List[float]):
        self.horizon = float(horizon)
        self.ratios = list(ratios)
        shown = ", ".join(f"{r:.3g}" for r in self.ratios[-3:])
        super().__init__(
            details=ErrorDetails(
                value=self.ratios, suggestions=["Halve the horizon T and retry"]
            ),
            horizon=self.horizon,
            ratios=f"[{shown}]",
        )


class InternalError(DiracWarpError, RuntimeError):
    code = ErrorCode.INTERNAL_ERROR


class BudgetExhaustedError(DiracWarpError, RuntimeError):
    code = ErrorCode.BUDGET_EXHAUSTED


class ConfigError(DiracWarpError, ValueError):
    """Carries every problem found in a configuration, not just the first one."""

    code = ErrorCode.CONFIG_CONSTRAINT

    def __init__(self, reports: List[ErrorReport]):
        self.reports = list(reports)
        if self.reports:
            self.code = self.reports[0].error_code
        lines = [
            f"{r.details.location}: {r.message}" if r.details and r.details.location else r.message
            for r in self.reports
        ]
        super().__init__(f"{len(self.reports)} configuration error(s): " + "; ".join(lines))
