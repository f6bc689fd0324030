from enum import Enum
from typing import Any, Dict, List

from pydantic import BaseModel, ConfigDict


class ErrorCode(str, Enum):
    """Standardized error codes shared by the library, the CLI and summary.json."""

    # Configuration errors
    CONFIG_SYNTAX = "CONFIG_SYNTAX"
    CONFIG_UNKNOWN_KEY = "CONFIG_UNKNOWN_KEY"
    CONFIG_CONSTRAINT = "CONFIG_CONSTRAINT"

    # Domain/argument errors
    INVALID_INDEX = "INVALID_INDEX"
    DOMAIN_ERROR = "DOMAIN_ERROR"
    EVALUATION_ERROR = "EVALUATION_ERROR"
    QUADRATURE_DEGREE = "QUADRATURE_DEGREE"
    POSITIVITY = "POSITIVITY"
    ADMISSIBILITY = "ADMISSIBILITY"
    INSUFFICIENT_DOMAIN = "INSUFFICIENT_DOMAIN"
    DIMENSION_MISMATCH = "DIMENSION_MISMATCH"

    # Dynamics errors
    BLOW_UP = "BLOW_UP"
    NO_CONTRACTION = "NO_CONTRACTION"
    BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"

    INTERNAL_ERROR = "INTERNAL_ERROR"


class ErrorDetails(BaseModel):
    """Context information for errors."""

    location: str | None = None
    value: Any | None = None
    time: float | None = None
    field_errors: Dict[str, str] | None = None
    suggestions: List[str] | None = None

    def has_content(self) -> bool:
        """Check if the error details contain any meaningful content."""
        return bool(self.model_dump(exclude_unset=True, exclude_none=True))


class ErrorReport(BaseModel):
    """Standardized error record, as written to summary.json."""

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "error_code": "ADMISSIBILITY",
                "message": "admissibility: 2/3+2/3 != 1",
                "details": {
                    "location": "experiments.0.norms.0",
                    "value": {"p": 3, "q": 3, "family": "massless"},
                    "suggestions": ["Pick (p, q) with 2/p + 2/q = 1 and p > 2, e.g. (4, 4)"],
                },
            }
        }
    )

    error_code: ErrorCode
    message: str
    details: ErrorDetails | None = None


# Error message templates for consistent messaging
ERROR_MESSAGES = {
    ErrorCode.CONFIG_SYNTAX: "The configuration could not be parsed: {reason}",
    ErrorCode.CONFIG_UNKNOWN_KEY: "Unknown configuration key '{key}'.",
    ErrorCode.CONFIG_CONSTRAINT: "{reason}",
    ErrorCode.INVALID_INDEX: {
        "partial_wave": "Invalid partial-wave index (j={j}, m_j={m}, k_j={k}).",
        "harmonic": "Invalid spherical harmonic (l={l}, m={m}): need |m| <= l.",
        "generic": "Invalid index.",
    },
    ErrorCode.DOMAIN_ERROR: "phi vanishes at r={r}; the warp is outside its domain.",
    ErrorCode.EVALUATION_ERROR: "Warp '{warp}' is not finite at r={r}.",
    ErrorCode.QUADRATURE_DEGREE: (
        "Quadrature degree {degree} is too coarse; need at least {required}."
    ),
    ErrorCode.POSITIVITY: "Discrete operator is not positive definite (eigenvalue {eigenvalue}).",
    ErrorCode.ADMISSIBILITY: "admissibility: {reason}",
    ErrorCode.INSUFFICIENT_DOMAIN: (
        "R_max={r_max} is too small for data support {support} "
        "over T={horizon} with margin {margin}."
    ),
    ErrorCode.DIMENSION_MISMATCH: "Dimension mismatch: expected {expected}, got {actual}.",
    ErrorCode.BLOW_UP: "State became non-finite at t={time}.",
    ErrorCode.NO_CONTRACTION: "No contraction at T={horizon}: ratios {ratios}.",
    ErrorCode.BUDGET_EXHAUSTED: "Budget exhausted: {reason}",
    ErrorCode.INTERNAL_ERROR: "An unexpected error occurred: {reason}",
}


def get_error_message(error_code: ErrorCode, context: str = "generic", **kwargs) -> str:
    """Get formatted error message for an error code."""
    messages = ERROR_MESSAGES.get(error_code)

    if isinstance(messages, dict):
        message_template = messages.get(context, messages.get("generic", "An error occurred."))
    else:
        message_template = messages or "An error occurred."

    try:
        return message_template.format(**kwargs)
    except (KeyError, ValueError, IndexError):
        return message_template
