from .error import ErrorCode, ErrorDetails, ErrorReport
from .records import AssumptionReport, ExperimentResult, RatioRecord, RunSummary

__all__ = [
    "AssumptionReport",
    "ErrorCode",
    "ErrorDetails",
    "ErrorReport",
    "ExperimentResult",
    "RatioRecord",
    "RunSummary",
]
