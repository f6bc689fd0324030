"""Experiment registry and the single entry point the CLI calls per experiment."""

import time
from typing import Callable, Dict, NamedTuple

from glogger import get_component_logger

from ..evolve import release_caches
from ..exceptions import DiracWarpError
from ..models.config import ExperimentKind, ExperimentSpec, RunConfig
from ..models.error import ErrorCode, ErrorReport, get_error_message
from ..models.records import ExperimentResult
from .base import ExperimentContext
from .dynamics import run_contraction, run_duhamel, run_invariance, run_unitarity
from .potential import run_conjugation, run_isometry, run_potential_bound, run_sigma_continuity
from .spectral import run_algebra, run_spectral
from .strichartz import run_strichartz_ratio

logger = get_component_logger("experiments")

Runner = Callable[[ExperimentContext], ExperimentResult]


class RegisteredExperiment(NamedTuple):
    runner: Runner
    description: str


RUNNERS: Dict[ExperimentKind, RegisteredExperiment] = {
    ExperimentKind.ALGEBRA: RegisteredExperiment(
        run_algebra, "Clifford identities, permutation rotation and rotated block form"
    ),
    ExperimentKind.STRICHARTZ: RegisteredExperiment(
        run_strichartz_ratio, "Weighted Strichartz ratio sweep over dyadic angular blocks"
    ),
    ExperimentKind.POTENTIAL_BOUND: RegisteredExperiment(
        run_potential_bound, "Operator norm of the warp potential against its sup bound"
    ),
    ExperimentKind.SIGMA_CONTINUITY: RegisteredExperiment(
        run_sigma_continuity, "Multiplication by sigma on L^2 and H^1"
    ),
    ExperimentKind.ISOMETRY: RegisteredExperiment(
        run_isometry, "Weighted L^q norms of g against sigma g"
    ),
    ExperimentKind.CONJUGATION: RegisteredExperiment(
        run_conjugation, "Discrete sigma-conjugation identity and its convergence order"
    ),
    ExperimentKind.SPECTRAL: RegisteredExperiment(
        run_spectral, "Angular Dirac eigen-relation, Gram matrix and sigma3 relation"
    ),
    ExperimentKind.UNITARITY: RegisteredExperiment(
        run_unitarity, "L^2 conservation and time reversal of the linear flow"
    ),
    ExperimentKind.DUHAMEL: RegisteredExperiment(
        run_duhamel, "Duhamel identity for the flat operator plus the warp potential"
    ),
    ExperimentKind.INVARIANCE: RegisteredExperiment(
        run_invariance, "Invariance of j = 1/2 partial waves under the self-interaction"
    ),
    ExperimentKind.CONTRACTION: RegisteredExperiment(
        run_contraction, "Picard contraction horizon against the size of the data"
    ),
}


def run_experiment(spec: ExperimentSpec, run_config: RunConfig) -> ExperimentResult:
    """
    Resolve defaults, run one experiment and time it.

    Library errors end up in ``result.error`` next to the rows gathered before the
    failure; any other exception is reported as INTERNAL_ERROR. Propagator caches
    are released afterwards.
    """
    started = time.perf_counter()
    context = ExperimentContext.resolve(spec, run_config)
    try:
        result = RUNNERS[spec.kind].runner(context)
    except DiracWarpError as exc:
        logger.error_with_context(
            "Experiment failed", {"experiment": spec.label, "code": exc.code.value}
        )
        result = context.issued[0] if context.issued else context.result([])
        result.error = exc.to_report()
    except Exception as exc:
        logger.exception_with_context(
            "Unexpected failure in experiment", {"experiment": spec.label, "error": str(exc)}
        )
        result = context.issued[0] if context.issued else context.result([])
        result.error = ErrorReport(
            error_code=ErrorCode.INTERNAL_ERROR,
            message=get_error_message(ErrorCode.INTERNAL_ERROR, reason=str(exc)),
        )
    finally:
        release_caches()
    result.wall_time_s = time.perf_counter() - started
    if result.error is not None:
        result.passed = False
        status = "error"
    else:
        status = "pass" if result.passed else "fail"
    logger.log_run(
        spec.label,
        status,
        duration_ms=1000.0 * result.wall_time_s,
        kind=spec.kind.value,
        rows=len(result.rows),
    )
    return result
