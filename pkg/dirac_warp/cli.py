"""
Command-line entry point: ``dirac-warp check|run|list-warps|list-experiments|version``.

Exit status: 0 when every experiment passes, 1 when one fails or errors, 2 when the
configuration is rejected.
"""

import json
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List

import click
import yaml
from dotenv import load_dotenv
from glogger import get_component_logger, get_run_logger, reconfigure_logging
from pydantic import ValidationError

from . import __version__
from .exceptions import ConfigError
from .experiments import RUNNERS, run_experiment
from .manifold import warp_table
from .models.config import ExperimentSpec, GridConfig, RunConfig
from .models.error import ErrorCode, ErrorDetails, ErrorReport, get_error_message
from .models.records import ExperimentResult, ExperimentSummary, RunSummary
from .utils import format_value, new_run_id, write_csv

load_dotenv()

logger = get_component_logger("cli")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

_ERROR_TYPES = {
    "extra_forbidden": ErrorCode.CONFIG_UNKNOWN_KEY,
    "admissibility": ErrorCode.ADMISSIBILITY,
}


def _syntax_error(reason: str) -> ConfigError:
    return ConfigError(
        [
            ErrorReport(
                error_code=ErrorCode.CONFIG_SYNTAX,
                message=get_error_message(ErrorCode.CONFIG_SYNTAX, reason=reason),
            )
        ]
    )


def _load_document(text: str) -> Dict[str, Any]:
    """JSON when the text is a JSON object, the YAML key-value format otherwise."""
    try:
        if text.lstrip().startswith("{"):
            document = json.loads(text)
        else:
            document = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise _syntax_error(str(exc)) from exc
    if document is None:
        return {}
    if not isinstance(document, dict):
        raise _syntax_error(f"the top level must be a mapping, not {type(document).__name__}")
    return document


def _report_from_pydantic(error: Dict[str, Any]) -> ErrorReport:
    location = ".".join(str(part) for part in error["loc"]) or None
    code = _ERROR_TYPES.get(error["type"], ErrorCode.CONFIG_CONSTRAINT)
    if code == ErrorCode.CONFIG_UNKNOWN_KEY:
        message = get_error_message(code, key=error["loc"][-1])
    else:
        message = error["msg"].removeprefix("Value error, ")
    value = error.get("input")
    if not isinstance(value, (int, float, str, bool)) or code == ErrorCode.CONFIG_UNKNOWN_KEY:
        value = None
    return ErrorReport(
        error_code=code, message=message, details=ErrorDetails(location=location, value=value)
    )


def _surviving_constraint_reports(document: Dict[str, Any]) -> List[ErrorReport]:
    """
    Cross-section checks on the experiments that validate on their own when the
    whole document does not. Nothing is checked if the run-level sections are invalid.
    """
    entries = document.get("experiments")
    if not isinstance(entries, list):
        return []
    positions, specs = [], []
    for position, entry in enumerate(entries):
        try:
            specs.append(ExperimentSpec.model_validate(entry))
        except ValidationError:
            continue
        positions.append(position)
    try:
        config = RunConfig.model_validate({**document, "experiments": specs})
    except ValidationError:
        return []
    return config.constraint_reports(positions)


def parse_config(text: str) -> RunConfig:
    """
    Parse and validate a run configuration.

    Every problem is collected: schema errors from pydantic first, then the
    cross-section checks (warp assumptions and domain margins) on every experiment
    whose own entry is valid. Raises ConfigError carrying all of them.
    """
    document = _load_document(text)
    try:
        config = RunConfig.model_validate(document)
    except ValidationError as exc:
        reports = [_report_from_pydantic(e) for e in exc.errors()]
        raise ConfigError(reports + _surviving_constraint_reports(document)) from exc
    reports = config.constraint_reports()
    if reports:
        raise ConfigError(reports)
    return config


def _read_config(path: Path) -> RunConfig:
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise _syntax_error(f"{path} is not UTF-8 text") from exc
    return parse_config(text)


def _write_result(result: ExperimentResult, output_dir: Path) -> ExperimentSummary:
    suffix = ".csv.partial" if result.error is not None else ".csv"
    path = write_csv(output_dir / f"{result.name}{suffix}", result.columns, result.rows)
    return ExperimentSummary(
        name=result.name,
        kind=result.kind,
        passed=result.passed,
        csv=path.name,
        headline=result.headline,
        tolerances=result.tolerances,
        refinement=result.refinement,
        notes=result.notes,
        error=result.error,
        wall_time_s=result.wall_time_s,
    )


def execute(config: RunConfig, output_dir: Path, threads: int = 1) -> RunSummary:
    """
    Run every experiment, write ``<name>.csv`` (``.csv.partial`` after an error)
    and ``summary.json``. Results are written in config order whatever the thread count.
    """
    run_id = new_run_id()
    run_logger = get_run_logger(run_id)
    output_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    run_logger.info_with_context(
        "Run started",
        {"experiments": len(config.experiments), "threads": threads, "seed": config.seed},
    )

    if threads > 1 and len(config.experiments) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda spec: run_experiment(spec, config), config.experiments))
    else:
        results = [run_experiment(spec, config) for spec in config.experiments]

    summaries = [_write_result(result, output_dir) for result in results]
    summary = RunSummary(
        package_version=__version__,
        run_id=run_id,
        seed=config.seed,
        threads=threads,
        config=config.model_dump(mode="json"),
        experiments=summaries,
        all_passed=all(s.passed for s in summaries),
        wall_time_s=time.perf_counter() - started,
    )
    (output_dir / "summary.json").write_text(
        summary.model_dump_json(indent=2) + "\n", encoding="utf-8"
    )
    run_logger.info_with_context(
        "Run finished",
        {
            "passed": sum(s.passed for s in summaries),
            "total": len(summaries),
            "wall_time_s": summary.wall_time_s,
        },
    )
    return summary


def _echo_config_error(error: ConfigError) -> None:
    logger.warning_with_context(
        "Configuration rejected", {"errors": len(error.reports), "first": error.code.value}
    )
    for report in error.reports:
        location = report.details.location if report.details else None
        prefix = f"{location}: " if location else ""
        click.echo(f"{report.error_code.value} {prefix}{report.message}", err=True)


def _echo_rows(rows: List[Dict[str, Any]]) -> None:
    if not rows:
        return
    columns = list(rows[0])
    texts = [[format_value(row[c]) for c in columns] for row in rows]
    widths = [max(len(c), *(len(t[i]) for t in texts)) for i, c in enumerate(columns)]
    click.echo("  ".join(c.ljust(w) for c, w in zip(columns, widths)))
    for text in texts:
        click.echo("  ".join(t.ljust(w) for t, w in zip(text, widths)))


@click.group()
@click.option(
    "--log-format",
    type=click.Choice(["text", "json"]),
    default=None,
    help="Console log format (defaults from ENVIRONMENT).",
)
@click.option(
    "--log-file",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Also write every log record as JSON lines to this file.",
)
def main(log_format: str | None, log_file: Path | None) -> None:
    """Partial-wave experiments for the Dirac equation on warped manifolds."""
    if log_file is not None:
        reconfigure_logging("jsonl_file", {"path": str(log_file)})
    elif log_format is not None:
        reconfigure_logging("console", {"json_format": log_format == "json"})
    else:
        # picks up ENVIRONMENT and LOG_LEVEL from a .env file
        reconfigure_logging()


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def check(config_path: Path) -> None:
    """
    Parse and validate a configuration without running anything.

    Prints one line per problem: schema errors, then warp and domain checks for
    every experiment whose own entry is valid.
    """
    try:
        config = _read_config(config_path)
    except ConfigError as exc:
        _echo_config_error(exc)
        raise SystemExit(EXIT_CONFIG)
    click.echo(f"ok: {len(config.experiments)} experiment(s)")


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--output-dir",
    type=click.Path(file_okay=False, path_type=Path),
    envvar="DIRAC_WARP_OUTPUT_DIR",
    default=None,
    help="Where CSV files and summary.json go (overrides the config).",
)
@click.option(
    "--threads",
    type=click.IntRange(min=1),
    envvar="DIRAC_WARP_THREADS",
    default=1,
    show_default=True,
    help="Experiments run in parallel; 1 is deterministic.",
)
@click.option(
    "--seed",
    type=click.IntRange(0, 2**64 - 1),
    default=None,
    help="Overrides the seed in the config.",
)
def run(config_path: Path, output_dir: Path | None, threads: int, seed: int | None) -> None:
    """Run every experiment in a configuration."""
    try:
        config = _read_config(config_path)
    except ConfigError as exc:
        _echo_config_error(exc)
        raise SystemExit(EXIT_CONFIG)
    if seed is not None:
        config = config.model_copy(update={"seed": seed})
    summary = execute(config, output_dir or Path(config.output_dir), threads)
    for experiment in summary.experiments:
        status = "error" if experiment.error else ("pass" if experiment.passed else "fail")
        click.echo(f"{status:5}  {experiment.name}  ({experiment.wall_time_s:.2f}s)")
    raise SystemExit(EXIT_OK if summary.all_passed else EXIT_FAILED)


@main.command("list-warps")
@click.option("--N", "n", type=click.IntRange(min=3), default=GridConfig().N, show_default=True)
@click.option("--dr", type=click.FloatRange(min=0, min_open=True), default=GridConfig().dr)
def list_warps(n: int, dr: float) -> None:
    """Built-in warps and whether they meet the assumptions on the given grid."""
    _echo_rows(warp_table(GridConfig(N=n, dr=dr).to_grid()))


@main.command("list-experiments")
def list_experiments() -> None:
    """Experiment kinds accepted in a configuration."""
    _echo_rows([{"kind": kind.value, "description": r.description} for kind, r in RUNNERS.items()])


@main.command()
def version() -> None:
    click.echo(__version__)


if __name__ == "__main__":
    main()
