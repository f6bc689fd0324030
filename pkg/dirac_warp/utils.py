import csv
import math
import uuid
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np


def format_value(value: Any) -> str:
    """Shortest round-trip text for floats, plain str otherwise; CSV output depends on it."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({column: format_value(row.get(column)) for column in columns})
    return path


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent, reproducible stream per (seed, keys)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))


def new_run_id() -> str:
    return uuid.uuid4().hex[:12]


def convergence_orders(errors: Sequence[float], factor: float = 2.0) -> List[float]:
    """Observed orders log(e_i / e_{i+1}) / log(factor) between successive refinements."""
    orders = []
    for coarse, fine in zip(errors, errors[1:]):
        if coarse > 0 and fine > 0:
            orders.append(math.log(coarse / fine) / math.log(factor))
        else:
            orders.append(math.inf)
    return orders


def gaussian_bump(
    r: np.ndarray, r0: float, width: float, phase: float = 0.0, amplitude: float = 1.0
) -> np.ndarray:
    """amplitude * r * exp(-(r - r0)^2 / width^2) * exp(i phase), a w-profile vanishing like r."""
    return amplitude * r * np.exp(-((r - r0) ** 2) / width**2) * np.exp(1j * phase)


def growth_exponent(brackets: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of log(values) against log(brackets)."""
    x = np.log(np.asarray(brackets, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    if x.size < 2:
        return math.nan
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
