"""Reading and classifying simulation output directories.

A dataset directory holds one subdirectory per condition, each containing the
simulator's aggregate CSVs plus resolved_config.json. Conditions are
classified from the resolved config (not from directory names), so sweep
cells and hand-rolled runs both work.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path


class SchemaError(ValueError):
    """An input file is missing or does not match the expected schema."""


AGGREGATE_COLUMNS = {
    "aggregate_composition.csv": ["scenario_id", "cycle", "level", "metric",
                                  "mean", "ci_low", "ci_high", "n_runs"],
    "aggregate_performance.csv": ["scenario_id", "cycle", "level", "gender", "metric",
                                  "mean", "ci_low", "ci_high", "n_runs"],
    "aggregate_bias_counts.csv": ["scenario_id", "cycle", "level", "mechanism", "metric",
                                  "mean", "ci_low", "ci_high", "n_runs"],
}


@dataclass(frozen=True)
class Condition:
    """One simulated condition: its directory and resolved parameters."""

    path: Path
    scenario_id: str
    config: dict

    @property
    def norms_enabled(self) -> bool:
        return bool(self.config.get("norms.enabled", False))

    @property
    def w(self) -> float:
        return float(self.config.get("norms.w", 0.0))

    @property
    def quota(self) -> float:
        return float(self.config.get("intervention.k", 0.0))

    @property
    def window(self) -> tuple[int, int]:
        start, end = self.config.get("intervention.i_range", [0, 0])
        return int(start), int(end)

    @property
    def n_promotion(self) -> int:
        return int(self.config.get("n_promotion", 24))


def read_rows(path: Path) -> list[dict]:
    """Read one aggregate CSV, validating its column set."""
    if not path.exists():
        raise SchemaError(f"missing input file: {path}")
    with path.open(encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        expected = AGGREGATE_COLUMNS.get(path.name)
        if expected is not None:
            for column in expected:
                if column not in (reader.fieldnames or []):
                    raise SchemaError(f"{path} is missing column '{column}'")
        return list(reader)


def load_condition(path: Path) -> Condition:
    resolved = path / "resolved_config.json"
    if not resolved.exists():
        raise SchemaError(f"{path} has no resolved_config.json")
    config = json.loads(resolved.read_text(encoding="utf-8"))
    return Condition(path=path, scenario_id=str(config.get("scenario_id", path.name)),
                     config=config)


def discover(input_dir: Path) -> list[Condition]:
    """All condition directories under a dataset root.

    Scans two levels deep so that both flat layouts (one run per child) and
    sweep layouts (a sweep directory holding one child per cell) work.
    """
    input_dir = Path(input_dir)
    if not input_dir.is_dir():
        raise SchemaError(f"input directory does not exist: {input_dir}")
    conditions = []
    for child in sorted(input_dir.iterdir()):
        if not child.is_dir():
            continue
        if (child / "resolved_config.json").exists():
            conditions.append(load_condition(child))
            continue
        for grandchild in sorted(child.iterdir()):
            if grandchild.is_dir() and (grandchild / "resolved_config.json").exists():
                conditions.append(load_condition(grandchild))
    if not conditions:
        raise SchemaError(f"no condition directories with resolved_config.json "
                          f"under {input_dir}")
    return conditions


def by_scenario(conditions: list[Condition]) -> dict[str, Condition]:
    return {c.scenario_id: c for c in conditions}


def series(rows: list[dict], value_key: str = "mean", **filters: str):
    """Filter rows and return (cycles, values, ci_low, ci_high) sorted by cycle.

    Values are the parsed CSV numbers, untouched: what gets plotted is
    exactly what the file says.
    """
    picked = [r for r in rows if all(r[k] == v for k, v in filters.items())]
    picked.sort(key=lambda r: int(r["cycle"]))
    cycles = [int(r["cycle"]) for r in picked]
    means = [float(r[value_key]) for r in picked]
    low = [float(r["ci_low"]) for r in picked]
    high = [float(r["ci_high"]) for r in picked]
    return cycles, means, low, high
