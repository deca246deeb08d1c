"""Replication harness, parameter sweeps, and file outputs.

Runs are independent tasks: each derives its own random stream from
(master_seed, run_index), so outputs are byte-identical for any worker count
or completion order. Results are collected, sorted by run index, aggregated,
and written as long-format CSV (UTF-8, LF, reals at 6 significant digits).
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Any, Sequence

from .config import ScenarioConfig, set_dotted, validate_config, write_resolved_config
from .metrics import AggregateRecord, MECHANISM_LABELS, SnapshotRecord, aggregate
from .scheduler import run_simulation

__all__ = ["run_replications", "run_scenario", "sweep", "write_outputs"]


def _run_task(args: tuple[ScenarioConfig, int, int, bool]) -> list[SnapshotRecord]:
    config, master_seed, run_index, check_invariants = args
    try:
        result = run_simulation(
            config, master_seed, run_index, check_invariants=check_invariants
        )
    except Exception as e:
        raise RuntimeError(
            f"run {run_index} failed (master_seed={master_seed}): {e}"
        ) from e
    return result.snapshots


def run_replications(
    config: ScenarioConfig,
    n_runs: int | None = None,
    master_seed: int | None = None,
    parallelism: int | None = None,
    check_invariants: bool = False,
) -> tuple[list[SnapshotRecord], list[AggregateRecord]]:
    """Execute runs 0..n_runs-1 and aggregate across them.

    parallelism=None uses the available cores; parallelism=1 stays in-process.
    """
    n_runs = config.run.n_runs if n_runs is None else n_runs
    master_seed = config.run.master_seed if master_seed is None else master_seed
    if parallelism is None:
        parallelism = os.cpu_count() or 1
    if n_runs < 1:
        raise ValueError(f"n_runs must be >= 1, got {n_runs}")

    tasks = [(config, master_seed, i, check_invariants) for i in range(n_runs)]
    if parallelism <= 1 or n_runs == 1:
        per_run = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(parallelism, n_runs)) as pool:
            per_run = list(pool.map(_run_task, tasks))

    snapshots = [rec for run in per_run for rec in run]
    snapshots.sort(key=lambda r: (r.run_index, r.cycle, r.level))
    return snapshots, aggregate(snapshots)


def _fmt(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return format(value, ".6g")


def _write_csv(path: Path, header: Sequence[str], rows: list[list]) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_outputs(
    snapshots: list[SnapshotRecord],
    aggregates: list[AggregateRecord],
    config: ScenarioConfig,
    out_dir: str | Path,
) -> list[Path]:
    """Emit the per-run and aggregate CSVs plus config echo and manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sid = config.scenario_id

    composition = [
        [sid, r.run_index, r.cycle, r.level, r.n_agents, r.n_men, r.n_women, _fmt(r.pct_male)]
        for r in snapshots
    ]
    performance = []
    bias_counts = []
    for r in snapshots:
        performance.append(
            [sid, r.run_index, r.cycle, r.level, "man", _fmt(r.mean_net_success_men)]
        )
        performance.append(
            [sid, r.run_index, r.cycle, r.level, "woman", _fmt(r.mean_net_success_women)]
        )
        values = r.mean_bias_count_women
        for j, label in enumerate(MECHANISM_LABELS):
            bias_counts.append(
                [sid, r.run_index, r.cycle, r.level, label,
                 _fmt(values[j]) if values is not None else ""]
            )

    agg_rows = {"composition": [], "performance": [], "bias_counts": []}
    for a in aggregates:
        tail = [a.metric, _fmt(a.mean), _fmt(a.ci_low), _fmt(a.ci_high), a.n_runs]
        if a.metric == "pct_male":
            agg_rows["composition"].append([sid, a.cycle, a.level] + tail)
        elif a.metric == "mean_net_success":
            agg_rows["performance"].append([sid, a.cycle, a.level, a.group] + tail)
        else:
            agg_rows["bias_counts"].append([sid, a.cycle, a.level, a.group] + tail)

    files = {
        "composition.csv": (
            ["scenario_id", "run", "cycle", "level", "n_agents", "n_men", "n_women", "pct_male"],
            composition,
        ),
        "performance.csv": (
            ["scenario_id", "run", "cycle", "level", "gender", "mean_net_success"],
            performance,
        ),
        "bias_counts.csv": (
            ["scenario_id", "run", "cycle", "level", "mechanism", "mean_count_per_woman"],
            bias_counts,
        ),
        "aggregate_composition.csv": (
            ["scenario_id", "cycle", "level", "metric", "mean", "ci_low", "ci_high", "n_runs"],
            agg_rows["composition"],
        ),
        "aggregate_performance.csv": (
            ["scenario_id", "cycle", "level", "gender", "metric", "mean", "ci_low", "ci_high",
             "n_runs"],
            agg_rows["performance"],
        ),
        "aggregate_bias_counts.csv": (
            ["scenario_id", "cycle", "level", "mechanism", "metric", "mean", "ci_low", "ci_high",
             "n_runs"],
            agg_rows["bias_counts"],
        ),
    }

    written = []
    for name, (header, rows) in files.items():
        path = out / name
        try:
            _write_csv(path, header, rows)
        except OSError as e:
            raise RuntimeError(f"failed writing {path}: {e}") from e
        written.append(path)

    write_resolved_config(config, out / "resolved_config.json")
    written.append(out / "resolved_config.json")
    manifest = {
        "scenario_id": sid,
        "n_runs": config.run.n_runs,
        "master_seed": config.run.master_seed,
        "files": sorted(p.name for p in written),
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    written.append(out / "manifest.json")
    return written


def run_scenario(
    config: ScenarioConfig,
    out_dir: str | Path,
    parallelism: int | None = None,
    check_invariants: bool = False,
) -> list[Path]:
    """run_replications + write_outputs with the config's run controls."""
    snapshots, aggregates = run_replications(
        config, parallelism=parallelism, check_invariants=check_invariants
    )
    return write_outputs(snapshots, aggregates, config, out_dir)


def _value_slug(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return "-".join(_value_slug(v) for v in value)
    if isinstance(value, float):
        return format(value, "g")
    return str(value)


def sweep(
    base: ScenarioConfig,
    param: str,
    values: Sequence[Any],
    out_dir: str | Path,
    parallelism: int | None = None,
) -> list[Path]:
    """Run one replication batch per parameter value, tagged by value.

    Each cell writes into <out_dir>/<scenario_id>__<param>=<value>/ and the
    top-level manifest lists every cell.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cells = []
    written = []
    for value in values:
        cell_config = validate_config(set_dotted(base, param, value))
        cell_id = f"{base.scenario_id}__{param}={_value_slug(value)}"
        cell_config = replace(cell_config, scenario_id=cell_id)
        cell_dir = out / cell_id
        written += run_scenario(cell_config, cell_dir, parallelism=parallelism)
        cells.append({"param": param, "value": value, "scenario_id": cell_id,
                      "path": cell_dir.name})
    manifest = {
        "scenario_id": base.scenario_id,
        "sweep_param": param,
        "n_runs": base.run.n_runs,
        "master_seed": base.run.master_seed,
        "cells": cells,
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    written.append(out / "manifest.json")
    return written
