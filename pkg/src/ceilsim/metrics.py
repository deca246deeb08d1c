"""Per-cycle per-level statistics and cross-replication aggregation.

Snapshots are taken immediately after each promotion cycle. Bias counters are
cumulative lifetime counts that travel with agents across promotions, so a
level's mean reflects the women currently occupying it. Metrics over an empty
gender group carry a null marker (not 0) and are skipped by aggregation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

from .domain import BiasMechanism

if TYPE_CHECKING:  # pragma: no cover
    from .core import Company

Z_95 = 1.96

# Label for the per-woman total across all six mechanisms; emitted alongside
# the per-mechanism rows so figure code never has to derive sums itself.
TOTAL_MECHANISM = "total"

MECHANISM_LABELS = tuple(m.label for m in BiasMechanism) + (TOTAL_MECHANISM,)


@dataclass(frozen=True, slots=True)
class SnapshotRecord:
    """Aggregates for one (run, cycle, level) cell."""

    run_index: int
    cycle: int
    level: int
    n_agents: int
    n_men: int
    n_women: int
    pct_male: float
    mean_net_success_men: float | None
    mean_net_success_women: float | None
    mean_bias_count_women: tuple[float, ...] | None  # per mechanism + total


@dataclass(frozen=True, slots=True)
class AggregateRecord:
    """Cross-run mean and 95% CI for one metric cell."""

    cycle: int
    level: int
    metric: str
    group: str | None  # gender or mechanism label where applicable
    mean: float
    ci_low: float
    ci_high: float
    n_runs: int


def snapshot(company: "Company", cycle: int, run_index: int) -> list[SnapshotRecord]:
    """One record per level, computed over the current rosters."""
    records = []
    for number, level in enumerate(company.levels, start=1):
        women = level.is_woman
        men = ~women
        n_women = int(women.sum())
        n_men = level.size - n_women
        net = level.successes - level.failures
        if n_women:
            counts = level.bias_events[women].mean(axis=0)
            bias_means = tuple(float(c) for c in counts) + (float(counts.sum()),)
        else:
            bias_means = None
        records.append(
            SnapshotRecord(
                run_index=run_index,
                cycle=cycle,
                level=number,
                n_agents=level.size,
                n_men=n_men,
                n_women=n_women,
                pct_male=n_men / level.size,
                mean_net_success_men=float(net[men].mean()) if n_men else None,
                mean_net_success_women=float(net[women].mean()) if n_women else None,
                mean_bias_count_women=bias_means,
            )
        )
    return records


def _confidence_interval(values: list[float]) -> tuple[float, float, float, int]:
    n = len(values)
    mean = math.fsum(values) / n
    if n == 1:
        warnings.warn("aggregating a single run: confidence interval is degenerate")
        return mean, mean, mean, 1
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    half = Z_95 * math.sqrt(var) / math.sqrt(n)
    return mean, mean - half, mean + half, n


def aggregate(snapshots: Iterable[SnapshotRecord]) -> list[AggregateRecord]:
    """Mean and 95% normal-approximation CI per (cycle, level, metric, group).

    Input ordering is irrelevant: records are regrouped and sorted before any
    floating-point accumulation, so permuted runs aggregate bit-identically.
    Null markers are skipped; n_runs records the values actually used.
    """
    cells: dict[tuple[int, int, str, str | None], list[tuple[int, float]]] = {}

    def add(cycle: int, level: int, metric: str, group: str | None, run: int, value: float):
        cells.setdefault((cycle, level, metric, group), []).append((run, value))

    for rec in snapshots:
        add(rec.cycle, rec.level, "pct_male", None, rec.run_index, rec.pct_male)
        if rec.mean_net_success_men is not None:
            add(rec.cycle, rec.level, "mean_net_success", "man", rec.run_index,
                rec.mean_net_success_men)
        if rec.mean_net_success_women is not None:
            add(rec.cycle, rec.level, "mean_net_success", "woman", rec.run_index,
                rec.mean_net_success_women)
        if rec.mean_bias_count_women is not None:
            for label, value in zip(MECHANISM_LABELS, rec.mean_bias_count_women):
                add(rec.cycle, rec.level, "mean_count_per_woman", label, rec.run_index, value)

    records = []
    for key in sorted(cells, key=lambda k: (k[0], k[1], k[2], k[3] or "")):
        cycle, level, metric, group = key
        values = [v for _, v in sorted(cells[key])]
        mean, ci_low, ci_high, n = _confidence_interval(values)
        records.append(AggregateRecord(cycle, level, metric, group, mean, ci_low, ci_high, n))
    return records
