"""Quota-based promotion policy and its activation window.

During the window, promotions into each level above entry first try to bring
that level's female share up to the quota K (promoting the top women by
promotability from the level below), then fill the remaining vacancies on
merit. The meso-norm weight switches from w0 to w at the window start and
stays at w for the rest of the simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .core import _merit_order

if TYPE_CHECKING:  # pragma: no cover
    from .core import Company

__all__ = ["InterventionParams", "intervention_active", "current_w", "quota_promote", "QuotaPolicy"]


@dataclass(frozen=True)
class InterventionParams:
    """Quota percentage and the [start, end] window in project turns."""

    k: float = 0.0
    i_start: int = 0
    i_end: int = 0

    @property
    def i_range(self) -> tuple[int, int]:
        return (self.i_start, self.i_end)


def intervention_active(turn_index: int, params: InterventionParams) -> bool:
    """True iff start <= turn_index <= end."""
    return params.i_start <= turn_index <= params.i_end


def current_w(turn_index: int, params: InterventionParams, w0: float, w: float) -> float:
    """Meso weight for a turn: w0 before the window starts, w ever after."""
    return w0 if turn_index < params.i_start else w


def quota_promote(
    company: "Company", source_idx: int, n_vacancies: int, k_quota: float
) -> np.ndarray:
    """Select rows to promote from levels[source_idx] under the quota rule.

    Target = max(0, ceil(capacity_above * K/100) - women already above),
    capped at the vacancy count and at the women available below. The women
    promoted are the top women by promotability; remaining slots go to the
    highest-promotability agents of any gender (same tie rule as merit).
    """
    source = company.levels[source_idx]
    dest = company.levels[source_idx + 1]
    capacity_above = company.capacities[source_idx + 1]

    wanted = math.ceil(capacity_above * k_quota / 100.0) - dest.n_women
    target = max(0, wanted)
    target = min(target, n_vacancies, source.n_women)

    order = _merit_order(source)
    if target == 0:
        return order[:n_vacancies]

    women_ranked = order[source.is_woman[order]]
    chosen_women = women_ranked[:target]
    chosen = np.zeros(source.size, dtype=bool)
    chosen[chosen_women] = True
    rest = order[~chosen[order]][: n_vacancies - target]
    return np.concatenate([chosen_women, rest])


class QuotaPolicy:
    """Promotion policy enforcing at least K% women at destination levels."""

    def __init__(self, k_quota: float):
        self.k_quota = k_quota

    def select(self, company: "Company", source_idx: int, n_vacancies: int) -> np.ndarray:
        return quota_promote(company, source_idx, n_vacancies, self.k_quota)
