"""Agent and company data model, initialization, attrition, and promotion.

Rosters are stored as parallel numpy arrays per level (the simulation loop is
hot; object-per-agent bookkeeping is an order of magnitude too slow for
full-scale replication batches). :class:`Agent` is the record view used at
API boundaries and in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Protocol

import numpy as np

from .domain import N_MECHANISMS, BiasMechanism, Gender
from .rng import RngStream

if TYPE_CHECKING:  # pragma: no cover
    from .config import ScenarioConfig

DEFAULT_CAPACITIES = (500, 350, 200, 150, 100, 75, 40, 10)
N_LEVELS = 8


def round_half_up(x: float) -> int:
    """Deterministic half-up rounding, used for every fractional head count."""
    return int(math.floor(x + 0.5))


@dataclass(slots=True)
class Agent:
    """Record view of one employee (counters only ever increase)."""

    id: int
    gender: Gender
    promotability: float
    successes: int = 0
    failures: int = 0
    bias_events: dict[BiasMechanism, int] = field(
        default_factory=lambda: {m: 0 for m in BiasMechanism}
    )


def create_agent(gender: Gender, rng: RngStream, mu_o: float, sigma_o: float) -> Agent:
    """Create an employee with promotability drawn from Normal(mu_o, sigma_o).

    The id is assigned by the :class:`Company` that hires the agent; here it
    is a placeholder (-1). sigma_o > 0 is enforced at config validation.
    """
    return Agent(id=-1, gender=gender, promotability=float(rng.normal(mu_o, sigma_o)))


class Level:
    """One hierarchy level's roster as parallel arrays."""

    __slots__ = ("ids", "is_woman", "promotability", "successes", "failures", "bias_events")

    def __init__(
        self,
        ids: np.ndarray,
        is_woman: np.ndarray,
        promotability: np.ndarray,
        successes: np.ndarray | None = None,
        failures: np.ndarray | None = None,
        bias_events: np.ndarray | None = None,
    ):
        n = len(ids)
        self.ids = np.asarray(ids, dtype=np.int64)
        self.is_woman = np.asarray(is_woman, dtype=bool)
        self.promotability = np.asarray(promotability, dtype=np.float64)
        self.successes = np.zeros(n, dtype=np.int64) if successes is None else successes
        self.failures = np.zeros(n, dtype=np.int64) if failures is None else failures
        self.bias_events = (
            np.zeros((n, N_MECHANISMS), dtype=np.int64) if bias_events is None else bias_events
        )

    @property
    def size(self) -> int:
        return len(self.ids)

    @property
    def n_women(self) -> int:
        return int(self.is_woman.sum())

    @property
    def n_men(self) -> int:
        return self.size - self.n_women

    def male_share(self) -> float:
        return self.n_men / self.size

    def take(self, rows: np.ndarray) -> "Level":
        """New Level holding copies of the given rows."""
        return Level(
            self.ids[rows].copy(),
            self.is_woman[rows].copy(),
            self.promotability[rows].copy(),
            self.successes[rows].copy(),
            self.failures[rows].copy(),
            self.bias_events[rows].copy(),
        )

    def drop(self, rows: np.ndarray) -> None:
        keep = np.ones(self.size, dtype=bool)
        keep[rows] = False
        self.ids = self.ids[keep]
        self.is_woman = self.is_woman[keep]
        self.promotability = self.promotability[keep]
        self.successes = self.successes[keep]
        self.failures = self.failures[keep]
        self.bias_events = self.bias_events[keep]

    def extend(self, other: "Level") -> None:
        self.ids = np.concatenate([self.ids, other.ids])
        self.is_woman = np.concatenate([self.is_woman, other.is_woman])
        self.promotability = np.concatenate([self.promotability, other.promotability])
        self.successes = np.concatenate([self.successes, other.successes])
        self.failures = np.concatenate([self.failures, other.failures])
        self.bias_events = np.concatenate([self.bias_events, other.bias_events])

    def agent(self, row: int) -> Agent:
        return Agent(
            id=int(self.ids[row]),
            gender=Gender.WOMAN if self.is_woman[row] else Gender.MAN,
            promotability=float(self.promotability[row]),
            successes=int(self.successes[row]),
            failures=int(self.failures[row]),
            bias_events={m: int(self.bias_events[row, m]) for m in BiasMechanism},
        )

    def to_agents(self) -> list[Agent]:
        return [self.agent(r) for r in range(self.size)]


class Company:
    """Eight ordered levels; level 1 (index 0) is entry, level 8 the top."""

    __slots__ = ("levels", "capacities", "next_id")

    def __init__(self, levels: list[Level], capacities: tuple[int, ...], next_id: int):
        self.levels = levels
        self.capacities = capacities
        self.next_id = next_id

    def roster(self, level: int) -> Level:
        """1-based accessor matching the domain's level numbering."""
        return self.levels[level - 1]

    def total_agents(self) -> int:
        return sum(lv.size for lv in self.levels)


@dataclass(slots=True)
class CycleSummary:
    """Bookkeeping from one promotion cycle (per-level, index 0 = level 1)."""

    vacancies: list[int]
    promotions: list[int]  # arrivals into each level from below
    hires: int


class PromotionPolicy(Protocol):
    def select(self, company: Company, source_idx: int, n_vacancies: int) -> np.ndarray:
        """Rows to promote from levels[source_idx] into the level above."""


def _merit_order(level: Level) -> np.ndarray:
    # Highest promotability first; ties broken by lower agent id.
    return np.lexsort((level.ids, -level.promotability))


def promote_standard(level: Level, n_vacancies_above: int) -> np.ndarray:
    """Rows of the top-n agents by promotability (ties to lower id)."""
    return _merit_order(level)[:n_vacancies_above]


class MeritPolicy:
    """Default promotion rule: highest perceived promotability moves up."""

    def select(self, company: Company, source_idx: int, n_vacancies: int) -> np.ndarray:
        return promote_standard(company.levels[source_idx], n_vacancies)


MERIT_POLICY = MeritPolicy()


def init_company(config: "ScenarioConfig", rng: RngStream) -> Company:
    """Fill every level to capacity with an exact-count gender split.

    Each level gets round(N_i * P_male) men (deterministic count, randomized
    placement); promotability is drawn per agent in roster order, so the
    batch draw equals sequential :func:`create_agent` calls on the stream.
    """
    levels: list[Level] = []
    next_id = 0
    for cap in config.capacities:
        n_men = round_half_up(cap * config.p_male)
        is_woman = np.ones(cap, dtype=bool)
        is_woman[:n_men] = False
        is_woman = is_woman[rng.permutation(cap)]
        promotability = rng.normal(config.mu_o, config.sigma_o, size=cap)
        ids = np.arange(next_id, next_id + cap, dtype=np.int64)
        next_id += cap
        levels.append(Level(ids, is_woman, promotability))
    return Company(levels, tuple(config.capacities), next_id)


def apply_attrition(company: Company, p_leave: float, rng: RngStream) -> list[int]:
    """Remove round(N_i * P_leave) uniformly chosen agents at each level.

    Selection is independent of gender and promotability. Levels are
    processed in order 1..8 (fixed stream-consumption order). Returns the
    per-level vacancy counts.
    """
    vacancies = []
    for level in company.levels:
        k = round_half_up(level.size * p_leave)
        if k > 0:
            gone = rng.permutation(level.size)[:k]
            level.drop(gone)
        vacancies.append(k)
    return vacancies


def run_promotion_cycle(
    company: Company,
    policy: PromotionPolicy,
    config: "ScenarioConfig",
    rng: RngStream,
) -> CycleSummary:
    """One attrition-then-promotion event; all rosters end at capacity.

    Fill order is strictly top-down (level 8 from 7, then 7 from 6, ...) so
    slots opened by promotion cascade into the source level's vacancy count.
    Level-1 vacancies are filled by new hires who are equally likely to be
    men or women; p_male shapes only the company's starting composition.
    """
    vacancies = apply_attrition(company, config.p_leave, rng)
    promotions = [0] * len(company.levels)

    for dest in range(len(company.levels) - 1, 0, -1):
        need = company.capacities[dest] - company.levels[dest].size
        src = dest - 1
        need = min(need, company.levels[src].size)
        if need <= 0:
            continue
        rows = policy.select(company, src, need)
        moved = company.levels[src].take(rows)
        company.levels[src].drop(rows)
        company.levels[dest].extend(moved)
        promotions[dest] = need

    n_hires = company.capacities[0] - company.levels[0].size
    if n_hires > 0:
        is_woman = rng.random(n_hires) >= 0.5
        promotability = rng.normal(config.mu_o, config.sigma_o, size=n_hires)
        ids = np.arange(company.next_id, company.next_id + n_hires, dtype=np.int64)
        company.next_id += n_hires
        company.levels[0].extend(Level(ids, is_woman, promotability))

    return CycleSummary(vacancies=vacancies, promotions=promotions, hires=n_hires)
