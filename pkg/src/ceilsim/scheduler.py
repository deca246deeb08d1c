"""Per-turn simulation loop: project assignment, resolution, and cycle triggers.

Random draws follow a fixed discipline so that trajectories depend only on
(config, master_seed, run_index): levels consume the single run stream in
order 1..8; within a level-turn the order is assignment permutation, credit
draws (stretch, individual, group), outcome draws (one block, same kind
order), then complaint draws for qualifying group projects in pair order.

Two resolution engines share every draw and differ only in how deltas are
applied: the default vectorized path, and a reference path that applies the
per-project functions from :mod:`ceilsim.bias` one project at a time. Both
produce bit-identical trajectories (asserted in tests), which pins the
vectorized arithmetic to the documented per-project contracts.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

from .bias import (
    BiasMechanism,
    BiasParams,
    apply_project_outcome,
    effective_d,
    maybe_complain,
    r2_to_d,
    stretch_qualify,
)
from .core import (
    MERIT_POLICY,
    Company,
    Gender,
    Level,
    init_company,
    round_half_up,
    run_promotion_cycle,
)
from .domain import ProjectKind
from .intervention import QuotaPolicy, current_w, intervention_active
from .metrics import SnapshotRecord, snapshot
from .norms import LevelNorms, compute_level_norms, constant_level_norms
from .rng import RngStream, derive_stream

if TYPE_CHECKING:  # pragma: no cover
    from .config import ScenarioConfig

__all__ = [
    "ProjectKind",
    "Project",
    "TurnKind",
    "TurnPlan",
    "TurnAssignment",
    "InvariantError",
    "RunResult",
    "plan_turn",
    "assign_projects",
    "resolve_project",
    "run_simulation",
]


class InvariantError(AssertionError):
    """A structural invariant of the simulation was violated."""


class TurnKind(Enum):
    TRADITIONAL = "traditional"
    STRETCH = "stretch"


@dataclass(frozen=True, slots=True)
class TurnPlan:
    turn_index: int
    kind: TurnKind
    is_promotion_boundary: bool


def plan_turn(turn_index: int, n_stretch: int, n_promotion: int) -> TurnPlan:
    """Classify a 1-based turn: stretch every n_stretch, cycle every n_promotion."""
    return TurnPlan(
        turn_index=turn_index,
        kind=TurnKind.STRETCH if turn_index % n_stretch == 0 else TurnKind.TRADITIONAL,
        is_promotion_boundary=turn_index % n_promotion == 0,
    )


@dataclass(slots=True)
class Project:
    kind: ProjectKind
    credit: float
    members: tuple[int, ...]  # agent ids; 1 member, or 2 for group
    success: bool | None = None


@dataclass(slots=True)
class TurnAssignment:
    """One level's project plan for one turn (rows index into the level)."""

    stretch_rows: np.ndarray
    single_rows: np.ndarray
    pair_rows: np.ndarray  # shape (m, 2)
    stretch_credits: np.ndarray
    single_credits: np.ndarray
    pair_credits: np.ndarray
    excluded_rows: np.ndarray  # prequalified women excluded from stretch

    @property
    def n_projects(self) -> int:
        return len(self.stretch_rows) + len(self.single_rows) + len(self.pair_rows)

    def projects(self, level: Level) -> list[Project]:
        """Expand to Project records (test/debug view of the plan)."""
        out = [
            Project(ProjectKind.STRETCH, float(c), (int(level.ids[r]),))
            for r, c in zip(self.stretch_rows, self.stretch_credits)
        ]
        out += [
            Project(ProjectKind.INDIVIDUAL, float(c), (int(level.ids[r]),))
            for r, c in zip(self.single_rows, self.single_credits)
        ]
        out += [
            Project(
                ProjectKind.GROUP,
                float(c),
                (int(level.ids[p[0]]), int(level.ids[p[1]])),
            )
            for p, c in zip(self.pair_rows, self.pair_credits)
        ]
        return out


def _draw_credits(rng: RngStream, mu: float, sigma: float, n: int) -> np.ndarray:
    """Credit draws are positive by contract; non-positive draws are redrawn."""
    credits = rng.normal(mu, sigma, size=n)
    while True:
        bad = credits <= 0
        if not bad.any():
            return credits
        credits[bad] = rng.normal(mu, sigma, size=int(bad.sum()))


_EMPTY_ROWS = np.empty(0, dtype=np.int64)
_EMPTY_PAIRS = np.empty((0, 2), dtype=np.int64)
_EMPTY_F = np.empty(0, dtype=np.float64)


def assign_projects(
    level: Level,
    turn: TurnPlan,
    config: "ScenarioConfig",
    rng: RngStream,
) -> TurnAssignment:
    """Give every agent at a level exactly one project for this turn.

    Traditional turn: a uniformly random P_individual fraction gets
    individual projects; the rest pair up uniformly (an odd leftover gets an
    individual project). Stretch turn: the top P_stretch fraction by
    promotability is prequalified, women are filtered by the qualification
    test, excluded women are replaced by the next-ranked qualified agents,
    and the remaining agents split (1-P_stretch)*P_individual / rest.
    """
    n = level.size
    params = config.bias

    stretch_rows = _EMPTY_ROWS
    excluded_rows = _EMPTY_ROWS
    if turn.kind is TurnKind.STRETCH:
        k = round_half_up(config.p_stretch * n)
        if k > 0:
            order = np.lexsort((level.ids, -level.promotability))
            prequalified = order[:k]
            if params.p_female > 0:
                qualified, n_avg = stretch_qualify(
                    level.is_woman[prequalified], level.successes[prequalified], params.p_female
                )
                excluded_rows = prequalified[~qualified]
                level.bias_events[excluded_rows, BiasMechanism.PENALTY_STRETCH_PROJECT] += 1
                threshold = n_avg * (1.0 + params.p_female)
                selected = list(prequalified[qualified])
                # Replacements keep the stretch supply constant: scan down the
                # ranking, re-applying the test (no counter for women who were
                # never prequalified).
                for cand in order[k:]:
                    if len(selected) == k:
                        break
                    if not level.is_woman[cand] or level.successes[cand] >= threshold:
                        selected.append(cand)
                stretch_rows = np.array(selected, dtype=np.int64)
            else:
                stretch_rows = prequalified

    if len(stretch_rows):
        in_stretch = np.zeros(n, dtype=bool)
        in_stretch[stretch_rows] = True
        rest = np.flatnonzero(~in_stretch)
    else:
        rest = np.arange(n, dtype=np.int64)

    shuffled = rest[rng.permutation(len(rest))]
    if turn.kind is TurnKind.STRETCH:
        n_single = round_half_up((1.0 - config.p_stretch) * config.p_individual * n)
    else:
        n_single = round_half_up(config.p_individual * n)
    n_single = min(n_single, len(shuffled))

    single_rows = shuffled[:n_single]
    remainder = shuffled[n_single:]
    if len(remainder) % 2:
        single_rows = np.concatenate([single_rows, remainder[-1:]])
        remainder = remainder[:-1]
    pair_rows = remainder.reshape(-1, 2) if len(remainder) else _EMPTY_PAIRS

    stretch_credits = (
        _draw_credits(rng, config.mu_st, config.sigma_st, len(stretch_rows))
        if len(stretch_rows)
        else _EMPTY_F
    )
    single_credits = (
        _draw_credits(rng, config.mu_r, config.sigma_r, len(single_rows))
        if len(single_rows)
        else _EMPTY_F
    )
    pair_credits = (
        _draw_credits(rng, config.mu_r, config.sigma_r, len(pair_rows))
        if len(pair_rows)
        else _EMPTY_F
    )

    return TurnAssignment(
        stretch_rows=stretch_rows,
        single_rows=single_rows,
        pair_rows=pair_rows,
        stretch_credits=stretch_credits,
        single_credits=single_credits,
        pair_credits=pair_credits,
        excluded_rows=excluded_rows,
    )


@dataclass(frozen=True, slots=True)
class _LevelGaps:
    """Scope-gated credit gaps for one level, by project shape and outcome."""

    ind_success: float
    ind_failure: float
    grp_success: float
    grp_failure: float


def _level_gaps(norms_value: float, group_value: float, params: BiasParams) -> _LevelGaps:
    d = r2_to_d(norms_value)
    dg = r2_to_d(group_value)
    return _LevelGaps(
        ind_success=effective_d(d, True, params.individual_scope),
        ind_failure=effective_d(d, False, params.individual_scope),
        grp_success=effective_d(dg, True, params.group_scope),
        grp_failure=effective_d(dg, False, params.group_scope),
    )


def _apply_singles_vectorized(
    level: Level, rows: np.ndarray, credits: np.ndarray, success: np.ndarray, gaps: _LevelGaps
) -> None:
    base = np.where(success, credits, -credits)
    if gaps.ind_success != 0.0 or gaps.ind_failure != 0.0:
        gap = np.where(success, gaps.ind_success, gaps.ind_failure)
        hit = (level.is_woman[rows] == (gap > 0)) & (gap != 0)
        mag = np.abs(gap)
        adjusted = np.where(success, credits - mag, -(credits + mag))
        delta = np.where(hit, adjusted, base)
        mech = np.where(
            success,
            int(BiasMechanism.REWARD_INDIVIDUAL_SUCCESS),
            int(BiasMechanism.PENALTY_INDIVIDUAL_FAILURE),
        )
        level.bias_events[rows[hit], mech[hit]] += 1
    else:
        delta = base
    level.promotability[rows] += delta
    level.successes[rows[success]] += 1
    level.failures[rows[~success]] += 1


def _apply_pairs_vectorized(
    level: Level,
    pairs: np.ndarray,
    credits: np.ndarray,
    success: np.ndarray,
    gaps: _LevelGaps,
    p_com: float,
    f_dis: float,
    rng: RngStream,
) -> None:
    base = np.where(success, credits, -credits)
    biased = gaps.grp_success != 0.0 or gaps.grp_failure != 0.0
    col0, col1 = pairs[:, 0], pairs[:, 1]

    if biased:
        g0 = level.is_woman[col0]
        g1 = level.is_woman[col1]
        mixed = g0 != g1
        gap = np.where(success, gaps.grp_success, gaps.grp_failure)
        eventful = mixed & (gap != 0)
        deltas0 = base.copy()
        deltas1 = base.copy()
        if eventful.any():
            mag = np.abs(gap)
            adjusted = np.where(success, credits - mag, -(credits + mag))
            # Disadvantaged member: the woman when gap > 0, the man when < 0.
            hit_col0 = np.where(gap > 0, g0, ~g0)
            ev0 = eventful & hit_col0
            ev1 = eventful & ~hit_col0
            deltas0[ev0] = adjusted[ev0]
            deltas1[ev1] = adjusted[ev1]
            hit_rows = np.where(hit_col0, col0, col1)
            mech = np.where(
                success,
                int(BiasMechanism.REWARD_GROUP_SUCCESS),
                int(BiasMechanism.PENALTY_GROUP_FAILURE),
            )
            level.bias_events[hit_rows[eventful], mech[eventful]] += 1
        level.promotability[col0] += deltas0
        level.promotability[col1] += deltas1
    else:
        level.promotability[col0] += base
        level.promotability[col1] += base

    level.successes[col0[success]] += 1
    level.successes[col1[success]] += 1
    level.failures[col0[~success]] += 1
    level.failures[col1[~success]] += 1

    # Complaint phase: only successful mixed projects in which the woman got
    # less credit than her teammate qualify; one uniform per qualifying event,
    # drawn only when complaints are possible at all (p_com > 0).
    if p_com > 0 and gaps.grp_success > 0:
        qualifying = mixed & success
        if qualifying.any():
            woman_rows = np.where(g0, col0, col1)[qualifying]
            fired = rng.random(len(woman_rows)) < p_com
            level.promotability[woman_rows[fired]] *= f_dis
            level.bias_events[woman_rows[fired], BiasMechanism.PENALTY_NON_ALTRUISM] += 1


def _apply_reference(
    level: Level,
    assignment: TurnAssignment,
    outcomes: np.ndarray,
    gaps: _LevelGaps,
    params: BiasParams,
    rng: RngStream,
) -> None:
    """Apply deltas one project at a time through the per-project contracts."""
    n_st = len(assignment.stretch_rows)
    n_si = len(assignment.single_rows)
    singles = [
        (r, c, ProjectKind.STRETCH if i < n_st else ProjectKind.INDIVIDUAL, bool(outcomes[i]))
        for i, (r, c) in enumerate(
            zip(
                np.concatenate([assignment.stretch_rows, assignment.single_rows]),
                np.concatenate([assignment.stretch_credits, assignment.single_credits]),
            )
        )
    ]
    for row, credit, kind, success in singles:
        gender = Gender.WOMAN if level.is_woman[row] else Gender.MAN
        d = gaps.ind_success if success else gaps.ind_failure
        (outcome,) = apply_project_outcome((gender,), kind, success, float(credit), d, 0.0)
        level.promotability[row] += outcome.delta
        if outcome.bias_event is not None:
            level.bias_events[row, outcome.bias_event] += 1
        if success:
            level.successes[row] += 1
        else:
            level.failures[row] += 1

    pair_success = outcomes[n_st + n_si :]
    complaints = []
    for j, (pair, credit) in enumerate(zip(assignment.pair_rows, assignment.pair_credits)):
        success = bool(pair_success[j])
        genders = tuple(
            Gender.WOMAN if level.is_woman[r] else Gender.MAN for r in pair
        )
        dg = gaps.grp_success if success else gaps.grp_failure
        member_outcomes = apply_project_outcome(
            genders, ProjectKind.GROUP, success, float(credit), 0.0, dg
        )
        for row, out in zip(pair, member_outcomes):
            level.promotability[row] += out.delta
            if out.bias_event is not None:
                level.bias_events[row, out.bias_event] += 1
            if success:
                level.successes[row] += 1
            else:
                level.failures[row] += 1
        if params.p_com > 0 and success and genders[0] != genders[1] and dg > 0:
            complaints.append(pair[0] if genders[0] is Gender.WOMAN else pair[1])

    for row in complaints:
        new_value, complained = maybe_complain(
            float(level.promotability[row]), params.p_com, params.f_dis, rng
        )
        if complained:
            level.promotability[row] = new_value
            level.bias_events[row, BiasMechanism.PENALTY_NON_ALTRUISM] += 1


def resolve_project(
    level: Level,
    project: Project,
    level_number: int,
    level_norms: LevelNorms,
    params: BiasParams,
    p_s: float,
    rng: RngStream,
) -> Project:
    """Resolve a single project standalone: outcome draw, credit, counters.

    Both group members share one outcome draw. The engine resolves whole
    levels in phases instead of calling this per project, but the observable
    behavior matches (asserted by the engine-equivalence tests).
    """
    rows = [int(np.flatnonzero(level.ids == m)[0]) for m in project.members]
    success = bool(rng.random() < p_s)
    gaps = _level_gaps(
        level_norms.r2[level_number - 1], level_norms.r2_group[level_number - 1], params
    )
    genders = tuple(Gender.WOMAN if level.is_woman[r] else Gender.MAN for r in rows)
    d = gaps.ind_success if success else gaps.ind_failure
    dg = gaps.grp_success if success else gaps.grp_failure
    outcomes = apply_project_outcome(genders, project.kind, success, project.credit, d, dg)
    for row, out in zip(rows, outcomes):
        level.promotability[row] += out.delta
        if out.bias_event is not None:
            level.bias_events[row, out.bias_event] += 1
        if success:
            level.successes[row] += 1
        else:
            level.failures[row] += 1
    if (
        project.kind is ProjectKind.GROUP
        and params.p_com > 0
        and success
        and genders[0] != genders[1]
        and dg > 0
    ):
        woman_row = rows[0] if genders[0] is Gender.WOMAN else rows[1]
        new_value, complained = maybe_complain(
            float(level.promotability[woman_row]), params.p_com, params.f_dis, rng
        )
        if complained:
            level.promotability[woman_row] = new_value
            level.bias_events[woman_row, BiasMechanism.PENALTY_NON_ALTRUISM] += 1
    return replace(project, success=success)


@dataclass(slots=True)
class RunResult:
    snapshots: list[SnapshotRecord]
    company: Company


def _check_assignment(assignment: TurnAssignment, n: int) -> None:
    rows = np.concatenate(
        [assignment.stretch_rows, assignment.single_rows, assignment.pair_rows.ravel()]
    )
    if len(rows) != n or len(np.unique(rows)) != n:
        raise InvariantError("project assignment is not an exact cover of the level")


class _CheckedMerit:
    """Merit policy wrapper asserting the promoted set dominates the retained."""

    def select(self, company: Company, source_idx: int, n_vacancies: int) -> np.ndarray:
        level = company.levels[source_idx]
        rows = MERIT_POLICY.select(company, source_idx, n_vacancies)
        if 0 < len(rows) < level.size:
            chosen = np.zeros(level.size, dtype=bool)
            chosen[rows] = True
            keys = list(zip(-level.promotability, level.ids))
            worst_promoted = max(keys[r] for r in np.flatnonzero(chosen))
            best_retained = min(keys[r] for r in np.flatnonzero(~chosen))
            if worst_promoted > best_retained:
                raise InvariantError("merit ordering violated at promotion")
        return rows


def run_simulation(
    config: "ScenarioConfig",
    master_seed: int,
    run_index: int,
    *,
    engine: str = "vectorized",
    check_invariants: bool = False,
    _flip_genders: bool = False,
) -> RunResult:
    """Execute one full run and return its per-cycle per-level snapshots.

    ``engine`` selects the vectorized or per-project reference resolution
    path (identical trajectories). ``check_invariants`` enables structural
    assertions (exact project cover, roster conservation, merit ordering).
    ``_flip_genders`` is a test seam for the zero-bias symmetry property: it
    relabels every gender at creation, which must not affect dynamics when
    all bias mechanisms are off.
    """
    if engine not in ("vectorized", "reference"):
        raise ValueError(f"unknown engine {engine!r}")
    rng = derive_stream(master_seed, run_index)
    company = init_company(config, rng)
    if _flip_genders:
        for level in company.levels:
            level.is_woman = ~level.is_woman

    snapshots: list[SnapshotRecord] = []
    cycle = 0
    params = config.bias
    n_levels = len(company.levels)

    for turn_index in range(1, config.n_sim + 1):
        turn = plan_turn(turn_index, config.n_stretch, config.n_promotion)
        w_now = current_w(turn_index, config.intervention, config.norms.w0, config.norms.w)
        if config.norms.enabled:
            norms = compute_level_norms(company, config.norms, w_now)
        else:
            norms = constant_level_norms(params.r2, params.r2_group, n_levels)

        for idx in range(n_levels):
            level = company.levels[idx]
            assignment = assign_projects(level, turn, config, rng)
            if check_invariants:
                _check_assignment(assignment, level.size)
            outcomes = rng.random(assignment.n_projects) < config.p_s
            gaps = _level_gaps(norms.r2[idx], norms.r2_group[idx], params)
            if engine == "vectorized":
                n_singles = len(assignment.stretch_rows) + len(assignment.single_rows)
                if n_singles:
                    _apply_singles_vectorized(
                        level,
                        np.concatenate([assignment.stretch_rows, assignment.single_rows]),
                        np.concatenate([assignment.stretch_credits, assignment.single_credits]),
                        outcomes[:n_singles],
                        gaps,
                    )
                if len(assignment.pair_rows):
                    _apply_pairs_vectorized(
                        level,
                        assignment.pair_rows,
                        assignment.pair_credits,
                        outcomes[n_singles:],
                        gaps,
                        params.p_com,
                        params.f_dis,
                        rng,
                    )
            else:
                _apply_reference(level, assignment, outcomes, gaps, params, rng)

        if turn.is_promotion_boundary:
            if intervention_active(turn_index, config.intervention):
                policy = QuotaPolicy(config.intervention.k)
            elif check_invariants:
                policy = _CheckedMerit()
            else:
                policy = MERIT_POLICY
            summary = run_promotion_cycle(company, policy, config, rng)
            if _flip_genders and summary.hires:
                company.levels[0].is_woman[-summary.hires :] = ~company.levels[0].is_woman[
                    -summary.hires :
                ]
            if check_invariants:
                for lv, cap in zip(company.levels, company.capacities):
                    if lv.size != cap:
                        raise InvariantError(
                            f"roster size {lv.size} != capacity {cap} after cycle"
                        )
            cycle += 1
            snapshots.extend(snapshot(company, cycle, run_index))

    if check_invariants:
        expected = (config.n_sim // config.n_promotion) * n_levels
        if len(snapshots) != expected:
            raise InvariantError(f"snapshot count {len(snapshots)} != expected {expected}")

    return RunResult(snapshots=snapshots, company=company)
