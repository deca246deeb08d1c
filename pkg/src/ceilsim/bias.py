"""Effect-size calibration and the six interpersonal discrimination mechanisms.

The bias strength is configured as the share of variance in project credit
explained by gender (a quantity measurable in field studies) and converted to
a raw credit gap ``d`` via the point-biserial relation. With credit noise
sigma = 1, ``d`` equals the mean credit difference between men and women on
the same project outcome. A negative variance share flips the roles
(reverse discrimination: the man carries the gap).

Functions here are pure; the scheduler owns all mutation and random draws
except for :func:`maybe_complain`, which consumes one uniform per call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import N_MECHANISMS, BiasMechanism, Gender, ProjectKind
from .rng import RngStream

__all__ = [
    "BiasMechanism",
    "N_MECHANISMS",
    "BiasParams",
    "CalibrationError",
    "r2_to_d",
    "effective_d",
    "apply_project_outcome",
    "MemberOutcome",
    "maybe_complain",
    "stretch_qualify",
]

# Outcome scopes: a mechanism pair can be restricted to successes only or
# failures only (used by the single-mechanism experiment conditions).
SCOPE_BOTH = "both"
SCOPE_SUCCESS = "success"
SCOPE_FAILURE = "failure"
VALID_SCOPES = (SCOPE_BOTH, SCOPE_SUCCESS, SCOPE_FAILURE)


class CalibrationError(ValueError):
    """Raised when a variance-explained value cannot be converted to d."""


@dataclass(frozen=True)
class BiasParams:
    """Interpersonal-bias parameters (constant-strength regime).

    r2 / r2_group are signed variance-explained values in (-1, 1) for
    individual (incl. stretch) and mixed-gender group projects. p_com is the
    per-event complaint probability, f_dis the multiplicative promotability
    discount on complaint, p_female the stretch-qualification surcharge.
    """

    r2: float = 0.0
    r2_group: float = 0.0
    p_com: float = 0.0
    f_dis: float = 1.0
    p_female: float = 0.0
    individual_scope: str = SCOPE_BOTH
    group_scope: str = SCOPE_BOTH


def r2_to_d(r2: float) -> float:
    """Convert signed variance-explained to the mean credit gap d.

    d = sign(r2) * 2*sqrt(|r2|) / sqrt(1 - |r2|); with credit sigma = 1 this
    is the gap mu_male - mu_female (negative d encodes the reverse gap).
    """
    if abs(r2) >= 1:
        raise CalibrationError(f"|r2| must be < 1 to yield a finite d, got {r2}")
    if r2 == 0:
        return 0.0
    mag = 2.0 * math.sqrt(abs(r2)) / math.sqrt(1.0 - abs(r2))
    return math.copysign(mag, r2)


def effective_d(d: float, success: bool, scope: str) -> float:
    """Gate the credit gap by the configured outcome scope."""
    if scope == SCOPE_BOTH:
        return d
    if scope == SCOPE_SUCCESS:
        return d if success else 0.0
    return 0.0 if success else d


@dataclass(frozen=True, slots=True)
class MemberOutcome:
    delta: float
    bias_event: BiasMechanism | None


def apply_project_outcome(
    genders: tuple[Gender, ...],
    kind: ProjectKind,
    success: bool,
    credit: float,
    d: float,
    d_group: float,
) -> tuple[MemberOutcome, ...]:
    """Per-member promotability deltas and bias events for one resolved project.

    ``d`` and ``d_group`` are the already scope-gated gaps for the members'
    level. The advantaged party gains/loses exactly +-credit; the
    disadvantaged one (woman when the gap is positive, man when negative)
    receives credit - |gap| on success and loses credit + |gap| on failure,
    and their counter for the matching mechanism increments. Same-gender
    pairs are never biased.
    """
    base = credit if success else -credit
    if kind is ProjectKind.GROUP:
        if genders[0] == genders[1]:
            gap = 0.0
        else:
            gap = d_group
        mechanism = (
            BiasMechanism.REWARD_GROUP_SUCCESS if success else BiasMechanism.PENALTY_GROUP_FAILURE
        )
    else:
        gap = d
        mechanism = (
            BiasMechanism.REWARD_INDIVIDUAL_SUCCESS
            if success
            else BiasMechanism.PENALTY_INDIVIDUAL_FAILURE
        )

    if gap == 0.0:
        return tuple(MemberOutcome(base, None) for _ in genders)

    target = Gender.WOMAN if gap > 0 else Gender.MAN
    mag = abs(gap)
    hit = (credit - mag) if success else -(credit + mag)
    return tuple(
        MemberOutcome(hit, mechanism) if g is target else MemberOutcome(base, None)
        for g in genders
    )


def maybe_complain(
    promotability: float, p_com: float, f_dis: float, rng: RngStream
) -> tuple[float, bool]:
    """Complaint check after a successful mixed-gender project that shorted a woman.

    With probability p_com the woman complains about the unfair credit split:
    her promotability x becomes f_dis * x and her non-altruism counter should
    increment (caller's job). Consumes exactly one uniform per call.
    """
    if rng.random() < p_com:
        return promotability * f_dis, True
    return promotability, False


def stretch_qualify(
    is_woman: np.ndarray, successes: np.ndarray, p_female: float
) -> tuple[np.ndarray, float]:
    """Qualification mask over the prequalified set, plus the male average.

    n_avg is the mean success count of prequalified men (0 if none). Men are
    always qualified; a woman qualifies iff successes >= n_avg*(1+p_female).
    With p_female == 0 the gate is inert and everyone qualifies: the default
    model promises men and women equal stretch access, and an active gate at
    p_female = 0 would still exclude below-average women.
    """
    is_woman = np.asarray(is_woman, dtype=bool)
    successes = np.asarray(successes)
    if p_female == 0:
        return np.ones(len(is_woman), dtype=bool), 0.0
    men = ~is_woman
    n_avg = float(successes[men].mean()) if men.any() else 0.0
    threshold = n_avg * (1.0 + p_female)
    qualified = men | (successes >= threshold)
    return qualified, n_avg
