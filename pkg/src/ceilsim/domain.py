"""Shared domain enumerations (imported by both the roster and bias modules)."""

from __future__ import annotations

from enum import Enum, IntEnum


class Gender(Enum):
    MAN = "man"
    WOMAN = "woman"


class ProjectKind(Enum):
    INDIVIDUAL = "individual"
    GROUP = "group"
    STRETCH = "stretch"


class BiasMechanism(IntEnum):
    """The six interpersonal discrimination mechanisms, in counter-array order."""

    REWARD_INDIVIDUAL_SUCCESS = 0
    PENALTY_INDIVIDUAL_FAILURE = 1
    REWARD_GROUP_SUCCESS = 2
    PENALTY_GROUP_FAILURE = 3
    PENALTY_NON_ALTRUISM = 4
    PENALTY_STRETCH_PROJECT = 5

    @property
    def label(self) -> str:
        return self.name.lower()


N_MECHANISMS = len(BiasMechanism)
