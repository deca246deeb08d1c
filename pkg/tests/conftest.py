import numpy as np
import pytest

from ceilsim.config import ScenarioConfig, config_from_dotted, validate_config
from ceilsim.core import Company, Level


SMALL_CAPACITIES = (40, 28, 16, 12, 8, 6, 4, 2)


def small_config(**overrides) -> ScenarioConfig:
    """Desk-scale config for fast structural tests (same shape, tiny rosters)."""
    base = {
        "capacities": list(SMALL_CAPACITIES),
        "n_sim": 96,
        "n_promotion": 12,
        "n_stretch": 6,
    }
    base.update(overrides)
    return validate_config(config_from_dotted(base))


def make_level(ids, is_woman, promotability, successes=None, failures=None) -> Level:
    level = Level(
        np.asarray(ids, dtype=np.int64),
        np.asarray(is_woman, dtype=bool),
        np.asarray(promotability, dtype=np.float64),
    )
    if successes is not None:
        level.successes = np.asarray(successes, dtype=np.int64)
    if failures is not None:
        level.failures = np.asarray(failures, dtype=np.int64)
    return level


def make_company(levels: list[Level]) -> Company:
    next_id = max((int(lv.ids.max()) for lv in levels if lv.size), default=-1) + 1
    return Company(levels, tuple(lv.size for lv in levels), next_id)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
