"""ceilsim: deterministic agent-based simulation of glass-ceiling dynamics.

An eight-level company evolves through project turns and promotion cycles.
Small, empirically grounded interpersonal bias mechanisms (plus an optional
hierarchical-norms model and a quota intervention) shape who rises. The
harness replicates runs under derived random streams and aggregates
per-level statistics with confidence intervals.

>>> import ceilsim
>>> config = ceilsim.load_config("all-biases")
>>> result = ceilsim.run_simulation(config, master_seed=42, run_index=0)
>>> len(result.snapshots)
160
"""

from __future__ import annotations

__version__ = "0.1.0"

from .bias import BiasMechanism, BiasParams, r2_to_d
from .config import ConfigError, ScenarioConfig, load_config, preset_names
from .core import Agent, Company, Gender, Level
from .domain import ProjectKind
from .harness import run_replications, run_scenario, sweep, write_outputs
from .intervention import InterventionParams
from .metrics import AggregateRecord, SnapshotRecord, aggregate, snapshot
from .norms import LevelNorms, NormsParams
from .rng import RngStream, derive_stream
from .scheduler import Project, RunResult, TurnPlan, run_simulation

__all__ = [
    "__version__",
    "Agent",
    "AggregateRecord",
    "BiasMechanism",
    "BiasParams",
    "Company",
    "ConfigError",
    "Gender",
    "InterventionParams",
    "Level",
    "LevelNorms",
    "NormsParams",
    "Project",
    "ProjectKind",
    "RngStream",
    "RunResult",
    "ScenarioConfig",
    "SnapshotRecord",
    "TurnPlan",
    "aggregate",
    "derive_stream",
    "load_config",
    "preset_names",
    "r2_to_d",
    "run_replications",
    "run_scenario",
    "run_simulation",
    "snapshot",
    "sweep",
    "write_outputs",
]
