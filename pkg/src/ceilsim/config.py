"""Scenario configuration: defaults, named presets, validation, serialization.

Config files are flat JSON with dotted keys mirroring the model's parameter
names ("bias.r2", "norms.w", "intervention.i_range", ...). Presets ship
in-package so every experiment runs with zero external files; the resolved
config is echoed into each output directory for provenance.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from .bias import VALID_SCOPES, BiasParams
from .core import DEFAULT_CAPACITIES, N_LEVELS
from .intervention import InterventionParams
from .norms import NormsParams

__all__ = [
    "ConfigError",
    "RunParams",
    "ScenarioConfig",
    "PRESETS",
    "preset_names",
    "load_config",
    "config_to_dotted",
    "config_from_dotted",
    "set_dotted",
    "validate_config",
]


class ConfigError(ValueError):
    """A configuration value or key failed validation."""


@dataclass(frozen=True)
class RunParams:
    """Replication controls (overridable from the command line)."""

    n_runs: int = 100
    master_seed: int = 0
    out_dir: str = "out"


@dataclass(frozen=True)
class ScenarioConfig:
    scenario_id: str = "custom"
    n_sim: int = 480
    p_male: float = 0.5
    capacities: tuple[int, ...] = DEFAULT_CAPACITIES
    n_promotion: int = 24
    p_leave: float = 0.15
    p_s: float = 0.5
    mu_o: float = 50.0
    sigma_o: float = 1.0
    mu_r: float = 10.0
    sigma_r: float = 1.0
    mu_st: float = 30.0
    sigma_st: float = 1.0
    p_individual: float = 0.5
    p_stretch: float = 0.1
    n_stretch: int = 12
    bias: BiasParams = field(default_factory=BiasParams)
    norms: NormsParams = field(default_factory=NormsParams)
    intervention: InterventionParams = field(default_factory=InterventionParams)
    run: RunParams = field(default_factory=RunParams)


# Dotted key -> (section attr or None, field name). Kept explicit so unknown
# keys fail loudly and the serialized form stays stable.
_GROUPS = {"bias": BiasParams, "norms": NormsParams, "intervention": InterventionParams,
           "run": RunParams}

_TOP_FIELDS = {
    f.name for f in dataclasses.fields(ScenarioConfig)
    if f.name not in _GROUPS
}


def _known_keys() -> set[str]:
    keys = set(_TOP_FIELDS)
    for prefix, cls in _GROUPS.items():
        for f in dataclasses.fields(cls):
            keys.add(f"{prefix}.{f.name}")
    keys.discard("intervention.i_start")
    keys.discard("intervention.i_end")
    keys.add("intervention.i_range")
    return keys


KNOWN_KEYS = _known_keys()


def config_to_dotted(config: ScenarioConfig) -> dict[str, Any]:
    """Flatten a config to the dotted-key JSON form (stable key order)."""
    out: dict[str, Any] = {}
    for name in sorted(_TOP_FIELDS):
        value = getattr(config, name)
        out[name] = list(value) if isinstance(value, tuple) else value
    for prefix, _ in sorted(_GROUPS.items()):
        section = getattr(config, prefix)
        for f in dataclasses.fields(section):
            out[f"{prefix}.{f.name}"] = getattr(section, f.name)
    out["intervention.i_range"] = [config.intervention.i_start, config.intervention.i_end]
    del out["intervention.i_start"]
    del out["intervention.i_end"]
    return {k: out[k] for k in sorted(out)}


def set_dotted(config: ScenarioConfig, key: str, value: Any) -> ScenarioConfig:
    """Return a new config with one dotted key replaced."""
    if key not in KNOWN_KEYS:
        raise ConfigError(f"unknown configuration key {key!r}")
    if key == "intervention.i_range":
        try:
            start, end = value
        except (TypeError, ValueError):
            raise ConfigError(f"intervention.i_range must be a [start, end] pair, got {value!r}")
        iv = replace(config.intervention, i_start=int(start), i_end=int(end))
        return replace(config, intervention=iv)
    if "." in key:
        prefix, name = key.split(".", 1)
        section = getattr(config, prefix)
        return replace(config, **{prefix: replace(section, **{name: value})})
    if key == "capacities":
        value = tuple(int(v) for v in value)
    return replace(config, **{key: value})


def config_from_dotted(overrides: dict[str, Any], base: ScenarioConfig | None = None,
                       ) -> ScenarioConfig:
    config = base if base is not None else ScenarioConfig()
    for key in sorted(overrides):
        config = set_dotted(config, key, overrides[key])
    return config


def _require(ok: bool, message: str) -> None:
    if not ok:
        raise ConfigError(message)


def validate_config(config: ScenarioConfig) -> ScenarioConfig:
    """Full cross-field validation; raises ConfigError naming the field."""
    _require(config.n_sim >= 0, f"n_sim must be >= 0, got {config.n_sim}")
    _require(config.n_promotion >= 1, f"n_promotion must be >= 1, got {config.n_promotion}")
    _require(config.n_stretch >= 1, f"n_stretch must be >= 1, got {config.n_stretch}")
    if config.n_sim > 0:
        _require(config.n_promotion <= config.n_sim,
                 f"n_promotion ({config.n_promotion}) must not exceed n_sim ({config.n_sim})")
    for name in ("p_male", "p_leave", "p_s", "p_individual", "p_stretch"):
        value = getattr(config, name)
        _require(0.0 <= value <= 1.0, f"{name} must lie in [0, 1], got {value}")
    for name in ("sigma_o", "sigma_r", "sigma_st"):
        value = getattr(config, name)
        _require(value > 0, f"{name} must be > 0, got {value}")
    _require(len(config.capacities) == N_LEVELS,
             f"capacities must list {N_LEVELS} levels, got {len(config.capacities)}")
    _require(all(c > 0 for c in config.capacities),
             f"capacities must be strictly positive, got {config.capacities}")

    b = config.bias
    _require(abs(b.r2) < 1, f"bias.r2 must satisfy |r2| < 1, got {b.r2}")
    _require(abs(b.r2_group) < 1, f"bias.r2_group must satisfy |r2| < 1, got {b.r2_group}")
    _require(0.0 <= b.p_com <= 1.0, f"bias.p_com must lie in [0, 1], got {b.p_com}")
    _require(0.0 < b.f_dis <= 1.0, f"bias.f_dis must lie in (0, 1], got {b.f_dis}")
    _require(b.p_female >= 0.0, f"bias.p_female must be >= 0, got {b.p_female}")
    _require(b.individual_scope in VALID_SCOPES,
             f"bias.individual_scope must be one of {VALID_SCOPES}, got {b.individual_scope!r}")
    _require(b.group_scope in VALID_SCOPES,
             f"bias.group_scope must be one of {VALID_SCOPES}, got {b.group_scope!r}")

    n = config.norms
    _require(0.5 < n.p_m <= 1.0, f"norms.p_m must lie in (0.5, 1], got {n.p_m}")
    _require(0.0 <= n.w <= 1.0, f"norms.w must lie in [0, 1], got {n.w}")
    _require(0.0 <= n.w0 <= 1.0, f"norms.w0 must lie in [0, 1], got {n.w0}")
    _require(abs(n.b_macro) < 1, f"norms.b_macro must satisfy |value| < 1, got {n.b_macro}")
    _require(abs(n.b_macro_group) < 1,
             f"norms.b_macro_group must satisfy |value| < 1, got {n.b_macro_group}")

    iv = config.intervention
    _require(0.0 <= iv.k <= 100.0, f"intervention.k must lie in [0, 100], got {iv.k}")
    _require(iv.i_start <= iv.i_end,
             f"intervention.i_range start ({iv.i_start}) must be <= end ({iv.i_end})")
    _require(iv.i_start >= 0, f"intervention.i_range start must be >= 0, got {iv.i_start}")
    _require(iv.i_end <= config.n_sim,
             f"intervention.i_range end ({iv.i_end}) must be <= n_sim ({config.n_sim})")

    r = config.run
    _require(r.n_runs >= 1, f"run.n_runs must be >= 1, got {r.n_runs}")
    return config


# --- Preset catalog -------------------------------------------------------
#
# Named experiment conditions. The single-mechanism rows switch one mechanism
# on; the norms rows put the hierarchy under the meso/macro model in an
# 80%-women company; the intervention grid crosses quota windows with
# post-intervention meso weights.

_INTERVENTION_WINDOWS = {"3cycles": (168, 240), "6cycles": (168, 312), "9cycles": (168, 384)}
_INTERVENTION_WEIGHTS = {"moderate-macro": 0.4, "low-macro": 0.7, "no-macro": 1.0}


def _build_presets() -> dict[str, dict[str, Any]]:
    presets: dict[str, dict[str, Any]] = {
        "no-biases": {},
        "reward-individual-success": {"bias.r2": 0.022, "bias.individual_scope": "success"},
        "penalty-individual-failure": {"bias.r2": 0.022, "bias.individual_scope": "failure"},
        "reward-mixed-group-success": {"bias.r2_group": 0.022, "bias.group_scope": "success"},
        "penalty-mixed-group-failure": {"bias.r2_group": 0.022, "bias.group_scope": "failure"},
        "penalty-non-altruism": {"bias.p_com": 0.10, "bias.f_dis": 0.90},
        "penalty-stretch-project": {"bias.p_female": 0.20},
        "all-biases": {
            "bias.r2": 0.022,
            "bias.r2_group": 0.022,
            "bias.p_com": 0.10,
            "bias.f_dis": 0.90,
            "bias.p_female": 0.20,
        },
        "norms": {
            "norms.enabled": True,
            "norms.b_macro": 0.01,
            "norms.b_macro_group": 0.01,
            "norms.p_m": 0.7,
            "p_male": 0.2,
        },
        # Variant with the interpersonal mechanisms from the all-biases row
        # also active (the norms experiment's figure caption reads this way;
        # the parameter table reads as the plain "norms" preset).
        "norms-all-biases": {
            "norms.enabled": True,
            "norms.b_macro": 0.01,
            "norms.b_macro_group": 0.01,
            "norms.p_m": 0.7,
            "p_male": 0.2,
            "bias.p_com": 0.10,
            "bias.f_dis": 0.90,
            "bias.p_female": 0.20,
        },
    }
    for wname, w in _INTERVENTION_WEIGHTS.items():
        for dname, window in _INTERVENTION_WINDOWS.items():
            presets[f"intervention-{wname}-{dname}"] = {
                "n_sim": 1600,
                "norms.enabled": True,
                "norms.b_macro": 0.01,
                "norms.b_macro_group": 0.01,
                "norms.w0": 0.0,
                "norms.w": w,
                "bias.p_female": 0.0,
                "intervention.k": 70,
                "intervention.i_range": list(window),
            }
    return presets


PRESETS = _build_presets()


def preset_names() -> list[str]:
    return list(PRESETS)


def load_config(source: str | Path) -> ScenarioConfig:
    """Resolve a preset name or a JSON config file into a validated config."""
    name = str(source)
    if name in PRESETS:
        config = config_from_dotted(PRESETS[name])
        config = replace(config, scenario_id=name)
        return validate_config(config)
    path = Path(source)
    if not path.exists():
        raise ConfigError(
            f"{name!r} is neither a known preset nor an existing config file; "
            f"known presets: {', '.join(preset_names())}"
        )
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must contain a JSON object")
    unknown = set(raw) - KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys in {path}: {sorted(unknown)}")
    config = config_from_dotted(raw)
    if "scenario_id" not in raw:
        config = replace(config, scenario_id=path.stem)
    return validate_config(config)


def write_resolved_config(config: ScenarioConfig, path: Path) -> None:
    path.write_text(
        json.dumps(config_to_dotted(config), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
