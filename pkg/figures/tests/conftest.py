"""Builds a small-scale dataset through the simulator CLI (the only interface
this package consumes). Set CEILSIM_FIGURE_DATA to point the suite at a
full-scale dataset instead."""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

SMALL_BASE = {
    "capacities": [40, 28, 16, 12, 8, 6, 4, 2],
    "n_sim": 96,
    "n_promotion": 12,
    "n_stretch": 6,
    "run.n_runs": 4,
    "run.master_seed": 3,
    "intervention.i_range": [0, 0],
}

BIAS_PRESET_OVERRIDES = {
    "no-biases": {},
    "reward-individual-success": {"bias.r2": 0.022, "bias.individual_scope": "success"},
    "penalty-individual-failure": {"bias.r2": 0.022, "bias.individual_scope": "failure"},
    "reward-mixed-group-success": {"bias.r2_group": 0.022, "bias.group_scope": "success"},
    "penalty-mixed-group-failure": {"bias.r2_group": 0.022, "bias.group_scope": "failure"},
    "penalty-non-altruism": {"bias.p_com": 0.10, "bias.f_dis": 0.90},
    "penalty-stretch-project": {"bias.p_female": 0.20},
    "all-biases": {
        "bias.r2": 0.022, "bias.r2_group": 0.022, "bias.p_com": 0.10,
        "bias.f_dis": 0.90, "bias.p_female": 0.20,
    },
}

NORMS_OVERRIDES = {
    "norms.enabled": True, "norms.p_m": 0.7, "norms.b_macro": 0.01,
    "norms.b_macro_group": 0.01, "p_male": 0.2,
}


def run_cli(*args: str) -> None:
    result = subprocess.run(
        [sys.executable, "-m", "ceilsim.cli", *args],
        capture_output=True, text=True,
    )
    if result.returncode != 0:
        raise RuntimeError(f"ceilsim {' '.join(args)} failed:\n{result.stderr}")


def write_config(path: Path, scenario_id: str, overrides: dict) -> Path:
    config = dict(SMALL_BASE)
    config.update(overrides)
    config["scenario_id"] = scenario_id
    path.write_text(json.dumps(config))
    return path


def build_small_dataset(root: Path) -> Path:
    root.mkdir(parents=True, exist_ok=True)
    cfg_dir = root / "_configs"
    cfg_dir.mkdir(exist_ok=True)

    for name, overrides in BIAS_PRESET_OVERRIDES.items():
        cfg = write_config(cfg_dir / f"{name}.json", name, overrides)
        run_cli("run", "--config", str(cfg), "--out", str(root / name),
                "--parallelism", "1")

    norms_cfg = write_config(cfg_dir / "norms.json", "norms", NORMS_OVERRIDES)
    run_cli("sweep", "--config", str(norms_cfg), "--param", "norms.w",
            "--values", "0,0.2,0.4,0.6,0.8,1", "--out", str(root / "norms-sweep"),
            "--parallelism", "1")

    for w, tag in ((0.4, "moderate"), (0.7, "low"), (1.0, "no")):
        overrides = dict(NORMS_OVERRIDES)
        overrides.update({
            "p_male": 0.5, "n_sim": 240, "norms.w0": 0.0, "norms.w": w,
            "intervention.k": 70,
        })
        cfg = write_config(cfg_dir / f"iv-{tag}.json", f"iv-{tag}", overrides)
        run_cli("sweep", "--config", str(cfg), "--param", "intervention.i_range",
                "--values", "[24,48];[24,72];[24,96]",
                "--out", str(root / f"intervention-{tag}"), "--parallelism", "1")
    return root


@pytest.fixture(scope="session")
def dataset(tmp_path_factory) -> Path:
    env = os.environ.get("CEILSIM_FIGURE_DATA")
    if env and Path(env).is_dir():
        return Path(env)
    return build_small_dataset(tmp_path_factory.mktemp("figdata"))
