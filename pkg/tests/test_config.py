import json

import pytest
from hypothesis import given, strategies as st

from ceilsim.config import (
    ConfigError,
    ScenarioConfig,
    config_from_dotted,
    config_to_dotted,
    load_config,
    preset_names,
    validate_config,
)
from ceilsim.cli import _parse_values, main


class TestDefaults:
    def test_model_constants(self):
        config = ScenarioConfig()
        assert config.n_sim == 480
        assert config.p_male == 0.5
        assert config.capacities == (500, 350, 200, 150, 100, 75, 40, 10)
        assert config.n_promotion == 24
        assert config.p_leave == 0.15
        assert config.p_s == 0.5
        assert (config.mu_o, config.sigma_o) == (50.0, 1.0)
        assert (config.mu_r, config.sigma_r) == (10.0, 1.0)
        assert (config.mu_st, config.sigma_st) == (30.0, 1.0)
        assert config.p_individual == 0.5
        assert config.p_stretch == 0.1
        assert config.n_stretch == 12

    def test_bias_defaults_off(self):
        config = ScenarioConfig()
        assert config.bias.r2 == 0.0 and config.bias.r2_group == 0.0
        assert config.bias.p_com == 0.0 and config.bias.p_female == 0.0
        assert config.norms.enabled is False
        assert config.intervention.k == 0.0


class TestPresets:
    def test_no_biases_is_all_defaults(self):
        config = load_config("no-biases")
        assert config == ScenarioConfig(scenario_id="no-biases")

    def test_all_biases_row(self):
        config = load_config("all-biases")
        assert config.bias.r2 == 0.022
        assert config.bias.r2_group == 0.022
        assert config.bias.p_com == 0.10
        assert config.bias.f_dis == 0.90
        assert config.bias.p_female == 0.20
        assert config.bias.individual_scope == "both"

    def test_single_mechanism_scopes(self):
        assert load_config("reward-individual-success").bias.individual_scope == "success"
        assert load_config("penalty-individual-failure").bias.individual_scope == "failure"
        assert load_config("reward-mixed-group-success").bias.group_scope == "success"
        assert load_config("penalty-mixed-group-failure").bias.group_scope == "failure"

    def test_intervention_preset_row(self):
        config = load_config("intervention-moderate-macro-9cycles")
        assert config.n_sim == 1600
        assert config.norms.b_macro == 0.01 and config.norms.b_macro_group == 0.01
        assert config.norms.w0 == 0.0 and config.norms.w == 0.4
        assert config.intervention.k == 70
        assert config.intervention.i_range == (168, 384)

    def test_intervention_window_grid(self):
        assert load_config("intervention-no-macro-3cycles").intervention.i_range == (168, 240)
        assert load_config("intervention-low-macro-6cycles").intervention.i_range == (168, 312)
        assert load_config("intervention-low-macro-6cycles").norms.w == 0.7

    def test_norms_preset(self):
        config = load_config("norms")
        assert config.norms.enabled and config.p_male == 0.2
        assert config.norms.p_m == 0.7 and config.norms.b_macro == 0.01
        assert config.bias.p_female == 0.0  # parameter-table reading

    EXPECTED_DIFFS = {
        "no-biases": set(),
        "reward-individual-success": {"bias.r2", "bias.individual_scope"},
        "penalty-individual-failure": {"bias.r2", "bias.individual_scope"},
        "reward-mixed-group-success": {"bias.r2_group", "bias.group_scope"},
        "penalty-mixed-group-failure": {"bias.r2_group", "bias.group_scope"},
        "penalty-non-altruism": {"bias.p_com", "bias.f_dis"},
        "penalty-stretch-project": {"bias.p_female"},
        "all-biases": {"bias.r2", "bias.r2_group", "bias.p_com", "bias.f_dis",
                       "bias.p_female"},
        "norms": {"norms.enabled", "p_male"},
        "norms-all-biases": {"norms.enabled", "p_male", "bias.p_com", "bias.f_dis",
                             "bias.p_female"},
    }

    def test_preset_fidelity(self):
        # Each preset differs from defaults in exactly its table row's fields
        # (values already at their defaults, like b_macro=0.01, drop out).
        defaults = config_to_dotted(ScenarioConfig())
        for name in preset_names():
            resolved = config_to_dotted(load_config(name))
            diff = {k for k in defaults if resolved[k] != defaults[k]} - {"scenario_id"}
            if name.startswith("intervention-"):
                expected = {"n_sim", "norms.enabled", "norms.w", "intervention.k",
                            "intervention.i_range"}
            else:
                expected = self.EXPECTED_DIFFS[name]
            assert diff == expected, f"{name}: {diff} != {expected}"

    def test_unknown_preset_is_descriptive(self):
        with pytest.raises(ConfigError, match="neither a known preset"):
            load_config("glass-elevator")


class TestValidation:
    @pytest.mark.parametrize(
        "overrides,field",
        [
            ({"sigma_o": 0.0}, "sigma_o"),
            ({"p_male": 1.5}, "p_male"),
            ({"n_promotion": 0}, "n_promotion"),
            ({"n_promotion": 481}, "n_promotion"),
            ({"capacities": [1, 2, 3]}, "capacities"),
            ({"bias.r2": 1.0}, "bias.r2"),
            ({"bias.f_dis": 0.0}, "bias.f_dis"),
            ({"bias.p_female": -0.1}, "bias.p_female"),
            ({"bias.individual_scope": "sometimes"}, "bias.individual_scope"),
            ({"norms.p_m": 0.5}, "norms.p_m"),
            ({"norms.w": 1.2}, "norms.w"),
            ({"intervention.k": 150}, "intervention.k"),
            ({"intervention.i_range": [100, 50]}, "intervention.i_range"),
            ({"intervention.i_range": [0, 9999]}, "intervention.i_range"),
            ({"run.n_runs": 0}, "run.n_runs"),
        ],
    )
    def test_errors_name_the_field(self, overrides, field):
        with pytest.raises(ConfigError, match=field.split(".")[-1]):
            validate_config(config_from_dotted(overrides))

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"p_malee": 0.5}))
        with pytest.raises(ConfigError, match="p_malee"):
            load_config(path)

    def test_zero_turn_config_is_valid(self):
        validate_config(config_from_dotted({"n_sim": 0, "intervention.i_range": [0, 0]}))


class TestRoundTrip:
    def test_json_file_round_trips(self, tmp_path):
        config = load_config("all-biases")
        path = tmp_path / "echo.json"
        path.write_text(json.dumps(config_to_dotted(config)))
        assert load_config(path) == config

    @given(
        st.fixed_dictionaries(
            {},
            optional={
                "p_male": st.floats(min_value=0, max_value=1),
                "bias.r2": st.floats(min_value=-0.5, max_value=0.5),
                "norms.w": st.floats(min_value=0, max_value=1),
                "n_sim": st.integers(min_value=24, max_value=2000),
                "bias.p_com": st.floats(min_value=0, max_value=1),
            },
        )
    )
    def test_dotted_round_trip(self, overrides):
        config = config_from_dotted(overrides)
        assert config_from_dotted(config_to_dotted(config)) == config


class TestCli:
    def test_parse_scalar_values(self):
        assert _parse_values("0,0.2,1") == [0, 0.2, 1]

    def test_parse_window_values(self):
        assert _parse_values("[168,240];[168,312]") == [[168, 240], [168, 312]]

    def test_presets_list(self, capsys):
        assert main(["presets", "list"]) == 0
        out = capsys.readouterr().out
        assert "all-biases" in out and "intervention-no-macro-9cycles" in out

    def test_validate_ok(self, tmp_path, capsys):
        path = tmp_path / "ok.json"
        path.write_text(json.dumps({"n_sim": 48, "intervention.i_range": [0, 0]}))
        assert main(["validate", "--config", str(path)]) == 0

    def test_validate_bad_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"sigma_o": -1}))
        assert main(["validate", "--config", str(path)]) == 2
        assert "sigma_o" in capsys.readouterr().err

    def test_missing_config_file_exits_2(self, capsys):
        assert main(["validate", "--config", "/nonexistent.json"]) == 2
