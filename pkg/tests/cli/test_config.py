"""Tests for experiment config parsing and overrides."""

import pytest

from grbm.cli.config import (
    ExperimentConfig,
    apply_override,
    build_config,
    load_raw_config,
)
from grbm.errors import ConfigurationError
from grbm.sim.integrators import Scheme
from tests.conftest import EXPERIMENT_CONFIGS


class TestExperimentConfig:
    def test_shipped_configs_parse(self):
        paths = sorted(EXPERIMENT_CONFIGS.glob("*.yaml"))
        assert paths
        for path in paths:
            config = ExperimentConfig.from_dict(load_raw_config(path))
            assert config.output_dir.startswith("results/")

    def test_defaults_filled_in(self, model_section):
        config = ExperimentConfig.from_dict({"kind": "drift-check", "model": model_section})
        assert config.analysis["n_samples"] == 100_000
        assert config.analysis["r_start"] == 16.0
        assert config.run.n_paths == 1 and config.run.seed == 0

    def test_unknown_top_level_key(self, model_section):
        with pytest.raises(ConfigurationError, match="Unknown top-level keys: extra"):
            ExperimentConfig.from_dict({"kind": "validate", "model": model_section, "extra": 1})

    def test_unknown_analysis_key(self, model_section):
        with pytest.raises(ConfigurationError, match="analysis"):
            ExperimentConfig.from_dict({"kind": "validate", "model": model_section,
                                        "analysis": {"lambda": 1.0}})

    def test_unknown_kind(self):
        with pytest.raises(ConfigurationError, match="Unknown experiment kind"):
            ExperimentConfig.from_dict({"kind": "sample"})

    def test_model_and_particles_exclusive(self, model_section):
        with pytest.raises(ConfigurationError, match="not both"):
            ExperimentConfig.from_dict({"kind": "simulate", "model": model_section,
                                        "particles": {"d": 2, "mu": [0, -1]}})

    def test_target_required(self):
        with pytest.raises(ConfigurationError, match="needs a 'model' or 'particles'"):
            ExperimentConfig.from_dict({"kind": "simulate"})

    def test_rate_scaling_needs_no_target(self):
        config = ExperimentConfig.from_dict({"kind": "rate-scaling"})
        assert config.analysis["d_list"] == [8, 16, 24, 32, 48, 64]

    @pytest.mark.parametrize("analysis", [
        {"n_samples": "abc"},
        {"n_samples": 1.5},
        {"n_samples": True},
        {"eps": "small"},
        {"eps": [0.1]},
        {"r": None, "n_samples": None},
        {"x0": [0.0, "a"]},
        {"fit_window": [1.0]},
    ])
    def test_bad_analysis_value(self, model_section, analysis):
        kind = "mixing" if "fit_window" in analysis else "drift-check"
        if "x0" in analysis:
            kind = "simulate"
        with pytest.raises(ConfigurationError, match="analysis"):
            ExperimentConfig.from_dict({"kind": kind, "model": model_section,
                                        "analysis": analysis})

    def test_analysis_values_normalized(self, model_section):
        config = ExperimentConfig.from_dict({
            "kind": "drift-check", "model": model_section,
            "analysis": {"r": 16, "eps": "1e-3", "lambda": None},
        })
        assert config.analysis["r"] == 16.0 and isinstance(config.analysis["r"], float)
        assert config.analysis["eps"] == 1e-3
        assert config.analysis["lambda"] is None

    def test_x0_pair_shape(self, model_section):
        with pytest.raises(ConfigurationError, match="two initial states"):
            ExperimentConfig.from_dict({"kind": "mixing", "model": model_section,
                                        "analysis": {"x0_pair": [[0.0, 0.0]]}})

    @pytest.mark.parametrize("run", [
        {"seed": -1},
        {"seed": 2 ** 64},
        {"seed": 1.5},
        {"n_paths": 0},
        {"n_paths": True},
        {"dt": "fast"},
        {"steps": 10},
    ])
    def test_bad_run_section(self, model_section, run):
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_dict({"kind": "simulate", "model": model_section, "run": run})

    def test_scheme(self, model_section):
        config = ExperimentConfig.from_dict({"kind": "simulate", "model": model_section,
                                             "run": {"scheme": "euler_maruyama"}})
        assert config.run.scheme is Scheme.EULER_MARUYAMA
        with pytest.raises(ConfigurationError, match="Unknown scheme"):
            ExperimentConfig.from_dict({"kind": "simulate", "model": model_section,
                                        "run": {"scheme": "milstein"}})

    def test_digest_ignores_output_dir(self, model_section):
        a = ExperimentConfig.from_dict({"kind": "validate", "model": model_section,
                                        "output_dir": "one"})
        b = ExperimentConfig.from_dict({"kind": "validate", "model": model_section,
                                        "output_dir": "two"})
        c = ExperimentConfig.from_dict({"kind": "validate", "model": model_section,
                                        "run": {"seed": 1}})
        assert a.digest() == b.digest()
        assert a.digest() != c.digest()


class TestOverrides:
    def test_nested_value_parsed_as_yaml(self):
        data = {"run": {"T": 1.0}}
        apply_override(data, "run.T=20")
        apply_override(data, "model.mu=[1, -1]")
        assert data == {"run": {"T": 20}, "model": {"mu": [1, -1]}}

    def test_missing_equals(self):
        with pytest.raises(ConfigurationError, match="key=value"):
            apply_override({}, "run.T")

    def test_not_a_mapping(self):
        with pytest.raises(ConfigurationError, match="not a mapping"):
            apply_override({"run": 3}, "run.T=1")


class TestBuildConfig:
    def test_flags_applied(self, write_config, model_section):
        path = write_config({"kind": "validate", "model": model_section})
        config = build_config(path, ["analysis.grid_points=11"], kind="validate", seed=5,
                              output_dir="out")
        assert config.run.seed == 5
        assert config.output_dir == "out"
        assert config.analysis["grid_points"] == 11

    def test_kind_mismatch(self, write_config, model_section):
        path = write_config({"kind": "validate", "model": model_section})
        with pytest.raises(ConfigurationError, match="'validate' but the command is 'simulate'"):
            build_config(path, kind="simulate")

    def test_kind_from_command(self):
        assert build_config(None, kind="rate-scaling").kind == "rate-scaling"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError, match="not found"):
            load_raw_config(tmp_path / "absent.yaml")

    def test_malformed_yaml(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("kind: [validate\n")
        with pytest.raises(ConfigurationError, match="Cannot parse"):
            load_raw_config(path)

    def test_not_a_mapping(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigurationError, match="mapping"):
            load_raw_config(path)
