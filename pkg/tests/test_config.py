"""Tests for settings management and experiment documents."""

import configparser
import json

import pytest

from mixphase.config import (
    Config,
    CondenseExperiment,
    EvolveExperiment,
    TimerExperiment,
    load_experiment,
    parse_experiment,
)
from mixphase.qstate.linalg import NumericPolicy
from mixphase.utils.errors import ConfigError


@pytest.fixture
def temp_config_dir(tmp_path):
    """Create a temporary directory for settings files."""
    return tmp_path


@pytest.fixture
def local_config_file(temp_config_dir):
    """Create a local settings file."""
    config_path = temp_config_dir / ".mixphase.conf"
    config = configparser.ConfigParser()

    config["numeric"] = {
        "dense_dim_limit": "4096",
        "dynamics_atol": "1e-9",
    }

    config["run"] = {
        "workers": "3",
        "output_dir": "out",
        "timestamp": "false",
    }

    with open(config_path, "w") as f:
        config.write(f)

    return config_path


@pytest.fixture
def user_config_file(temp_config_dir):
    """Create a user settings file."""
    config_path = temp_config_dir / "user_config"
    config = configparser.ConfigParser()

    config["run"] = {
        "workers": "1",
    }

    with open(config_path, "w") as f:
        config.write(f)

    return config_path


@pytest.fixture
def no_config(temp_config_dir):
    """Settings manager with neither file present."""
    return Config(
        local_path=temp_config_dir / ".mixphase.conf",
        user_path=temp_config_dir / "missing" / "config",
    )


def timer_doc(**extra):
    doc = {"schema_version": 1, "kind": "timer", "T": 4, "tau": 2.0}
    doc.update(extra)
    return doc


class TestConfigLoading:
    """Test settings loading."""

    def test_loads_local_config(self, local_config_file):
        """Test loading local settings file."""
        cfg = Config(local_path=local_config_file)
        assert cfg.config_path == local_config_file
        assert cfg.get("run", "output_dir") == "out"

    def test_loads_user_config_when_no_local(self, user_config_file, temp_config_dir):
        """Test loading user settings when local doesn't exist."""
        local_path = temp_config_dir / ".mixphase.conf"
        cfg = Config(local_path=local_path, user_path=user_config_file)
        assert cfg.config_path == user_config_file
        assert cfg.get_int("run", "workers") == 1

    def test_prefers_local_over_user(self, local_config_file, user_config_file):
        """Test that local settings take precedence over user settings."""
        cfg = Config(local_path=local_config_file, user_path=user_config_file)
        assert cfg.config_path == local_config_file
        assert cfg.get_int("run", "workers") == 3

    def test_defaults_when_no_file(self, no_config):
        """Without any file every lookup falls back to its default."""
        assert no_config.config_path is None
        assert no_config.get_sections() == []
        assert no_config.numeric_policy() == NumericPolicy()

    def test_unparsable_file_raises(self, temp_config_dir):
        """A file without section headers is rejected."""
        broken = temp_config_dir / ".mixphase.conf"
        broken.write_text("dense_dim_limit = 12\n")
        with pytest.raises(ConfigError, match="Cannot parse"):
            Config(local_path=broken, user_path=temp_config_dir / "none")


class TestConfigGet:
    """Test getting settings values."""

    def test_get_with_fallback(self, local_config_file):
        """Test getting value with fallback."""
        cfg = Config(local_path=local_config_file)
        assert cfg.get("run", "nonexistent", fallback="default") == "default"

    def test_get_bool_value(self, local_config_file):
        """Test getting boolean value."""
        cfg = Config(local_path=local_config_file)
        assert cfg.get_bool("run", "timestamp") is False
        assert cfg.get_bool("run", "nonexistent") is False

    def test_get_bool_rejects_text(self, no_config):
        """Non-boolean values raise ConfigError naming the key."""
        no_config.set("run", "timestamp", "sometimes")
        with pytest.raises(ConfigError, match="run.timestamp"):
            no_config.get_bool("run", "timestamp")

    def test_get_int_and_float(self, local_config_file):
        """Test typed getters."""
        cfg = Config(local_path=local_config_file)
        assert cfg.get_int("numeric", "dense_dim_limit") == 4096
        assert cfg.get_float("numeric", "dynamics_atol") == pytest.approx(1e-9)
        assert cfg.get_int("numeric", "nonexistent", fallback=7) == 7

    def test_get_int_rejects_text(self, local_config_file):
        """Non-integer values raise ConfigError naming the key."""
        cfg = Config(local_path=local_config_file)
        with pytest.raises(ConfigError, match="run.output_dir"):
            cfg.get_int("run", "output_dir")


class TestConfigSave:
    """Test saving settings."""

    def test_save_to_active_config(self, local_config_file):
        """Test saving to active settings file."""
        cfg = Config(local_path=local_config_file)
        cfg.set("numeric", "gap_tolerance", "1e-5")
        cfg.save()

        cfg2 = Config(local_path=local_config_file)
        assert cfg2.get_float("numeric", "gap_tolerance") == pytest.approx(1e-5)

    def test_save_without_file_goes_local(self, no_config, temp_config_dir):
        """With no active file, save writes the local path and activates it."""
        no_config.set("run", "workers", 2)
        no_config.save()

        local = temp_config_dir / ".mixphase.conf"
        assert local.exists()
        assert no_config.config_path == local

    def test_save_to_user_creates_parent(self, no_config, temp_config_dir):
        """Saving to the user path creates its directory."""
        no_config.set("run", "workers", 2)
        no_config.save(target="user")
        assert (temp_config_dir / "missing" / "config").exists()

    def test_save_invalid_target_raises_error(self, local_config_file):
        """Test error for invalid save target."""
        cfg = Config(local_path=local_config_file)
        with pytest.raises(ConfigError, match="Invalid target"):
            cfg.save(target="invalid")


class TestConfigRunSettings:
    """Test derived run settings."""

    def test_numeric_policy_applies_section(self, local_config_file):
        """[numeric] entries override the policy defaults."""
        policy = Config(local_path=local_config_file).numeric_policy()
        assert policy.dense_dim_limit == 4096
        assert policy.dynamics_atol == pytest.approx(1e-9)
        assert policy.algebraic_atol == NumericPolicy().algebraic_atol

    def test_numeric_policy_rejects_unknown_key(self, no_config):
        """Unknown numeric keys are an error."""
        no_config.set("numeric", "dense_limit", "10")
        with pytest.raises(ConfigError, match="numeric.dense_limit"):
            no_config.numeric_policy()

    def test_workers_and_output_dir(self, local_config_file, no_config):
        """Run settings with and without a file."""
        cfg = Config(local_path=local_config_file)
        assert cfg.workers() == 3
        assert str(cfg.output_dir()) == "out"
        assert no_config.workers() >= 1
        assert str(no_config.output_dir()) == "results"

    def test_timestamp_setting(self, local_config_file, no_config):
        """Summaries are stamped unless [run] timestamp is off."""
        assert Config(local_path=local_config_file).timestamp() is False
        assert no_config.timestamp() is True

    def test_workers_must_be_positive(self, no_config):
        """Zero workers is rejected."""
        no_config.set("run", "workers", 0)
        with pytest.raises(ConfigError, match="workers"):
            no_config.workers()

    def test_repr(self, local_config_file):
        """Test string representation."""
        cfg = Config(local_path=local_config_file)
        assert "Config" in repr(cfg)
        assert str(local_config_file) in repr(cfg)


class TestExperimentSchema:
    """Test experiment document validation."""

    def test_parses_timer(self):
        """A minimal timer document fills the defaults."""
        exp = parse_experiment(timer_doc())
        assert isinstance(exp, TimerExperiment)
        assert exp.ladder == [64, 128, 256, 512]
        assert exp.prefix == "timer"
        assert exp.seed == 0

    def test_output_prefix(self):
        """output_prefix replaces the kind in file names."""
        exp = parse_experiment(timer_doc(output_prefix="run_1"))
        assert exp.prefix == "run_1"

    def test_rejects_unknown_key(self):
        """Unknown keys are reported with their field path."""
        with pytest.raises(ConfigError, match="bogus"):
            parse_experiment(timer_doc(bogus=1))

    def test_reports_nested_field_path(self):
        """Nested violations name the dotted path."""
        doc = {"schema_version": 1, "kind": "condense", "spt": {"n_sites": 0}}
        with pytest.raises(ConfigError, match=r"spt\.n_sites"):
            parse_experiment(doc)

    def test_rejects_bad_schema_version(self):
        """Only schema_version 1 is accepted."""
        with pytest.raises(ConfigError, match="schema_version"):
            parse_experiment(timer_doc(schema_version=2))

    def test_rejects_unknown_kind(self):
        """Unknown kinds list the accepted ones."""
        with pytest.raises(ConfigError, match="kind"):
            parse_experiment({"schema_version": 1, "kind": "anneal"})

    def test_rejects_non_object(self):
        """Documents must be JSON objects."""
        with pytest.raises(ConfigError, match="JSON object"):
            parse_experiment([1, 2, 3])

    def test_ladder_must_increase(self):
        """Bound ladders are strictly increasing."""
        with pytest.raises(ConfigError, match="ladder"):
            parse_experiment(timer_doc(ladder=[128, 64]))

    def test_condense_divisibility(self):
        """m must divide the local dimension."""
        with pytest.raises(ConfigError, match="must divide"):
            parse_experiment({"schema_version": 1, "kind": "condense", "local_dim": 4, "m": 3})

    def test_switch_stage_count(self):
        """Switch experiments need exactly two stages."""
        stage = {"target": "zero"}
        doc = {"schema_version": 1, "kind": "switch", "stages": [stage]}
        with pytest.raises(ConfigError, match="stages"):
            parse_experiment(doc)
        doc["stages"] = [stage] * 3
        with pytest.raises(ConfigError, match="two stages"):
            parse_experiment(doc)

    def test_seed_range(self):
        """Seeds are unsigned 64-bit integers."""
        with pytest.raises(ConfigError, match="seed"):
            parse_experiment(timer_doc(seed=-1))
        assert parse_experiment(timer_doc(seed=2**64 - 1)).seed == 2**64 - 1

    def test_numeric_overrides(self):
        """The numeric block only carries policy fields."""
        exp = parse_experiment(timer_doc(numeric={"max_gadget_timer": 3}))
        policy = NumericPolicy().with_overrides(exp.numeric.model_dump())
        assert policy.max_gadget_timer == 3
        assert policy.dense_dim_limit == NumericPolicy().dense_dim_limit
        with pytest.raises(ConfigError, match="numeric"):
            parse_experiment(timer_doc(numeric={"max_timer": 3}))

    def test_matrix_payload_shape(self):
        """Matrix payloads are checked against their dims."""
        doc = {
            "schema_version": 1,
            "kind": "evolve",
            "terms": [{"support": [0], "jumps": [{"dims": [2], "real": [[0.0]], "imag": [[0.0]]}]}],
        }
        with pytest.raises(ConfigError, match="terms"):
            parse_experiment(doc)

    def test_evolve_defaults(self):
        """Evolve documents default to |0> on one qubit."""
        exp = parse_experiment({"schema_version": 1, "kind": "evolve"})
        assert isinstance(exp, EvolveExperiment)
        assert exp.initial == "zero"
        assert exp.axioms is None


class TestLoadExperiment:
    """Test reading experiment files."""

    def test_loads_file(self, tmp_path):
        """Test loading a JSON document."""
        path = tmp_path / "condense.json"
        path.write_text(json.dumps({"schema_version": 1, "kind": "condense"}))
        assert isinstance(load_experiment(path), CondenseExperiment)

    def test_missing_file(self, tmp_path):
        """Missing files raise ConfigError."""
        with pytest.raises(ConfigError, match="Cannot read"):
            load_experiment(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        """Malformed JSON raises ConfigError."""
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_experiment(path)
