"""Tests for CLI commands."""

import configparser
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from mixphase.cli.main import cli

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

LOWERING = {"dims": [2], "real": [[0.0, 1.0], [0.0, 0.0]], "imag": [[0.0, 0.0], [0.0, 0.0]]}


@pytest.fixture
def runner():
    """Create Click CLI runner."""
    return CliRunner()


@pytest.fixture(autouse=True)
def isolated_user_config(tmp_path, mocker):
    """Keep the real user settings out of every test."""
    user_dir = tmp_path / "user_config_dir"
    mocker.patch("mixphase.config.manager.get_user_config_dir", return_value=user_dir)
    return user_dir


def write_doc(path: Path, **doc) -> Path:
    path.write_text(json.dumps({"schema_version": 1, **doc}))
    return path


def write_settings(path: Path, **sections) -> Path:
    config = configparser.ConfigParser()
    for name, values in sections.items():
        config[name] = values
    with open(path, "w") as f:
        config.write(f)
    return path


class TestRunCommand:
    """Test experiment runs."""

    def test_timer_run_writes_levels(self, runner, tmp_path):
        """A timer run emits the t,k,p_k table."""
        with runner.isolated_filesystem(temp_dir=tmp_path) as td:
            doc = write_doc(Path(td) / "timer.json", kind="timer", T=4, tau=2.0, ladder=[64])
            result = runner.invoke(cli, ["run", "--config", str(doc), "--out", "out"])

            assert result.exit_code == 0, result.output
            lines = (Path(td) / "out" / "timer_levels.csv").read_text().splitlines()
            assert lines[0] == "t,k,p_k"
            assert (Path(td) / "out" / "timer_summary.json").exists()

    def test_output_dir_from_settings(self, runner, tmp_path):
        """Without --out the [run] output_dir setting is used."""
        with runner.isolated_filesystem(temp_dir=tmp_path) as td:
            write_settings(Path(td) / ".mixphase.conf", run={"output_dir": "from_settings"})
            doc = write_doc(Path(td) / "timer.json", kind="timer", ladder=[64])
            result = runner.invoke(cli, ["run", "-c", str(doc)])

            assert result.exit_code == 0, result.output
            assert (Path(td) / "from_settings" / "timer_levels.csv").exists()

    @pytest.mark.integration
    def test_reruns_are_byte_identical(self, runner, tmp_path):
        """Identical config and seed give identical CSV files."""
        with runner.isolated_filesystem(temp_dir=tmp_path) as td:
            doc = write_doc(
                Path(td) / "evolve.json",
                kind="evolve",
                terms=[{"support": [0], "jumps": [LOWERING]}],
                initial="maximally_mixed",
                axioms={"count": 4, "max_sites": 2},
            )
            for out in ("a", "b"):
                result = runner.invoke(cli, ["run", "-c", str(doc), "-o", out, "--seed", "9"])
                assert result.exit_code == 0, result.output
            for name in ("evolve_trajectory.csv", "evolve_axioms.csv"):
                first = (Path(td) / "a" / name).read_bytes()
                assert first == (Path(td) / "b" / name).read_bytes()

    def test_seed_override_recorded(self, runner, tmp_path):
        """--seed replaces the document seed."""
        with runner.isolated_filesystem(temp_dir=tmp_path) as td:
            doc = write_doc(Path(td) / "timer.json", kind="timer", ladder=[64], seed=1)
            result = runner.invoke(cli, ["run", "-c", str(doc), "-o", "out", "--seed", "42"])

            assert result.exit_code == 0, result.output
            summary = json.loads((Path(td) / "out" / "timer_summary.json").read_text())
            assert summary["experiment"]["seed"] == 42

    def test_summary_without_timestamp(self, runner, tmp_path):
        """[run] timestamp = false makes the summary byte-stable too."""
        with runner.isolated_filesystem(temp_dir=tmp_path) as td:
            write_settings(Path(td) / ".mixphase.conf", run={"timestamp": "false"})
            doc = write_doc(Path(td) / "timer.json", kind="timer", ladder=[64])
            for out in ("a", "b"):
                result = runner.invoke(cli, ["run", "-c", str(doc), "-o", out])
                assert result.exit_code == 0, result.output

            first = (Path(td) / "a" / "timer_summary.json").read_bytes()
            assert "timestamp" not in json.loads(first)
            assert first == (Path(td) / "b" / "timer_summary.json").read_bytes()

    def test_malformed_config_exits_2(self, runner, tmp_path):
        """Schema violations exit 2 with the field path and write nothing."""
        with runner.isolated_filesystem(temp_dir=tmp_path) as td:
            doc = write_doc(Path(td) / "timer.json", kind="timer", T=0)
            result = runner.invoke(cli, ["run", "-c", str(doc), "-o", "out"])

            assert result.exit_code == 2
            assert "T:" in result.output
            assert not (Path(td) / "out").exists()

    def test_invalid_json_exits_2(self, runner, tmp_path):
        """Unreadable documents exit 2."""
        with runner.isolated_filesystem(temp_dir=tmp_path) as td:
            bad = Path(td) / "bad.json"
            bad.write_text("{")
            result = runner.invoke(cli, ["run", "-c", str(bad)])
            assert result.exit_code == 2

    def test_numeric_guard_exits_3(self, runner, tmp_path):
        """A breached guard exits 3 and names the guard."""
        with runner.isolated_filesystem(temp_dir=tmp_path) as td:
            doc = write_doc(
                Path(td) / "condense.json",
                kind="condense",
                numeric={"dense_dim_limit": 16},
            )
            result = runner.invoke(cli, ["run", "-c", str(doc), "-o", "out"])

            assert result.exit_code == 3
            assert "dense_dim_limit" in result.output
            assert not (Path(td) / "out").exists()

    def test_settings_guard_exits_3(self, runner, tmp_path):
        """Guards set in the settings file apply too."""
        with runner.isolated_filesystem(temp_dir=tmp_path) as td:
            write_settings(Path(td) / ".mixphase.conf", numeric={"dense_dim_limit": "16"})
            doc = write_doc(Path(td) / "condense.json", kind="condense")
            result = runner.invoke(cli, ["run", "-c", str(doc), "-o", "out"])
            assert result.exit_code == 3

    def test_dry_run(self, runner, tmp_path):
        """--dry-run computes without writing."""
        with runner.isolated_filesystem(temp_dir=tmp_path) as td:
            doc = write_doc(Path(td) / "timer.json", kind="timer", ladder=[64])
            result = runner.invoke(cli, ["--dry-run", "run", "-c", str(doc), "-o", "out"])

            assert result.exit_code == 0, result.output
            assert "Dry run" in result.output
            assert not (Path(td) / "out").exists()


class TestKindAliases:
    """Test per-kind commands."""

    def test_alias_runs(self, runner, tmp_path):
        """The kind alias runs a matching document."""
        with runner.isolated_filesystem(temp_dir=tmp_path) as td:
            doc = write_doc(Path(td) / "timer.json", kind="timer", ladder=[64])
            result = runner.invoke(cli, ["timer", str(doc), "-o", "out"])
            assert result.exit_code == 0, result.output

    def test_alias_rejects_other_kind(self, runner, tmp_path):
        """Aliases refuse documents of another kind."""
        with runner.isolated_filesystem(temp_dir=tmp_path) as td:
            doc = write_doc(Path(td) / "timer.json", kind="timer")
            result = runner.invoke(cli, ["condense", str(doc), "-o", "out"])

            assert result.exit_code == 2
            assert not (Path(td) / "out").exists()

    def test_every_kind_has_alias(self, runner):
        """Help lists one command per kind."""
        result = runner.invoke(cli, ["--help"])
        for kind in ("timer", "switch", "compile", "qa", "condense", "nogo", "evolve"):
            assert kind in result.output


class TestValidateCommand:
    """Test document validation."""

    def test_valid_document(self, runner, tmp_path):
        doc = write_doc(tmp_path / "qa.json", kind="qa", numeric={"gap_tolerance": 1e-4})
        result = runner.invoke(cli, ["validate", str(doc)])

        assert result.exit_code == 0, result.output
        assert "is valid" in result.output
        assert "gap_tolerance" in result.output

    def test_unknown_key(self, runner, tmp_path):
        doc = write_doc(tmp_path / "qa.json", kind="qa", pathz=[])
        result = runner.invoke(cli, ["validate", str(doc)])

        assert result.exit_code == 2
        assert "pathz" in result.output

    @pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.json")))
    def test_shipped_configs_validate(self, runner, name):
        """Every shipped config passes validation."""
        result = runner.invoke(cli, ["validate", str(CONFIGS / name)])
        assert result.exit_code == 0, result.output


class TestConfigCommands:
    """Test config CLI commands."""

    def test_config_set(self, runner, tmp_path):
        """Test setting a value creates the local settings file."""
        with runner.isolated_filesystem(temp_dir=tmp_path) as td:
            result = runner.invoke(cli, ["config", "set", "run.workers", "2"])

            assert result.exit_code == 0
            assert "Set run.workers = 2" in result.output
            saved = configparser.ConfigParser()
            saved.read(Path(td) / ".mixphase.conf")
            assert saved["run"]["workers"] == "2"

    def test_config_set_user_target(self, runner, tmp_path, isolated_user_config):
        """--target user writes the user settings file."""
        with runner.isolated_filesystem(temp_dir=tmp_path):
            result = runner.invoke(
                cli, ["config", "set", "numeric.gap_tolerance", "1e-5", "--target", "user"]
            )
            assert result.exit_code == 0
            assert (isolated_user_config / "config").exists()

    def test_config_set_invalid_key_format(self, runner, tmp_path):
        """Test error for invalid key format."""
        with runner.isolated_filesystem(temp_dir=tmp_path):
            result = runner.invoke(cli, ["config", "set", "invalidkey", "value"])

            assert result.exit_code == 1
            assert "must be in format 'section.key'" in result.output

    def test_config_set_dry_run(self, runner, tmp_path):
        """Test config set in dry run mode."""
        with runner.isolated_filesystem(temp_dir=tmp_path) as td:
            result = runner.invoke(cli, ["--dry-run", "config", "set", "run.workers", "2"])

            assert result.exit_code == 0
            assert "Dry run" in result.output
            assert not (Path(td) / ".mixphase.conf").exists()

    def test_config_list(self, runner, tmp_path):
        """Test listing settings."""
        with runner.isolated_filesystem(temp_dir=tmp_path) as td:
            write_settings(
                Path(td) / ".mixphase.conf",
                numeric={"dense_dim_limit": "4096"},
                run={"workers": "2"},
            )
            result = runner.invoke(cli, ["config", "list"])

            assert result.exit_code == 0
            assert "dense_dim_limit" in result.output
            assert "4096" in result.output
            assert "workers" in result.output

    def test_config_list_section(self, runner, tmp_path):
        """Test listing specific section."""
        with runner.isolated_filesystem(temp_dir=tmp_path) as td:
            write_settings(
                Path(td) / ".mixphase.conf",
                numeric={"dense_dim_limit": "4096"},
                run={"workers": "2"},
            )
            result = runner.invoke(cli, ["config", "list", "--section", "run"])

            assert result.exit_code == 0
            assert "workers" in result.output
            assert "dense_dim_limit" not in result.output

    def test_config_list_empty(self, runner, tmp_path):
        """Without settings files the defaults message is shown."""
        with runner.isolated_filesystem(temp_dir=tmp_path):
            result = runner.invoke(cli, ["config", "list"])

            assert result.exit_code == 0
            assert "defaults" in result.output

    def test_broken_settings_file(self, runner, tmp_path):
        """An unparsable settings file exits 2."""
        with runner.isolated_filesystem(temp_dir=tmp_path) as td:
            (Path(td) / ".mixphase.conf").write_text("no header\n")
            doc = write_doc(Path(td) / "timer.json", kind="timer")
            result = runner.invoke(cli, ["run", "-c", str(doc)])
            assert result.exit_code == 2
