"""Tests for experiment workflows."""

import csv
import io
import json

import numpy as np
import pytest
from rich.console import Console

from mixphase.config import parse_experiment
from mixphase.qstate.linalg import NumericPolicy
from mixphase.workflows import (
    WORKFLOWS,
    ExperimentResult,
    TableOutput,
    TimerWorkflow,
    build_workflow,
)
from mixphase.workflows.base import format_cell
from mixphase.workflows.evolve import random_lindbladian
from mixphase.workflows.timer import _bounds_entry

INV_SQRT2 = 0.7071067811865476


def make(doc, policy=None, **kwargs):
    """Workflow for ``doc`` with a silent console."""
    experiment = parse_experiment({"schema_version": 1, **doc})
    console = Console(file=io.StringIO(), width=120)
    return build_workflow(experiment, policy or NumericPolicy(), console=console, **kwargs)


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


class TestWorkflowBase:
    """Test the shared workflow machinery."""

    def test_registry_covers_kinds(self):
        """Every experiment kind has a workflow."""
        assert set(WORKFLOWS) == {
            "timer",
            "switch",
            "compile",
            "qa",
            "condense",
            "nogo",
            "evolve",
        }
        assert isinstance(make({"kind": "timer"}), TimerWorkflow)

    def test_format_cell(self):
        """Integers stay integers, floats use fixed precision."""
        assert format_cell(7) == "7"
        assert format_cell(np.int64(3)) == "3"
        assert format_cell(True) == "1"
        assert format_cell(0.5) == "5.000000000000e-01"

    def test_table_write(self, tmp_path):
        """CSV files carry the header and formatted rows."""
        table = TableOutput("t.csv", ("t", "k", "p_k"), [(0.5, 1, 0.25)])
        path = table.write(tmp_path)
        assert path.read_text() == "t,k,p_k\n5.000000000000e-01,1,2.500000000000e-01\n"

    def test_passed(self):
        """A result passes only when every check passes."""
        result = ExperimentResult("timer", checks={"a": True})
        assert result.passed
        result.checks["b"] = False
        assert not result.passed

    def test_rng_streams(self):
        """Streams are reproducible and distinct."""
        workflow = make({"kind": "timer", "seed": 11})
        a = workflow.rng(1).random(3)
        np.testing.assert_array_equal(a, workflow.rng(1).random(3))
        assert not np.array_equal(a, workflow.rng(2).random(3))

    def test_sweep_matches_across_workers(self):
        """Pool and inline sweeps give the same entries in order."""
        jobs = [(64, 1.0, None), (128, 1.0, None), (256, 1.0, None)]
        inline = make({"kind": "timer"}).sweep(_bounds_entry, jobs)
        pooled = make({"kind": "timer"}, workers=2).sweep(_bounds_entry, jobs)
        assert [b.row() for b in inline] == [b.row() for b in pooled]

    def test_dry_run_writes_nothing(self, tmp_path):
        """Dry runs compute but leave the output directory alone."""
        out = tmp_path / "out"
        result = make({"kind": "timer", "ladder": [64, 128]}, dry_run=True).run(out)
        assert result.tables
        assert not out.exists()

    def test_summary_timestamp_optional(self, tmp_path):
        """Summaries are stamped by default and identical across reruns when not."""
        doc = {"kind": "timer", "ladder": [64]}
        make(doc).run(tmp_path / "stamped")
        stamped = json.loads((tmp_path / "stamped" / "timer_summary.json").read_text())
        assert "timestamp" in stamped

        make(doc, timestamp=False).run(tmp_path / "a")
        make(doc, timestamp=False).run(tmp_path / "b")
        first = (tmp_path / "a" / "timer_summary.json").read_bytes()
        assert "timestamp" not in json.loads(first)
        assert first == (tmp_path / "b" / "timer_summary.json").read_bytes()


class TestTimerWorkflow:
    """Test the timer experiment."""

    def test_levels_and_bounds(self, tmp_path):
        """Occupations, oracle agreement and the bound ladder."""
        workflow = make({"kind": "timer", "T": 4, "tau": 2.0, "times": [0.5, 1.0, 2.0]})
        result = workflow.run(tmp_path)
        assert result.passed, result.checks
        assert result.summary["ode_max_deviation"] <= 1e-10
        assert result.summary["gadget_max_deviation"] <= 1e-8

        levels = read_csv(tmp_path / "timer_levels.csv")
        assert levels[0] == ["t", "k", "p_k"]
        assert len(levels) == 1 + 3 * 5
        totals = {}
        for t, _, p in levels[1:]:
            totals[t] = totals.get(t, 0.0) + float(p)
        assert all(abs(v - 1.0) <= 1e-10 for v in totals.values())

        bounds = read_csv(tmp_path / "timer_bounds.csv")
        assert bounds[0] == ["T", "eps", "p_early", "p_late", "exponent"]
        assert [row[0] for row in bounds[1:]] == ["64", "128", "256", "512"]

        summary = json.loads((tmp_path / "timer_summary.json").read_text())
        assert summary["kind"] == "timer"
        assert summary["experiment"]["T"] == 4
        assert summary["checks"]["closed_form_matches_ode"] is True

    def test_gadget_skipped_beyond_guard(self):
        """Timers above max_gadget_timer skip the qubit gadget."""
        result = make({"kind": "timer", "T": 8, "ladder": [64]}).compute()
        assert "gadget_matches_chain" not in result.checks
        assert result.checks["closed_form_matches_ode"]

    def test_output_prefix(self, tmp_path):
        """File names follow output_prefix."""
        make({"kind": "timer", "ladder": [64], "output_prefix": "short"}).run(tmp_path)
        assert (tmp_path / "short_levels.csv").exists()
        assert (tmp_path / "short_summary.json").exists()


class TestSwitchWorkflows:
    """Test switched composites and compiled circuits."""

    def test_single_qubit_ladder(self, tmp_path):
        """Distance to the sequential oracle falls along T."""
        doc = {
            "kind": "switch",
            "n_sites": 1,
            "initial": "minus",
            "stages": [{"target": "plus"}, {"target": "zero"}],
            "tau": 1.0,
            "T_values": [4, 8, 16],
            "t_final": 4.0,
        }
        result = make(doc).run(tmp_path)
        assert result.checks["distance_decreasing_in_T"]
        rows = read_csv(tmp_path / "switch.csv")
        assert len(rows) == 4
        assert [row[0] for row in rows[1:]] == ["4", "8", "16"]
        assert result.summary["budget_total"] >= result.summary["budget_band_leak"]

    def test_hadamard_compile(self, tmp_path):
        """A configured single-gate circuit approaches H|0>."""
        hadamard = {
            "dims": [2],
            "real": [[INV_SQRT2, INV_SQRT2], [INV_SQRT2, -INV_SQRT2]],
            "imag": [[0.0, 0.0], [0.0, 0.0]],
        }
        layer = {"gates": [{"support": [0], "unitary": hadamard}]}
        doc = {
            "kind": "compile",
            "circuit": {"n_sites": 1, "layers": [layer]},
            "T_values": [16, 32, 64],
        }
        result = make(doc).run(tmp_path)
        assert result.checks["distance_decreasing_in_T"]
        assert result.summary["layers"] == 1
        assert len(read_csv(tmp_path / "compile.csv")) == 4


class TestQAWorkflow:
    """Test quasi-adiabatic experiments."""

    def test_single_qubit_transport(self, tmp_path):
        """Both generator modes transport the ground state."""
        result = make({"kind": "qa", "paths": [{"name": "single_qubit"}]}).run(tmp_path)
        assert result.checks["transport_single_qubit_exact"]
        assert result.checks["transport_single_qubit_filtered"]
        rows = read_csv(tmp_path / "qa_single_qubit_exact.csv")
        assert rows[0] == ["s", "gap", "fidelity"]
        assert len(rows) == 12

    def test_empty_experiment(self):
        """No entries produce no tables."""
        result = make({"kind": "qa"}).compute()
        assert result.tables == []


class TestCondenseWorkflow:
    """Test GHZ condensation and the product bound."""

    def test_two_sites(self, tmp_path):
        """GHZ_4 condenses to GHZ_2 and the product bound is saturated."""
        doc = {
            "kind": "condense",
            "n_sites": 2,
            "local_dim": 4,
            "m": 2,
            "times": [0.0, 1.0, 40.0],
            "bound_sites": 2,
        }
        result = make(doc).run(tmp_path)
        assert result.passed, result.checks
        assert result.summary["final_distance"] <= 1e-10
        assert "closed_form_matches_generator" in result.checks

        rows = read_csv(tmp_path / "condense_trajectory.csv")
        assert rows[0] == ["t", "trace_distance", "trace", "min_eig"]
        bound = read_csv(tmp_path / "condense_bound.csv")
        assert bound[0] == ["t", "distance", "bound"]
        assert float(bound[1][1]) == pytest.approx(1.0)

        target = json.loads((tmp_path / "condense_target.json").read_text())
        assert target["dims"] == [4, 4]

    def test_dense_guard(self):
        """Oversized condensation states breach the dense guard."""
        from mixphase.utils.errors import NumericGuardError

        workflow = make({"kind": "condense", "n_sites": 3}, NumericPolicy(dense_dim_limit=16))
        with pytest.raises(NumericGuardError) as exc:
            workflow.compute()
        assert exc.value.guard == "dense_dim_limit"

    @pytest.mark.slow
    def test_spt_bridge(self, tmp_path):
        """The bridge reaches the trivial phase symmetrically."""
        doc = {
            "kind": "condense",
            "n_sites": 2,
            "bound_sites": None,
            "spt": {"n_sites": 4, "times": [0.0, 30.0]},
        }
        result = make(doc).run(tmp_path)
        assert result.checks["bridge_converged"]
        assert result.checks["bridge_symmetric"]
        assert len(read_csv(tmp_path / "condense_bridge.csv")) == 3


class TestNogoWorkflow:
    """Test the overlap witnesses."""

    @pytest.mark.slow
    def test_rate_ladder(self, tmp_path):
        """Noiseless probes are exact and noise opens the Gram gap."""
        doc = {"kind": "nogo", "rates": [0.0, 0.1], "generation_samples": 3}
        result = make(doc).run(tmp_path)
        assert result.checks["noiseless_probe_exact"]
        assert result.checks["det_gap_increasing"]
        assert result.checks["logical_algebra"]
        assert result.summary["generating_samples"] == 3
        assert len(read_csv(tmp_path / "nogo.csv")) == 3

    def test_ghz_rank(self, tmp_path):
        """The GHZ Gram matrix has rank m."""
        doc = {
            "kind": "nogo",
            "rates": [0.0],
            "generation_samples": 0,
            "ghz": {"m": 2, "n": 4, "n_sites": 3},
        }
        result = make(doc).run(tmp_path)
        assert result.checks["ghz_rank_equals_m"]
        assert (tmp_path / "nogo_ghz.csv").exists()


class TestEvolveWorkflow:
    """Test generic evolution and the channel axioms."""

    LOWERING = {"dims": [2], "real": [[0.0, 1.0], [0.0, 0.0]], "imag": [[0, 0], [0, 0]]}
    DAMPING = {
        "kind": "evolve",
        "terms": [{"support": [0], "jumps": [LOWERING]}],
        "initial": "maximally_mixed",
        "target": {"dims": [2], "real": [[1.0, 0.0], [0.0, 0.0]], "imag": [[0, 0], [0, 0]]},
        "times": [0.0, 0.5, 1.0, 2.0, 4.0, 8.0],
    }

    def test_amplitude_damping(self, tmp_path):
        """The excited population decays at unit rate."""
        result = make(self.DAMPING).run(tmp_path)
        assert result.passed, result.checks
        assert result.summary["rate"] == pytest.approx(1.0, rel=1e-6)
        assert result.summary["monotone"] is True
        rows = read_csv(tmp_path / "evolve_trajectory.csv")
        assert float(rows[1][1]) == pytest.approx(0.5)
        assert float(rows[-1][1]) == pytest.approx(0.5 * np.exp(-8.0), rel=1e-6)

    def test_default_target_is_final_state(self):
        """Without a target the last state is the reference."""
        doc = {k: v for k, v in self.DAMPING.items() if k != "target"}
        result = make(doc).compute()
        assert result.summary["final_distance"] == pytest.approx(0.0, abs=1e-12)

    def test_initial_dims_checked(self):
        """Initial matrices must match the lattice."""
        from mixphase.utils.errors import DimensionError

        doc = dict(self.DAMPING)
        zeros = np.zeros((4, 4)).tolist()
        doc["initial"] = {"dims": [4], "real": np.eye(4).tolist(), "imag": zeros}
        with pytest.raises(DimensionError):
            make(doc).compute()

    def test_axioms(self, tmp_path):
        """Random generators satisfy every channel axiom."""
        doc = dict(self.DAMPING)
        doc["axioms"] = {"count": 6, "max_sites": 2}
        result = make(doc).run(tmp_path)
        assert result.passed, result.checks
        rows = read_csv(tmp_path / "evolve_axioms.csv")
        assert rows[0][:3] == ["index", "dim", "trace_defect"]
        assert len(rows) == 7
        assert {row[1] for row in rows[1:]} <= {"2", "4"}

    def test_axioms_reproducible(self):
        """The seed fixes every random generator."""
        doc = dict(self.DAMPING, seed=5)
        doc["axioms"] = {"count": 3, "max_sites": 2}
        first = make(doc).compute().tables[-1].rows
        second = make(doc).compute().tables[-1].rows
        assert first == second

    def test_random_lindbladian_sizes(self):
        """Random generators act on the requested number of qubits."""
        rng = np.random.default_rng(0)
        assert random_lindbladian(rng, 1).dim == 2
        assert random_lindbladian(rng, 3).dim == 8
