"""Experiment workflows, one per experiment kind."""

from typing import Dict, Optional, Type

from rich.console import Console

from mixphase.config.schema import ExperimentBase
from mixphase.qstate.linalg import NumericPolicy
from mixphase.utils.errors import ConfigError
from mixphase.workflows.base import (
    ExperimentResult,
    ExperimentWorkflow,
    MatrixOutput,
    TableOutput,
)
from mixphase.workflows.condense import CondenseWorkflow
from mixphase.workflows.evolve import EvolveWorkflow
from mixphase.workflows.nogo import NogoWorkflow
from mixphase.workflows.qa import QAWorkflow
from mixphase.workflows.switch import CompileWorkflow, SwitchWorkflow
from mixphase.workflows.timer import TimerWorkflow

WORKFLOWS: Dict[str, Type[ExperimentWorkflow]] = {
    cls.kind: cls
    for cls in (
        TimerWorkflow,
        SwitchWorkflow,
        CompileWorkflow,
        QAWorkflow,
        CondenseWorkflow,
        NogoWorkflow,
        EvolveWorkflow,
    )
}


def build_workflow(
    experiment: ExperimentBase,
    policy: NumericPolicy,
    console: Optional[Console] = None,
    verbose: bool = False,
    dry_run: bool = False,
    workers: int = 1,
    timestamp: bool = True,
) -> ExperimentWorkflow:
    """Workflow instance for ``experiment.kind``."""
    try:
        cls = WORKFLOWS[experiment.kind]
    except KeyError:
        raise ConfigError(f"No workflow for experiment kind '{experiment.kind}'")
    return cls(
        experiment,
        policy,
        console=console,
        verbose=verbose,
        dry_run=dry_run,
        workers=workers,
        timestamp=timestamp,
    )


__all__ = [
    "WORKFLOWS",
    "CompileWorkflow",
    "CondenseWorkflow",
    "EvolveWorkflow",
    "ExperimentResult",
    "ExperimentWorkflow",
    "MatrixOutput",
    "NogoWorkflow",
    "QAWorkflow",
    "SwitchWorkflow",
    "TableOutput",
    "TimerWorkflow",
    "build_workflow",
]
