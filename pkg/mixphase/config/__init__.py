"""Settings files and experiment documents for mixphase."""

from mixphase.config.manager import Config
from mixphase.config.schema import (
    KINDS,
    SCHEMA_VERSION,
    CompileExperiment,
    CondenseExperiment,
    EvolveExperiment,
    ExperimentBase,
    NogoExperiment,
    QAExperiment,
    SwitchExperiment,
    TimerExperiment,
    load_experiment,
    parse_experiment,
)

__all__ = [
    "Config",
    "CompileExperiment",
    "CondenseExperiment",
    "EvolveExperiment",
    "ExperimentBase",
    "KINDS",
    "NogoExperiment",
    "QAExperiment",
    "SCHEMA_VERSION",
    "SwitchExperiment",
    "TimerExperiment",
    "load_experiment",
    "parse_experiment",
]
