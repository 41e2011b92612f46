"""Shared experiment workflow: compute everything, show a summary, then write artifacts."""

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
from rich.console import Console
from rich.table import Table

from mixphase.config.schema import ExperimentBase
from mixphase.qstate.io import save_matrix
from mixphase.qstate.linalg import NumericPolicy

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def format_cell(value: Any) -> str:
    """Integers verbatim, everything else in fixed ``.12e`` notation."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12e}"


@dataclass
class TableOutput:
    """A CSV artifact: header plus rows."""

    name: str
    header: Tuple[str, ...]
    rows: List[Tuple[Any, ...]]

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for the summary."""
        return {"name": self.name, "header": list(self.header), "rows": len(self.rows)}

    def write(self, out_dir: Path) -> Path:
        path = out_dir / self.name
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(self.header)
            for row in self.rows:
                writer.writerow([format_cell(x) for x in row])
        return path


@dataclass
class MatrixOutput:
    """A matrix artifact in the ``{dims, real, imag}`` layout."""

    name: str
    matrix: np.ndarray
    dims: Tuple[int, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "dims": list(self.dims)}

    def write(self, out_dir: Path) -> Path:
        path = out_dir / self.name
        save_matrix(path, self.matrix, self.dims)
        return path


@dataclass
class ExperimentResult:
    """
    Everything an experiment produced, held in memory until written.

    Attributes:
        kind: Experiment kind
        tables: CSV artifacts
        summary: Fitted parameters and error ledgers
        checks: Named pass/fail outcomes
        matrices: Matrix artifacts
    """

    kind: str
    tables: List[TableOutput] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)
    matrices: List[MatrixOutput] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for the summary file."""
        return {
            "kind": self.kind,
            "passed": self.passed,
            "checks": {name: bool(ok) for name, ok in self.checks.items()},
            "summary": _plain(self.summary),
            "tables": [t.to_dict() for t in self.tables],
            "matrices": [m.to_dict() for m in self.matrices],
        }


def _plain(value: Any) -> Any:
    """numpy scalars and arrays to JSON-ready Python values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


class ExperimentWorkflow:
    """
    Base class for one experiment kind.

    Subclasses implement ``compute``; ``run`` shows the outcome and writes the
    artifacts only once every computation has succeeded.
    """

    kind = ""

    def __init__(
        self,
        experiment: ExperimentBase,
        policy: NumericPolicy,
        console: Optional[Console] = None,
        verbose: bool = False,
        dry_run: bool = False,
        workers: int = 1,
        timestamp: bool = True,
    ):
        """Initialize experiment workflow.

        Args:
            experiment: Validated experiment document
            policy: Numeric policy with settings and experiment overrides applied
            console: Rich console for output
            verbose: Enable verbose output
            dry_run: Compute and report without writing artifacts
            workers: Size of the sweep worker pool
            timestamp: Stamp the summary JSON with the wall-clock time
        """
        self.experiment = experiment
        self.policy = policy
        self.console = console or Console()
        self.verbose = verbose
        self.dry_run = dry_run
        self.workers = max(1, int(workers))
        self.timestamp = timestamp

    @property
    def prefix(self) -> str:
        return self.experiment.prefix

    def rng(self, stream: int = 0) -> np.random.Generator:
        """Generator seeded by the experiment seed; ``stream`` separates independent uses."""
        return np.random.default_rng([self.experiment.seed, stream])

    def sweep(self, fn: Callable[[T], R], items: Sequence[T]) -> List[R]:
        """Map ``fn`` over ``items`` in order, on a process pool when workers > 1."""
        items = list(items)
        if self.workers == 1 or len(items) < 2:
            return [fn(item) for item in items]
        logger.debug(f"Dispatching {len(items)} sweep entries to {self.workers} workers")
        with ProcessPoolExecutor(max_workers=min(self.workers, len(items))) as pool:
            return list(pool.map(fn, items))

    def compute(self) -> ExperimentResult:
        raise NotImplementedError

    def run(self, out_dir: Path) -> ExperimentResult:
        """
        Compute, display and write the experiment.

        Raises:
            MixphaseError: From any computation; nothing is written in that case
        """
        title = self.experiment.name or self.prefix
        self.console.print(f"\n[bold cyan]Running {self.kind} experiment:[/bold cyan] {title}")
        logger.info(f"Experiment {title} (kind={self.kind}, seed={self.experiment.seed})")

        result = self.compute()
        self._display(result)

        if self.dry_run:
            self.console.print("\n[yellow]Dry run - no files written[/yellow]")
            return result

        self._write(result, Path(out_dir))
        return result

    def _display(self, result: ExperimentResult) -> None:
        table = Table(title=f"{self.kind} summary")
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", style="green")
        for key, value in result.summary.items():
            if isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(
                value, bool
            ):
                table.add_row(key, format_cell(value))
            elif isinstance(value, (str, bool)):
                table.add_row(key, str(value))
        for name, ok in result.checks.items():
            table.add_row(name, "[green]pass[/green]" if ok else "[red]fail[/red]")
        self.console.print(table)

    def _write(self, result: ExperimentResult, out_dir: Path) -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        written = [t.write(out_dir) for t in result.tables]
        written += [m.write(out_dir) for m in result.matrices]

        summary: Dict[str, Any] = {}
        if self.timestamp:
            summary["timestamp"] = datetime.now().isoformat()
        summary["experiment"] = self.experiment.model_dump(mode="json")
        summary.update(result.to_dict())
        summary_path = out_dir / f"{self.prefix}_summary.json"
        summary_path.write_text(json.dumps(summary, indent=2) + "\n")
        written.append(summary_path)

        for path in written:
            logger.debug(f"Wrote {path}")
            if self.verbose:
                self.console.print(f"[dim]Wrote: {path}[/dim]")
        self.console.print(f"[green]✓[/green] {len(written)} files written to {out_dir}")
