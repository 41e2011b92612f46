"""Main CLI entry point for mixphase.

Implements git-like command structure:
- mixphase run --config PATH
- mixphase (timer|switch|compile|qa|condense|nogo|evolve) PATH
- mixphase validate PATH
- mixphase config (set|list)
"""

import logging
import sys
from pathlib import Path
from typing import Optional

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

from mixphase.config import KINDS, Config, ExperimentBase, load_experiment
from mixphase.utils.errors import ConfigError, MixphaseError, NumericGuardError, ValidationError

console = Console()

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC_GUARD = 3


def get_config() -> Optional[Config]:
    """
    Get settings instance with error handling.

    Returns:
        Config | None: Config instance or None if the settings file is broken
    """
    try:
        return Config()
    except ConfigError as e:
        console.print(f"[red]Error:[/red] {escape(str(e))}")
        return None


def setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


@click.group()
@click.option(
    "--verbose",
    "-v",
    is_flag=True,
    help="Enable verbose output",
)
@click.option(
    "--dry-run",
    is_flag=True,
    help="Compute and report without writing any files",
)
@click.pass_context
def cli(ctx, verbose: bool, dry_run: bool):
    """mixphase - mixed-state phases under fast dissipative evolution."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    ctx.obj["dry_run"] = dry_run
    setup_logging(verbose)


# ============================================================================
# Experiment Commands
# ============================================================================


def execute(
    ctx,
    config_path: Path,
    out: Optional[Path],
    workers: Optional[int],
    seed: Optional[int],
    expected_kind: Optional[str] = None,
) -> None:
    """Load, run and exit with the mapped status code."""
    from mixphase.workflows import build_workflow

    settings = get_config()
    if settings is None:
        sys.exit(EXIT_CONFIG)

    try:
        experiment = load_experiment(config_path)
        if expected_kind is not None and experiment.kind != expected_kind:
            raise ConfigError(f"kind: expected '{expected_kind}', got '{experiment.kind}'")
        if seed is not None:
            experiment = experiment.model_copy(update={"seed": seed})
        policy = settings.numeric_policy().with_overrides(experiment.numeric.model_dump())
        workflow = build_workflow(
            experiment,
            policy,
            console=console,
            verbose=ctx.obj.get("verbose", False),
            dry_run=ctx.obj.get("dry_run", False),
            workers=workers if workers is not None else settings.workers(),
            timestamp=settings.timestamp(),
        )
        result = workflow.run(out if out is not None else settings.output_dir())

    except (ConfigError, ValidationError) as e:
        console.print(f"[red]Error:[/red] {escape(str(e))}")
        sys.exit(EXIT_CONFIG)
    except NumericGuardError as e:
        console.print(f"[red]Error:[/red] numeric guard '{e.guard}' breached: {escape(str(e))}")
        sys.exit(EXIT_NUMERIC_GUARD)
    except MixphaseError as e:
        console.print(f"[red]Error:[/red] {escape(str(e))}")
        sys.exit(EXIT_FAILED)

    if not result.passed:
        failed = ", ".join(name for name, ok in result.checks.items() if not ok)
        console.print(f"[yellow]Warning:[/yellow] failed checks: {failed}")
        sys.exit(EXIT_FAILED)
    sys.exit(EXIT_OK)


def run_options(fn):
    """Options shared by ``run`` and the per-kind aliases."""
    fn = click.option(
        "--seed",
        type=click.IntRange(0, 2**64 - 1),
        help="Override the experiment seed",
    )(fn)
    fn = click.option(
        "--workers",
        "-w",
        type=click.IntRange(min=1),
        help="Sweep worker processes (default: [run] workers setting)",
    )(fn)
    fn = click.option(
        "--out",
        "-o",
        type=click.Path(file_okay=False, path_type=Path),
        help="Output directory (default: [run] output_dir setting)",
    )(fn)
    return fn


@cli.command()
@click.option(
    "--config",
    "-c",
    "config_path",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="Experiment JSON document",
)
@run_options
@click.pass_context
def run(ctx, config_path: Path, out: Optional[Path], workers: Optional[int], seed: Optional[int]):
    """Run the experiment described by a JSON document."""
    execute(ctx, config_path, out, workers, seed)


def make_alias(kind: str) -> click.Command:
    @click.argument("config_path", type=click.Path(dir_okay=False, path_type=Path))
    @run_options
    @click.pass_context
    def alias(ctx, config_path: Path, out, workers, seed):
        execute(ctx, config_path, out, workers, seed, expected_kind=kind)

    alias.__doc__ = f"Run a '{kind}' experiment.\n\n    CONFIG_PATH: Experiment JSON document"
    return cli.command(kind)(alias)


for _kind in KINDS:
    make_alias(_kind)


@cli.command()
@click.argument("config_path", type=click.Path(dir_okay=False, path_type=Path))
def validate(config_path: Path):
    """
    Check an experiment document without running it.

    CONFIG_PATH: Experiment JSON document
    """
    try:
        experiment: ExperimentBase = load_experiment(config_path)
    except ConfigError as e:
        console.print(f"[red]Error:[/red] {escape(str(e))}")
        sys.exit(EXIT_CONFIG)

    table = Table(title=f"Experiment: {experiment.name or experiment.prefix}")
    table.add_column("Field", style="cyan")
    table.add_column("Value")
    table.add_row("kind", experiment.kind)
    table.add_row("seed", str(experiment.seed))
    table.add_row("output prefix", experiment.prefix)
    overrides = experiment.numeric.model_dump(exclude_none=True)
    for key, value in overrides.items():
        table.add_row(f"numeric.{key}", str(value))
    console.print(table)
    console.print(f"[green]✓[/green] {config_path} is valid")


# ============================================================================
# Config Commands
# ============================================================================


@cli.group()
def config():
    """Manage settings."""
    pass


@config.command()
@click.argument("key")
@click.argument("value")
@click.option(
    "--target",
    type=click.Choice(["local", "user"]),
    help="Where to save (default: active settings file or local)",
)
@click.pass_context
def set(ctx, key: str, value: str, target: Optional[str]):
    """
    Set a settings value.

    KEY: Settings key in format 'section.key'
    VALUE: Value to set
    """
    cfg = get_config()
    if cfg is None:
        sys.exit(EXIT_CONFIG)

    try:
        if "." not in key:
            console.print(
                "[red]Error:[/red] Key must be in format 'section.key' "
                "(e.g., 'numeric.dense_dim_limit')"
            )
            sys.exit(EXIT_FAILED)

        section, key_name = key.rsplit(".", 1)

        if ctx.obj.get("dry_run"):
            console.print(f"[yellow]Dry run:[/yellow] Would set {section}.{key_name} = {value}")
        else:
            cfg.set(section, key_name, value)
            cfg.save(target=target)
            console.print(f"[green]✓[/green] Set {section}.{key_name} = {value}")

    except MixphaseError as e:
        console.print(f"[red]Error:[/red] {escape(str(e))}")
        sys.exit(EXIT_FAILED)


def _section_table(title: str, items) -> Table:
    table = Table(title=title)
    table.add_column("Key", style="cyan")
    table.add_column("Value")
    for key, value in items.items():
        table.add_row(key, value)
    return table


@config.command("list")
@click.option(
    "--section",
    "-s",
    help="Show only specific section",
)
def list_config(section: Optional[str]):
    """Display settings values."""
    cfg = get_config()
    if cfg is None:
        sys.exit(EXIT_CONFIG)

    if section:
        items = cfg.get_all(section)
        if not items:
            console.print(f"[yellow]Section '{section}' is empty or does not exist.[/yellow]")
            sys.exit(EXIT_OK)
        console.print(_section_table(f"Settings: {section}", items))
        return

    sections = cfg.get_sections()
    if not sections:
        console.print("[yellow]Settings are empty; built-in defaults apply.[/yellow]")
        sys.exit(EXIT_OK)

    for sec in sections:
        console.print(_section_table(escape(f"[{sec}]"), cfg.get_all(sec)))
        console.print()


def main():
    """Main entry point."""
    cli(obj={})


if __name__ == "__main__":
    main()
