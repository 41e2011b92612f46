"""CLI framework for mixphase."""

from mixphase.cli.main import cli, main

__all__ = ["cli", "main"]
