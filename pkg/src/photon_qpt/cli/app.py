#!/usr/bin/env python3
"""
CLI Application for the Photon-Triggered QPT Engine
"""

import logging
import sys
from pathlib import Path

try:
    import typer
    from rich.console import Console
    from rich.logging import RichHandler
    from rich.table import Table
except ImportError:
    print("Required packages not found. Please install:")
    print("pip install typer rich")
    sys.exit(1)

# Add project root to path for imports
project_root = Path(__file__).parent.parent.parent.parent
sys.path.insert(0, str(project_root))

from config import config  # noqa: E402

from .commands import ed, figure, point, sweep  # noqa: E402


app = typer.Typer(
    name="photon-qpt",
    help="Single-photon-triggered superradiant phase transitions: analytic and finite-N solvers",
    no_args_is_help=True,
    add_completion=False,
)

app.command(name="point", help="Evaluate one parameter point (JSON on stdout)")(point.point)
app.command(name="sweep", help="Evaluate a 1-D or 2-D parameter grid")(sweep.sweep)
app.command(name="ed", help="Finite-N exact-diagonalization study")(ed.ed)
app.command(name="figure", help="Regenerate a figure dataset")(figure.figure)


def configure_logging(level: str) -> None:
    """Route library logging to stderr through rich."""
    handler = RichHandler(console=Console(stderr=True), show_path=False)
    logging.basicConfig(level=level, format="%(message)s", handlers=[handler], force=True)


@app.callback()
def main_callback(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable debug logging"),
):
    """Photon-Triggered QPT Engine CLI"""
    configure_logging("DEBUG" if verbose else config.log_level)


@app.command()
def status():
    """Show versions and the active configuration."""
    import numpy
    import scipy

    from core import __version__

    console = Console()

    table = Table(title="Engine Status")
    table.add_column("Component", style="cyan")
    table.add_column("Value", style="green")

    table.add_row("photon-qpt", __version__)
    table.add_row("numpy", numpy.__version__)
    table.add_row("scipy", scipy.__version__)
    for key, value in config.model_dump().items():
        table.add_row(key, str(value))

    console.print(table)


if __name__ == "__main__":
    app()
