"""
Figure Command for the Photon-Triggered QPT Engine CLI
"""

from pathlib import Path
from typing import Optional

import typer

from core.model import ModelError
from core.presets import FigureName, get_preset, run_preset
from core.sweep import SweepError

from .. import options


def figure(
    name: FigureName = typer.Argument(..., help="Figure panel to regenerate"),
    output_dir: Optional[Path] = options.OUTPUT_DIR,
    workers: Optional[int] = options.WORKERS,
    quiet: bool = options.QUIET,
):
    """Regenerate the dataset behind a published figure panel."""
    console = options.err_console()
    preset = get_preset(name)
    target = options.resolve_output_dir(output_dir)

    if not quiet:
        console.print(f"[bold blue]{preset.name}[/bold blue]: {preset.description}")

    total = 0
    for panel in preset.panels:
        points = 1
        for spec in panel.axes:
            points *= len(spec)
        total += points

    try:
        with options.sweep_progress(console, quiet) as progress:
            task = progress.add_task(preset.name, total=total)
            outputs = run_preset(name, target, max_workers=workers, on_point=lambda: progress.advance(task))
    except (SweepError, ModelError) as e:
        console.print(f"[red]✗[/red] Figure generation failed: {e}")
        raise typer.Exit(code=1)

    for output in outputs:
        if not quiet:
            console.print(f"[green]✓[/green] {output.panel.label}: {len(output.records)} points")
        typer.echo(str(output.files[-1]))
