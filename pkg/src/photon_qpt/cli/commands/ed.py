"""
ED Command for the Photon-Triggered QPT Engine CLI

Finite-N order-parameter study: one exact-diagonalization sweep over the
coupling axis for every requested N, with the analytic order parameter alongside.
"""

from pathlib import Path
from typing import List, Optional

import typer
from rich.table import Table

from core.model import ModelError
from core.sweep import AxisSpec, InvalidAxisError, SweepError, build_manifest, run_sweep, write_manifest, write_table

from .. import options


def ed(
    N: List[int] = typer.Option(..., "--N", help="Number of spins (repeat for several N)"),
    axis: str = typer.Option(..., "--axis", "-a", help="Coupling axis, e.g. chi=0.049:0.075:14"),
    Omega: float = options.OMEGA_SPIN,
    omega: float = options.OMEGA_FIELD,
    omega_c: Optional[float] = options.OMEGA_ANCILLA,
    alpha: float = options.ALPHA,
    g0: float = options.G0,
    n: int = options.PHOTONS,
    cutoff: Optional[int] = options.FOCK_CUTOFF,
    max_cutoff: int = options.MAX_CUTOFF,
    cutoff_tol: float = options.CUTOFF_TOL,
    frame: Optional[str] = options.FRAME,
    output_dir: Optional[Path] = options.OUTPUT_DIR,
    workers: Optional[int] = options.WORKERS,
    quiet: bool = options.QUIET,
):
    """Run the finite-N exact-diagonalization study and write one CSV per N."""
    console = options.err_console()
    coupling_axis = options.parse_axes([axis])[0]
    if coupling_axis.name not in ("chi", "lambda"):
        raise typer.BadParameter("the ED axis must be chi or lambda", param_hint="--axis")
    if any(size < 1 for size in N):
        raise typer.BadParameter("N must be >= 1", param_hint="--N")

    base = options.build_params(Omega, omega, omega_c, None, None, alpha, g0, n, require_coupling=False)
    ed_config = options.build_ed_config(cutoff, max_cutoff, cutoff_tol, frame)
    target = options.resolve_output_dir(output_dir)
    sizes = list(dict.fromkeys(N))
    axes = [AxisSpec(name="N", values=tuple(sizes)), coupling_axis]

    try:
        with options.sweep_progress(console, quiet) as progress:
            task = progress.add_task("Diagonalizing", total=len(sizes) * len(coupling_axis))
            records = run_sweep(base, axes, backend=ed_config, max_workers=workers, on_point=lambda: progress.advance(task))

        files = []
        for size in sizes:
            name = f"ed_N{size}.csv"
            write_table([record for record in records if record.coordinates["N"] == size], target / name)
            files.append(name)

        manifest = build_manifest(base, axes, ed_config, records, files=files)
        manifest_path = target / "manifest.json"
        write_manifest(manifest, manifest_path)
    except InvalidAxisError as e:
        raise typer.BadParameter(str(e), param_hint="--axis") from e
    except (SweepError, ModelError) as e:
        console.print(f"[red]✗[/red] ED study failed: {e}")
        raise typer.Exit(code=1)

    if not quiet:
        table = Table(title="Finite-N Convergence")
        table.add_column("N", style="cyan")
        table.add_column("Points", style="magenta")
        table.add_column("Converged", style="green")
        table.add_column("Largest cutoff", style="yellow")
        for size in sizes:
            rows = [record for record in records if record.coordinates["N"] == size]
            converged = sum(1 for record in rows if record.values.get("converged"))
            cutoffs = [record.values["cutoff_used"] for record in rows if record.values.get("cutoff_used") is not None]
            table.add_row(str(size), str(len(rows)), str(converged), str(max(cutoffs)) if cutoffs else "-")
        console.print(table)

    typer.echo(str(manifest_path))
