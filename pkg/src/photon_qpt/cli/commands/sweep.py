"""
Sweep Command for the Photon-Triggered QPT Engine CLI
"""

from pathlib import Path
from typing import List, Optional

import typer

from core.model import ModelError
from core.sweep import InvalidAxisError, SweepError, build_manifest, run_sweep, write_manifest, write_table

from .. import options


def sweep(
    axis: List[str] = typer.Option(..., "--axis", "-a", help="Axis as name=start:stop:count or name=v1,v2 (repeat for 2-D)"),
    backend: str = typer.Option("analytic", "--backend", "-b", help="analytic or ed"),
    Omega: float = options.OMEGA_SPIN,
    omega: float = options.OMEGA_FIELD,
    omega_c: Optional[float] = options.OMEGA_ANCILLA,
    lam: Optional[float] = options.LAMBDA,
    chi: Optional[float] = options.CHI,
    alpha: float = options.ALPHA,
    g0: float = options.G0,
    n: int = options.PHOTONS,
    N: Optional[int] = typer.Option(None, "--N", help="Number of spins (required by the ed backend unless swept)"),
    cutoff: Optional[int] = options.FOCK_CUTOFF,
    max_cutoff: int = options.MAX_CUTOFF,
    cutoff_tol: float = options.CUTOFF_TOL,
    frame: Optional[str] = options.FRAME,
    output_dir: Optional[Path] = options.OUTPUT_DIR,
    workers: Optional[int] = options.WORKERS,
    quiet: bool = options.QUIET,
):
    """Evaluate a 1-D or 2-D parameter grid and write sweep.csv and manifest.json."""
    console = options.err_console()
    axes = options.parse_axes(axis)
    if backend not in ("analytic", "ed"):
        raise typer.BadParameter("must be 'analytic' or 'ed'", param_hint="--backend")
    base = options.build_params(Omega, omega, omega_c, lam, chi, alpha, g0, n, N=N, require_coupling=False)
    resolved = options.build_ed_config(cutoff, max_cutoff, cutoff_tol, frame) if backend == "ed" else "analytic"
    target = options.resolve_output_dir(output_dir)

    total = 1
    for spec in axes:
        total *= len(spec)

    try:
        with options.sweep_progress(console, quiet) as progress:
            task = progress.add_task("Sweeping", total=total)
            records = run_sweep(base, axes, backend=resolved, max_workers=workers, on_point=lambda: progress.advance(task))

        write_table(records, target / "sweep.csv")
        manifest = build_manifest(base, axes, resolved, records, files=["sweep.csv"])
        manifest_path = target / "manifest.json"
        write_manifest(manifest, manifest_path)
    except InvalidAxisError as e:
        raise typer.BadParameter(str(e), param_hint="--axis") from e
    except (SweepError, ModelError) as e:
        console.print(f"[red]✗[/red] Sweep failed: {e}")
        raise typer.Exit(code=1)

    if not quiet:
        counts = ", ".join(f"{status}={count}" for status, count in manifest.status_counts.items())
        console.print(f"[green]✓[/green] {len(records)} points ({counts})")
    typer.echo(str(manifest_path))
