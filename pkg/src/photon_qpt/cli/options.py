"""
Shared CLI options and helpers for the Photon-Triggered QPT Engine
"""

import json
from pathlib import Path
from typing import Any, List, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn

from config import config
from core.finite_ed import EDConfig
from core.model import ModelParams, coupling_from_chi
from core.sweep import AxisSpec, InvalidAxisError

OMEGA_SPIN = typer.Option(1.0, "--Omega", help="Spin transition frequency Omega")
OMEGA_FIELD = typer.Option(1.0, "--omega", help="Field frequency omega")
OMEGA_ANCILLA = typer.Option(None, "--omega-c", help="Ancilla frequency omega_c (default from config)")
LAMBDA = typer.Option(None, "--lambda", help="Spin-field coupling lambda (exclusive with --chi)")
CHI = typer.Option(None, "--chi", help="Rescaled coupling chi = 2 lambda/sqrt(Omega omega) (exclusive with --lambda)")
ALPHA = typer.Option(0.0, "--alpha", help="A^2-term coefficient alpha")
G0 = typer.Option(0.0, "--g0", help="Quadratic optomechanical coupling g0")
PHOTONS = typer.Option(0, "--n", help="Ancilla Fock number n")
OUTPUT_DIR = typer.Option(None, "--output-dir", "-o", help="Output directory (default from config)")
WORKERS = typer.Option(None, "--workers", "-w", help="Worker threads (default from config)")
QUIET = typer.Option(False, "--quiet", "-q", help="Suppress progress output")

FOCK_CUTOFF = typer.Option(None, "--cutoff", help="Initial Fock cutoff M (default: auto)")
MAX_CUTOFF = typer.Option(4096, "--max-cutoff", help="Largest Fock cutoff")
CUTOFF_TOL = typer.Option(1e-6, "--cutoff-tol", help="Relative convergence tolerance on <b^dag b>")
FRAME = typer.Option(None, "--frame", help="ED frame: dressed or bare (default from config)")


def err_console() -> Console:
    """Console for human-facing messages; stdout carries command output only."""
    return Console(stderr=True)


def build_params(
    Omega: float,
    omega: float,
    omega_c: Optional[float],
    lam: Optional[float],
    chi: Optional[float],
    alpha: float,
    g0: float,
    n: int,
    N: Optional[int] = None,
    require_coupling: bool = True,
) -> ModelParams:
    """
    Model parameters from CLI flags.

    Raises:
        typer.BadParameter: On conflicting, missing or invalid flags
    """
    if lam is not None and chi is not None:
        raise typer.BadParameter("--lambda and --chi are mutually exclusive")
    if require_coupling and lam is None and chi is None:
        raise typer.BadParameter("one of --lambda or --chi is required")

    fields: dict = {"Omega": Omega, "omega": omega, "alpha": alpha, "g0": g0, "n": n, "lam": lam or 0.0}
    if omega_c is not None:
        fields["omega_c"] = omega_c
    if N is not None:
        fields["N"] = N
    try:
        if chi is not None:
            if Omega <= 0 or omega <= 0:
                raise typer.BadParameter("--Omega and --omega must be > 0")
            fields["lam"] = coupling_from_chi(Omega, omega, chi)
        return ModelParams(**fields)
    except ValidationError as e:
        raise typer.BadParameter(_first_error(e)) from e


def _first_error(error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    return f"{location}: {first['msg']}"


def parse_axes(texts: List[str]) -> List[AxisSpec]:
    """Parse repeated --axis flags."""
    try:
        return [AxisSpec.parse(text) for text in texts]
    except InvalidAxisError as e:
        raise typer.BadParameter(str(e), param_hint="--axis") from e


def build_ed_config(
    cutoff: Optional[int],
    max_cutoff: int,
    cutoff_tol: float,
    frame: Optional[str],
) -> EDConfig:
    """EDConfig from CLI flags."""
    fields: dict = {"max_cutoff": max_cutoff, "cutoff_tol": cutoff_tol}
    if cutoff is not None:
        fields["fock_cutoff"] = cutoff
    if frame is not None:
        fields["frame"] = frame
    try:
        return EDConfig(**fields)
    except ValidationError as e:
        raise typer.BadParameter(_first_error(e)) from e


def resolve_output_dir(output_dir: Optional[Path]) -> Path:
    return Path(output_dir) if output_dir is not None else Path(config.output_dir)


def sweep_progress(console: Console, quiet: bool) -> Progress:
    """Progress bar for grid evaluation."""
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        console=console,
        disable=quiet,
        transient=True,
    )


def echo_json(document: Any) -> None:
    """Print a JSON document on stdout."""
    typer.echo(json.dumps(document))
