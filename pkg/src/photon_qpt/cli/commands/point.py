"""
Point Command for the Photon-Triggered QPT Engine CLI
"""

from typing import Optional

import typer

from core.model import ModelError
from core.thermo_limit import ThermoLimitError, solve_point

from .. import options


def point(
    Omega: float = options.OMEGA_SPIN,
    omega: float = options.OMEGA_FIELD,
    omega_c: Optional[float] = options.OMEGA_ANCILLA,
    lam: Optional[float] = options.LAMBDA,
    chi: Optional[float] = options.CHI,
    alpha: float = options.ALPHA,
    g0: float = options.G0,
    n: int = options.PHOTONS,
):
    """Evaluate one parameter point in the thermodynamic limit and print it as JSON."""
    p = options.build_params(Omega, omega, omega_c, lam, chi, alpha, g0, n)

    try:
        result = solve_point(p)
    except (ModelError, ThermoLimitError) as e:
        options.err_console().print(f"[red]✗[/red] Evaluation failed: {e}")
        raise typer.Exit(code=1)

    options.echo_json(result.as_dict())
