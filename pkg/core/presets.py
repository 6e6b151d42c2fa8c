"""
Figure Presets

Versioned parameter tables for the published figure datasets and the runner that
turns a preset into CSV tables, contour files and manifests.

Conventions shared by every preset: Omega = omega = 1 and omega_c from config.
- fig2*: excitation energies and energy densities versus chi;
  (a,b) alpha = 0, g0 = 0.249 and (c,d) alpha = 2, g0 = 0.251; a/c with one
  ancilla photon, b/d without.
- fig3a/b: position variance versus chi (main n = 1, insert n = 0);
  fig3c: dressed coupling chi_n versus chi for alpha = 2.
- fig4*: order parameter over (chi, g0) with the NP/SP (psi_q) and SP/UP (s = 0) contours;
  (a) alpha = 2, n = 1, (b) alpha = 0, n = 1 and (c) alpha = 2, n = 0.
- fig5*: finite-N order parameter versus chi for each N in config.fig5_n_values;
  the g0 of panels b/c is not given with the figure and is taken from fig2a.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from config import config
from core.finite_ed import EDConfig
from core.model import ModelParams
from core.sweep import (
    AxisSpec,
    Contour,
    SweepRecord,
    build_manifest,
    extract_contour,
    run_sweep,
    write_contours,
    write_manifest,
    write_table,
)
from utils.file_handler import ensure_directory_exists

logger = logging.getLogger(__name__)

PRESET_VERSION = "2"


class FigureName(str, Enum):
    """Figure datasets that can be regenerated."""
    FIG2A = "fig2a"
    FIG2B = "fig2b"
    FIG2C = "fig2c"
    FIG2D = "fig2d"
    FIG3A = "fig3a"
    FIG3B = "fig3b"
    FIG3C = "fig3c"
    FIG4A = "fig4a"
    FIG4B = "fig4b"
    FIG4C = "fig4c"
    FIG5A = "fig5a"
    FIG5B = "fig5b"
    FIG5C = "fig5c"


@dataclass(frozen=True)
class PanelSpec:
    """One dataset of a figure."""
    label: str
    params: ModelParams
    axes: Tuple[AxisSpec, ...]
    backend: str = "analytic"
    contour_fields: Tuple[str, ...] = ()


@dataclass(frozen=True)
class FigurePreset:
    name: str
    description: str
    panels: Tuple[PanelSpec, ...]


@dataclass
class PanelOutput:
    """Files and records produced for one panel."""
    panel: PanelSpec
    records: List[SweepRecord]
    files: List[Path]
    contours: List[Contour]


def _params(alpha: float, g0: float, n: int) -> ModelParams:
    return ModelParams(Omega=1.0, omega=1.0, alpha=alpha, g0=g0, n=n)


def _chi(start: float, stop: float, count: int) -> AxisSpec:
    return AxisSpec(name="chi", start=start, stop=stop, count=count)


# (alpha, g0) of the a/b and c/d configurations
WEAK_A2 = (0.0, 0.249)
STRONG_A2 = (2.0, 0.251)

NARROW_CHI = _chi(0.0, 0.15, 301)
WIDE_CHI = _chi(0.0, 2.0, 401)
FIG4_NARROW = (_chi(0.03, 0.12, 91), AxisSpec(name="g0", start=0.24, stop=0.27, count=61))
FIG4_WIDE = (_chi(0.01, 0.30, 146), AxisSpec(name="g0", start=0.24, stop=0.26, count=61))
PHASE_CONTOURS = ("psi_q", "s")

# finite-N chi windows; the fig5a window starts where the N = 100 field occupation still fits max_cutoff
FIG5_WINDOWS = {
    FigureName.FIG5A: _chi(0.049, 0.075, 14),
    FigureName.FIG5B: _chi(0.02, 0.15, 14),
    FigureName.FIG5C: _chi(0.2, 2.0, 19),
}


def _fig5_panels(name: FigureName, n_values: Sequence[int]) -> Tuple[PanelSpec, ...]:
    sizes = AxisSpec(name="N", values=tuple(n_values))
    window = FIG5_WINDOWS[name]
    if name == FigureName.FIG5A:
        cases = [("main", _params(*STRONG_A2, 1)), ("insert", _params(*STRONG_A2, 0))]
    elif name == FigureName.FIG5B:
        cases = [("main", _params(*WEAK_A2, 1))]
    else:
        cases = [("main", _params(*WEAK_A2, 0))]
    return tuple(PanelSpec(label=label, params=p, axes=(sizes, window), backend="ed") for label, p in cases)


def get_preset(name: FigureName, n_values: Optional[Sequence[int]] = None) -> FigurePreset:
    """
    Look up the preset of a figure panel.

    Args:
        name: Figure panel
        n_values: Spin counts of the finite-N presets; defaults to config.fig5_n_values

    Returns:
        FigurePreset
    """
    name = FigureName(name)
    n_values = list(n_values or config.fig5_n_values)

    if name in (FigureName.FIG2A, FigureName.FIG2B, FigureName.FIG2C, FigureName.FIG2D):
        coupling = WEAK_A2 if name in (FigureName.FIG2A, FigureName.FIG2B) else STRONG_A2
        n = 1 if name in (FigureName.FIG2A, FigureName.FIG2C) else 0
        return FigurePreset(
            name=name.value,
            description=f"Excitation energies and E_g/N versus chi (alpha={coupling[0]:g}, g0={coupling[1]:g}, n={n})",
            panels=(PanelSpec(label="main", params=_params(*coupling, n), axes=(NARROW_CHI,)),),
        )

    if name in (FigureName.FIG3A, FigureName.FIG3B, FigureName.FIG3C):
        coupling = WEAK_A2 if name == FigureName.FIG3A else STRONG_A2
        quantity = "chi_n" if name == FigureName.FIG3C else "Delta x"
        return FigurePreset(
            name=name.value,
            description=f"{quantity} versus chi (alpha={coupling[0]:g}); main n=1, insert n=0",
            panels=(
                PanelSpec(label="main", params=_params(*coupling, 1), axes=(NARROW_CHI,)),
                PanelSpec(label="insert", params=_params(*coupling, 0), axes=(WIDE_CHI,)),
            ),
        )

    if name in (FigureName.FIG4A, FigureName.FIG4B, FigureName.FIG4C):
        axes = FIG4_WIDE if name == FigureName.FIG4B else FIG4_NARROW
        alpha = 0.0 if name == FigureName.FIG4B else 2.0
        n = 0 if name == FigureName.FIG4C else 1
        return FigurePreset(
            name=name.value,
            description=f"psi_q over (chi, g0) for alpha={alpha:g}, n={n}",
            panels=(
                PanelSpec(label="main", params=_params(alpha, 0.25, n), axes=axes, contour_fields=PHASE_CONTOURS),
            ),
        )

    return FigurePreset(
        name=name.value,
        description=f"Finite-N psi_q versus chi for N in {n_values}",
        panels=_fig5_panels(name, n_values),
    )


def contour_levels() -> Dict[str, float]:
    """Iso-values of the phase-boundary contours."""
    return {"psi_q": config.contour_level, "s": 0.0}


def run_preset(
    name: FigureName,
    output_dir: Path,
    n_values: Optional[Sequence[int]] = None,
    ed_config: Optional[EDConfig] = None,
    max_workers: Optional[int] = None,
    on_point: Optional[Callable[[], None]] = None,
) -> List[PanelOutput]:
    """
    Generate every dataset of a figure preset.

    Writes <fig>_<panel>.csv, <fig>_<panel>_manifest.json and, for 2-D panels
    with contours, <fig>_<panel>_contours.json into output_dir.

    Returns:
        One PanelOutput per panel
    """
    preset = get_preset(name, n_values)
    directory = ensure_directory_exists(output_dir)
    outputs = []

    for panel in preset.panels:
        backend = (ed_config or EDConfig()) if panel.backend == "ed" else "analytic"
        stem = f"{preset.name}_{panel.label}"
        logger.info("Generating %s", stem)
        records = run_sweep(panel.params, panel.axes, backend=backend, max_workers=max_workers, on_point=on_point)

        table = directory / f"{stem}.csv"
        write_table(records, table)
        files = [table]

        contours = []
        if panel.contour_fields:
            levels = contour_levels()
            contours = [
                Contour(column=column, level=levels[column], polylines=extract_contour(records, column, levels[column]))
                for column in panel.contour_fields
            ]
            contour_file = directory / f"{stem}_contours.json"
            write_contours(contours, contour_file)
            files.append(contour_file)

        manifest = build_manifest(
            panel.params,
            panel.axes,
            backend,
            records,
            preset=preset.name,
            preset_version=PRESET_VERSION,
            files=[path.name for path in files],
        )
        manifest_file = directory / f"{stem}_manifest.json"
        write_manifest(manifest, manifest_file)
        files.append(manifest_file)

        outputs.append(PanelOutput(panel=panel, records=records, files=files, contours=contours))

    return outputs
