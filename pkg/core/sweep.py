"""
Parameter Sweep Module

Evaluates the model on 1-D or 2-D parameter grids with either the analytic
thermodynamic-limit solver or the finite-N exact-diagonalization backend, extracts
level-set contours from 2-D grids and writes reproducible CSV tables and JSON
manifests.

Records are always returned in row-major grid order (first axis outermost),
whatever the number of worker threads.
"""

import csv
import io
import itertools
import json
import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from config import config
from core import __version__
from core.finite_ed import (
    CutoffCeilingError,
    EDConfig,
    EDResult,
    ExactDiagonalizationError,
    converge_cutoff,
)
from core.model import ModelError, ModelParams, PhaseLabel, coupling_from_chi, dressed_frame
from core.thermo_limit import ThermoLimitError, solve_point
from utils.file_handler import FileHandlerError, write_text_file
from utils.marching_squares import Point, extract_isolines

logger = logging.getLogger(__name__)

AXIS_NAMES = ("chi", "g0", "lambda", "N", "n", "alpha")
INTEGER_AXES = ("N", "n")

ANALYTIC_COLUMNS = (
    "phase", "chi", "s", "chi_n", "omega_minus", "omega_plus", "theta", "eg_density",
    "psi_q", "coherence", "delta_x", "beta", "nu", "ratio_Omega_omega_n",
)
ED_COLUMNS = (
    "chi", "s", "ground_energy", "energy_density", "n_b", "jz", "x_mean", "x2_mean", "b_mean",
    "parity", "psi_q", "delta_x", "ratio_Omega_omega_n", "cutoff_used", "converged",
    "splitting", "residual", "frame", "psi_q_analytic",
)

Backend = Union[str, EDConfig]


class SweepError(Exception):
    """Custom exception for sweep errors."""
    pass


class InvalidAxisError(SweepError):
    """Raised when an axis specification is malformed."""
    pass


class NotAGridError(SweepError):
    """Raised when records do not form a complete 2-D grid."""
    pass


class SweepIOError(SweepError):
    """Raised when a table or manifest cannot be written or read."""
    pass


@dataclass(frozen=True)
class AxisSpec:
    """
    One sweep axis: either a linear range (start < stop, count >= 2) or an
    explicit list of values.
    """
    name: str
    start: Optional[float] = None
    stop: Optional[float] = None
    count: Optional[int] = None
    values: Optional[Tuple[float, ...]] = None
    spacing: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise InvalidAxisError(f"Unknown axis '{self.name}'. Must be one of {list(AXIS_NAMES)}")
        if self.spacing != "linear":
            raise InvalidAxisError(f"Unsupported spacing '{self.spacing}'")

        if self.values is not None:
            if any(v is not None for v in (self.start, self.stop, self.count)):
                raise InvalidAxisError(f"Axis '{self.name}': give either a range or a value list, not both")
            values = tuple(self.values)
            if not values:
                raise InvalidAxisError(f"Axis '{self.name}' has no values")
            if not all(math.isfinite(v) for v in values):
                raise InvalidAxisError(f"Axis '{self.name}' has non-finite values")
            object.__setattr__(self, "values", values)
        else:
            if self.start is None or self.stop is None or self.count is None:
                raise InvalidAxisError(f"Axis '{self.name}' needs start, stop and count")
            if not self.start < self.stop:
                raise InvalidAxisError(f"Axis '{self.name}': start must be < stop")
            if self.count < 2:
                raise InvalidAxisError(f"Axis '{self.name}': count must be >= 2")

        if self.name in INTEGER_AXES:
            raw = self._raw_points()
            if not np.allclose(raw, np.rint(raw), rtol=0.0, atol=1e-9):
                raise InvalidAxisError(f"Axis '{self.name}' takes integer values only")

    def _raw_points(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        return np.linspace(self.start, self.stop, self.count)

    def points(self) -> List[Union[int, float]]:
        """Grid coordinates along this axis."""
        raw = self._raw_points()
        if self.name in INTEGER_AXES:
            return [int(v) for v in np.rint(raw)]
        return [float(v) for v in raw]

    def __len__(self) -> int:
        return len(self.values) if self.values is not None else self.count

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "start": self.start,
            "stop": self.stop,
            "count": self.count,
            "values": list(self.values) if self.values is not None else None,
            "spacing": self.spacing,
        }

    @classmethod
    def parse(cls, text: str) -> "AxisSpec":
        """
        Parse 'name=start:stop:count' or 'name=v1,v2,...'.

        Example:
            >>> AxisSpec.parse("chi=0.01:0.2:400").count
            400
        """
        name, sep, body = text.partition("=")
        name, body = name.strip(), body.strip()
        if not sep or not name or not body:
            raise InvalidAxisError(f"Malformed axis '{text}'; expected name=start:stop:count or name=v1,v2")
        convert = int if name in INTEGER_AXES else float
        try:
            if ":" in body:
                start, stop, count = body.split(":")
                return cls(name=name, start=convert(start), stop=convert(stop), count=int(count))
            return cls(name=name, values=tuple(convert(item) for item in body.split(",")))
        except ValueError as e:
            raise InvalidAxisError(f"Malformed axis '{text}': {e}") from e


@dataclass
class SweepRecord:
    """Grid coordinates, observables and evaluation status of one grid point."""
    coordinates: Dict[str, Union[int, float]]
    values: Dict[str, Any]
    status: str
    detail: str = ""

    def row(self) -> Dict[str, Any]:
        """Flat column mapping: axes, then observables, then status."""
        row = dict(self.coordinates)
        row.update((k, v) for k, v in self.values.items() if k not in self.coordinates)
        row["status"] = self.status
        row["detail"] = self.detail
        return row


class SweepManifest(BaseModel):
    """Metadata that fully determines a sweep."""
    tool: str = Field(default="photon-qpt", description="Producing tool")
    tool_version: str = Field(default=__version__, description="Producing tool version")
    preset: Optional[str] = Field(default=None, description="Figure preset name")
    preset_version: Optional[str] = Field(default=None, description="Figure preset table version")
    base: Dict[str, Any] = Field(description="Base model parameters")
    axes: List[Dict[str, Any]] = Field(description="Axis specifications in grid order")
    backend: str = Field(description="analytic or ed")
    ed_config: Optional[Dict[str, Any]] = Field(default=None, description="EDConfig of the ed backend")
    record_count: int = Field(description="Number of grid points")
    status_counts: Dict[str, int] = Field(description="Records per status")
    files: List[str] = Field(default_factory=list, description="Data files written alongside")


@dataclass
class Contour:
    """Level set of one column."""
    column: str
    level: float
    polylines: List[List[Point]] = field(default_factory=list)


def _resolve_backend(backend: Backend) -> Union[str, EDConfig]:
    if isinstance(backend, EDConfig):
        return backend
    if backend == "analytic":
        return "analytic"
    if backend == "ed":
        return EDConfig()
    raise SweepError(f"Unknown backend '{backend}'. Must be 'analytic', 'ed' or an EDConfig")


def backend_name(backend: Backend) -> str:
    return "ed" if isinstance(_resolve_backend(backend), EDConfig) else "analytic"


def point_params(base: ModelParams, coordinates: Dict[str, Union[int, float]]) -> ModelParams:
    """Base parameters with the grid coordinates substituted."""
    changes: Dict[str, Any] = {}
    for name, value in coordinates.items():
        if name == "chi":
            changes["lam"] = coupling_from_chi(base.Omega, base.omega, value)
        elif name == "lambda":
            changes["lam"] = value
        else:
            changes[name] = value
    return base.replace(**changes)


def _evaluate_analytic(p: ModelParams) -> Tuple[Dict[str, Any], str, str]:
    point = solve_point(p)
    status = "unstable" if point.phase == PhaseLabel.UNSTABLE else "ok"
    return point.as_dict(), status, ""


def _ed_values(result: EDResult) -> Dict[str, Any]:
    return {
        "ground_energy": result.ground_energy,
        "energy_density": result.energy_density,
        "n_b": result.n_b,
        "jz": result.jz,
        "x_mean": result.x_mean,
        "x2_mean": result.x2_mean,
        "b_mean": result.b_mean,
        "parity": result.parity,
        "psi_q": result.psi_q,
        "delta_x": result.delta_x,
        "cutoff_used": result.cutoff_used,
        "converged": result.converged,
        "splitting": result.splitting,
        "residual": result.residual,
    }


def _evaluate_ed(p: ModelParams, cfg: EDConfig) -> Tuple[Dict[str, Any], str, str]:
    frame = dressed_frame(p)
    analytic = solve_point(p)
    values: Dict[str, Any] = dict.fromkeys(ED_COLUMNS)
    values.update(
        chi=frame.chi,
        s=frame.s,
        frame=cfg.frame,
        psi_q_analytic=analytic.psi_q,
        ratio_Omega_omega_n=analytic.ratio_Omega_omega_n,
    )
    if analytic.phase == PhaseLabel.UNSTABLE:
        return values, "unstable", f"s = {frame.s:.6g}"

    try:
        result = converge_cutoff(p, cfg)
    except CutoffCeilingError as e:
        result = e.result
    values.update(_ed_values(result))
    return values, ("ok" if result.converged else "unconverged"), ""


def _evaluate(base: ModelParams, coordinates: Dict[str, Union[int, float]], backend: Union[str, EDConfig]) -> SweepRecord:
    columns = ED_COLUMNS if isinstance(backend, EDConfig) else ANALYTIC_COLUMNS
    try:
        p = point_params(base, coordinates)
        if isinstance(backend, EDConfig):
            values, status, detail = _evaluate_ed(p, backend)
        else:
            values, status, detail = _evaluate_analytic(p)
    except (ModelError, ThermoLimitError, ExactDiagonalizationError, ValidationError) as e:
        logger.debug("Point %s failed: %s", coordinates, e)
        return SweepRecord(coordinates=dict(coordinates), values=dict.fromkeys(columns), status="error", detail=str(e).splitlines()[0])
    return SweepRecord(coordinates=dict(coordinates), values=values, status=status, detail=detail)


def _check_axes(base: ModelParams, axes: Sequence[AxisSpec], backend: Union[str, EDConfig]) -> None:
    if not 1 <= len(axes) <= 2:
        raise InvalidAxisError(f"A sweep needs one or two axes, got {len(axes)}")
    names = [axis.name for axis in axes]
    if len(set(names)) != len(names):
        raise InvalidAxisError(f"Duplicate axis in {names}")
    if "chi" in names and "lambda" in names:
        raise InvalidAxisError("chi and lambda cannot both be swept")
    if isinstance(backend, EDConfig) and base.is_thermodynamic_limit and "N" not in names:
        raise InvalidAxisError("The ed backend needs a finite N (set it on the base or sweep an N axis)")


def run_sweep(
    base: ModelParams,
    axes: Sequence[AxisSpec],
    backend: Backend = "analytic",
    max_workers: Optional[int] = None,
    on_point: Optional[Callable[[], None]] = None,
) -> List[SweepRecord]:
    """
    Evaluate every point of a 1-D or 2-D grid.

    Args:
        base: Parameters held fixed across the grid
        axes: One or two axes; the first is outermost
        backend: 'analytic', 'ed' or an EDConfig
        max_workers: Thread pool size (1 = serial); defaults to config
        on_point: Called once per finished point (progress reporting)

    Returns:
        One SweepRecord per grid point in row-major order

    Raises:
        InvalidAxisError: If the axes are malformed
    """
    resolved = _resolve_backend(backend)
    _check_axes(base, axes, resolved)
    workers = max_workers or config.max_workers

    names = [axis.name for axis in axes]
    grid = [dict(zip(names, combo)) for combo in itertools.product(*(axis.points() for axis in axes))]
    logger.info("Sweeping %d points over %s (%s backend, %d workers)", len(grid), names, backend_name(resolved), workers)

    slots: List[Optional[SweepRecord]] = [None] * len(grid)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            future_to_index = {
                executor.submit(_evaluate, base, coordinates, resolved): index
                for index, coordinates in enumerate(grid)
            }
            for future in as_completed(future_to_index):
                slots[future_to_index[future]] = future.result()
                if on_point:
                    on_point()
    else:
        for index, coordinates in enumerate(grid):
            slots[index] = _evaluate(base, coordinates, resolved)
            if on_point:
                on_point()

    records = [record for record in slots if record is not None]
    logger.info("Sweep finished: %s", status_counts(records))
    return records


def status_counts(records: Sequence[SweepRecord]) -> Dict[str, int]:
    """Records per status, keys sorted."""
    counts = Counter(record.status for record in records)
    return {status: counts[status] for status in sorted(counts)}


def extract_contour(records: Sequence[SweepRecord], field: str, level: Optional[float] = None) -> List[List[Point]]:
    """
    Level set of a column over a complete 2-D sweep.

    Args:
        records: Records of a 2-D sweep in grid order
        field: Numeric column name (e.g. 'psi_q' or 's')
        level: Iso-value; defaults to config.contour_level

    Returns:
        Ordered polylines in grid coordinates (first axis, second axis)

    Raises:
        NotAGridError: If the records are not a complete row-major 2-D grid
    """
    if level is None:
        level = config.contour_level
    if not records:
        raise NotAGridError("No records")
    names = list(records[0].coordinates)
    if len(names) != 2:
        raise NotAGridError(f"Contours need a 2-D grid, got axes {names}")

    xs = list(dict.fromkeys(record.coordinates[names[0]] for record in records))
    ys = list(dict.fromkeys(record.coordinates[names[1]] for record in records))
    if len(records) != len(xs) * len(ys):
        raise NotAGridError(f"{len(records)} records do not fill a {len(xs)} x {len(ys)} grid")

    values = np.full((len(xs), len(ys)), np.nan)
    for index, record in enumerate(records):
        i, j = divmod(index, len(ys))
        if list(record.coordinates) != names or (record.coordinates[names[0]], record.coordinates[names[1]]) != (xs[i], ys[j]):
            raise NotAGridError(f"Record {index} is out of row-major grid order")
        row = record.row()
        if field not in row:
            raise SweepError(f"Unknown column '{field}'")
        value = row[field]
        if value is None:
            continue
        if isinstance(value, (bool, str, Enum)):
            raise SweepError(f"Column '{field}' is not numeric")
        values[i, j] = float(value)

    return extract_isolines(values, xs, ys, level)


def format_cell(value: Any, digits: int) -> str:
    """CSV rendering: floats to `digits` significant digits, absent or non-finite values empty."""
    if value is None:
        return ""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return format(value, f".{digits}g") if math.isfinite(value) else ""
    return str(value)


def write_table(records: Sequence[SweepRecord], destination: Union[str, Path], float_digits: Optional[int] = None) -> int:
    """
    Write records as CSV: one header row, grid axes first, then observables, then status.

    Returns:
        Number of bytes written

    Raises:
        SweepError: If there are no records or the column set changes
        SweepIOError: If the file cannot be written
    """
    if not records:
        raise SweepError("Refusing to write an empty table")
    digits = float_digits or config.float_digits

    header = list(records[0].row())
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for record in records:
        row = record.row()
        if list(row) != header:
            raise SweepError(f"Column set changed at {record.coordinates}")
        writer.writerow([format_cell(row[column], digits) for column in header])

    try:
        return write_text_file(destination, buffer.getvalue())
    except FileHandlerError as e:
        raise SweepIOError(str(e)) from e


def build_manifest(
    base: ModelParams,
    axes: Sequence[AxisSpec],
    backend: Backend,
    records: Sequence[SweepRecord],
    **extra: Any,
) -> SweepManifest:
    """Collect the metadata of a finished sweep."""
    resolved = _resolve_backend(backend)
    return SweepManifest(
        base=base.model_dump(by_alias=True),
        axes=[axis.as_dict() for axis in axes],
        backend=backend_name(resolved),
        ed_config=resolved.model_dump() if isinstance(resolved, EDConfig) else None,
        record_count=len(records),
        status_counts=status_counts(records),
        **extra,
    )


def write_manifest(manifest: SweepManifest, destination: Union[str, Path]) -> int:
    """
    Write the manifest as JSON with fixed key order.

    Returns:
        Number of bytes written

    Raises:
        SweepIOError: If the file cannot be written
    """
    try:
        return write_text_file(destination, manifest.model_dump_json(indent=2) + "\n")
    except FileHandlerError as e:
        raise SweepIOError(str(e)) from e


def read_manifest(source: Union[str, Path]) -> SweepManifest:
    """Load a manifest written by write_manifest."""
    try:
        return SweepManifest.model_validate_json(Path(source).read_text(encoding="utf-8"))
    except (OSError, ValidationError) as e:
        raise SweepIOError(f"Cannot read manifest '{source}': {e}") from e


def manifest_axes(manifest: SweepManifest) -> List[AxisSpec]:
    """Axis specifications recorded in a manifest."""
    return [AxisSpec(**axis) for axis in manifest.axes]


def write_contours(contours: Sequence[Contour], destination: Union[str, Path]) -> int:
    """Write contour polylines as JSON keyed by column name."""
    document = {
        contour.column: {
            "level": contour.level,
            "polylines": [[list(point) for point in line] for line in contour.polylines],
        }
        for contour in contours
    }
    try:
        return write_text_file(destination, json.dumps(document, indent=2) + "\n")
    except FileHandlerError as e:
        raise SweepIOError(str(e)) from e
