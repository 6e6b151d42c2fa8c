"""
Model Core Module

Parameters of the hybrid Dicke/quadratic-optomechanics model, the photon-dressed
quantities obtained after squeezing the field mode, and the phase/stability
classification every other module builds on.

With the ancilla in the Fock state |n>, the field sees the effective quadratic
potential K(b + b^dag)^2 with K = alpha*lambda^2/Omega - n*g0. Squeezing the field by
r_n = -(1/4) ln s, s = 1 + alpha*chi^2 - 4*n*g0/omega, maps the model onto a standard
Dicke model with frequency omega_n = omega*sqrt(s) and coupling lambda_n = e^{r_n} lambda.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, field_validator

from config import config


THERMODYNAMIC_LIMIT = "thermodynamic-limit"


class ModelError(Exception):
    """Custom exception for model-core errors."""
    pass


class UnstableRegimeError(ModelError):
    """Raised when an operation needs a stable point but s <= 0."""
    pass


class PhaseLabel(str, Enum):
    """Ground-state phase of a parameter point."""
    NORMAL = "normal"
    SUPERRADIANT = "superradiant"
    CRITICAL = "critical"
    UNSTABLE = "unstable"


class ModelParams(BaseModel):
    """
    Physical parameters of the model (hbar = 1).

    Construction only checks signs; whether a point is physically stable is a
    separate query (see classify_phase / stability_bounds).
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    Omega: float = Field(default=1.0, gt=0, description="Spin transition frequency")
    omega: float = Field(default=1.0, gt=0, description="Field-b frequency")
    omega_c: float = Field(default_factory=lambda: config.omega_c, ge=0, description="Ancillary-mode frequency")
    lam: float = Field(default=0.0, ge=0, alias="lambda", description="Collective spin-field coupling")
    alpha: float = Field(default=0.0, ge=0, description="A^2-term coefficient")
    g0: float = Field(default=0.0, ge=0, description="Quadratic optomechanical coupling")
    n: int = Field(default=0, ge=0, description="Ancilla Fock occupation")
    N: Union[Literal["thermodynamic-limit"], PositiveInt] = Field(
        default=THERMODYNAMIC_LIMIT,
        description="Number of two-level systems"
    )

    @field_validator("Omega", "omega", "omega_c", "lam", "alpha", "g0")
    @classmethod
    def validate_finite(cls, v: float) -> float:
        """Reject NaN and infinities."""
        if not math.isfinite(v):
            raise ValueError(f"Parameter must be finite, got {v}")
        return v

    @property
    def chi(self) -> float:
        """Rescaled coupling 2*lambda/sqrt(Omega*omega)."""
        return rescaled_coupling(self.Omega, self.omega, self.lam)

    @property
    def is_thermodynamic_limit(self) -> bool:
        return self.N == THERMODYNAMIC_LIMIT

    def with_chi(self, chi: float) -> "ModelParams":
        """Return a copy whose coupling lambda realises the rescaled coupling chi."""
        return self.replace(lam=coupling_from_chi(self.Omega, self.omega, chi))

    def replace(self, **changes) -> "ModelParams":
        """Return a validated copy with the given fields changed."""
        data = self.model_dump()
        data.update(changes)
        return ModelParams.model_validate(data)


@dataclass(frozen=True)
class DressedFrame:
    """Squeeze-transformed quantities; squeeze-dependent fields are None when s <= 0."""
    chi: float
    s: float
    omega_n: float  # omega*sign(s)*sqrt(|s|): negative exactly in the unstable region
    r_n: Optional[float] = None
    lambda_n: Optional[float] = None
    chi_n: Optional[float] = None
    C_n: Optional[float] = None

    @property
    def is_defined(self) -> bool:
        return self.r_n is not None


@dataclass(frozen=True)
class CriticalityReport:
    """Solution of chi^2 (1 - alpha) = 1 - 4 n g0 / omega for chi >= 0."""
    exists: bool
    chi_c: Optional[float]
    degenerate: bool
    branch_note: str


@dataclass(frozen=True)
class StabilityBounds:
    """
    Stable chi values, described as the open half-line chi > chi_min.

    The boundary itself has omega_n = 0 and is classified Unstable.
    """
    always_stable: bool
    never_stable: bool
    chi_min: Optional[float]
    note: str

    def contains(self, chi: float) -> bool:
        """Check whether chi lies in the stable region."""
        if self.never_stable:
            return False
        if self.always_stable:
            return True
        return chi > self.chi_min


def rescaled_coupling(Omega: float, omega: float, lam: float) -> float:
    """chi = 2*lambda/sqrt(Omega*omega)."""
    return 2.0 * lam / math.sqrt(Omega * omega)


def coupling_from_chi(Omega: float, omega: float, chi: float) -> float:
    """lambda = chi*sqrt(Omega*omega)/2."""
    return 0.5 * chi * math.sqrt(Omega * omega)


def squeeze_argument(p: ModelParams) -> float:
    """s = 1 + alpha*chi^2 - 4*n*g0/omega."""
    chi = p.chi
    return 1.0 + p.alpha * chi * chi - 4.0 * p.n * p.g0 / p.omega


def dressed_frame(p: ModelParams) -> DressedFrame:
    """
    Compute the photon-dressed frame of a parameter point.

    Args:
        p: Model parameters

    Returns:
        DressedFrame; r_n, lambda_n, chi_n and C_n are None when s <= 0
    """
    chi = p.chi
    s = squeeze_argument(p)
    omega_n = math.copysign(p.omega * math.sqrt(abs(s)), s)

    if s <= 0.0:
        return DressedFrame(chi=chi, s=s, omega_n=omega_n)

    root_s = math.sqrt(s)
    r_n = -0.25 * math.log(s)
    lambda_n = math.exp(r_n) * p.lam
    chi_n = chi / root_s
    C_n = p.n * p.omega_c + (root_s - 1.0) * p.omega / 2.0

    return DressedFrame(
        chi=chi,
        s=s,
        omega_n=omega_n,
        r_n=r_n,
        lambda_n=lambda_n,
        chi_n=chi_n,
        C_n=C_n,
    )


def classify_phase(p: ModelParams, tol: Optional[float] = None) -> PhaseLabel:
    """
    Label the thermodynamic-limit phase of a parameter point.

    Args:
        p: Model parameters
        tol: Classification tolerance (relative to max(1, chi^2)); defaults to config

    Returns:
        PhaseLabel
    """
    if tol is None:
        tol = config.classification_tol
    if tol <= 0:
        raise ModelError(f"Classification tolerance must be > 0, got {tol}")

    s = squeeze_argument(p)
    if s < 0.0 or abs(s) <= tol:
        return PhaseLabel.UNSTABLE

    chi2 = p.chi ** 2
    if abs(chi2 - s) <= tol * max(1.0, chi2):
        return PhaseLabel.CRITICAL
    if chi2 > s:
        return PhaseLabel.SUPERRADIANT
    return PhaseLabel.NORMAL


def critical_couplings(p: ModelParams) -> CriticalityReport:
    """
    Solve for the photon-dependent critical coupling, treating lambda as free.

    Normal/superradiant criticality sits at chi_n = 1, i.e. chi^2 = s, which is
    linear in chi^2: chi^2 (1 - alpha) = 1 - 4 n g0 / omega.

    Args:
        p: Model parameters (lambda is ignored)

    Returns:
        CriticalityReport
    """
    rhs = 1.0 - 4.0 * p.n * p.g0 / p.omega
    slope = 1.0 - p.alpha

    if math.isclose(slope, 0.0, abs_tol=1e-14):
        if math.isclose(rhs, 0.0, abs_tol=1e-14):
            return CriticalityReport(
                exists=False,
                chi_c=None,
                degenerate=True,
                branch_note="alpha = 1 and g0 = omega/(4n): chi_n = 1 for every chi",
            )
        return CriticalityReport(
            exists=False,
            chi_c=None,
            degenerate=False,
            branch_note=(
                "alpha = 1 and g0 < omega/(4n): chi_n < 1 everywhere" if rhs > 0
                else "alpha = 1 and g0 > omega/(4n): chi_n > 1 wherever stable, no transition"
            ),
        )

    ratio = rhs / slope
    if slope > 0:
        if rhs > 0:
            note = "alpha < 1, n = 0: standard transition" if p.n == 0 else "alpha < 1, g0 < omega/(4n): transition on increasing chi"
            return CriticalityReport(exists=True, chi_c=math.sqrt(ratio), degenerate=False, branch_note=note)
        return CriticalityReport(
            exists=False,
            chi_c=None,
            degenerate=False,
            branch_note="alpha < 1, g0 >= omega/(4n): unstable before any transition",
        )

    if rhs < 0:
        return CriticalityReport(
            exists=True,
            chi_c=math.sqrt(ratio),
            degenerate=False,
            branch_note="alpha > 1, g0 > omega/(4n): reversed transition on decreasing chi",
        )
    note = (
        "alpha >= 1, n = 0: transition forbidden (no-go)" if p.n == 0
        else "alpha > 1, g0 <= omega/(4n): transition forbidden"
    )
    return CriticalityReport(exists=False, chi_c=None, degenerate=False, branch_note=note)


def stability_bounds(p: ModelParams) -> StabilityBounds:
    """
    Describe the chi values for which omega_n > 0, treating lambda as free.

    With alpha = 0 and g0 = omega/(4n) exactly, s = 0 for every chi; that line is
    reported as never_stable, as classify_phase labels s = 0 Unstable.

    Args:
        p: Model parameters (lambda is ignored)

    Returns:
        StabilityBounds
    """
    offset = 4.0 * p.n * p.g0 / p.omega - 1.0  # s = alpha*chi^2 - offset

    if offset < 0.0:
        return StabilityBounds(
            always_stable=True,
            never_stable=False,
            chi_min=None,
            note="stable for all chi" if p.n > 0 else "n = 0: s = 1 + alpha*chi^2 >= 1",
        )
    if p.alpha == 0.0:
        return StabilityBounds(
            always_stable=False,
            never_stable=True,
            chi_min=None,
            note="alpha = 0 and g0 >= omega/(4n): omega_n <= 0 for all chi",
        )
    return StabilityBounds(
        always_stable=False,
        never_stable=False,
        chi_min=math.sqrt(offset / p.alpha),
        note="stable for chi > sqrt((4 n g0/omega - 1)/alpha)",
    )


def photon_trigger_scan(p: ModelParams, n_values: Iterable[int]) -> List[Tuple[int, PhaseLabel]]:
    """Phase of the same coupling for each ancilla Fock number."""
    return [(n, classify_phase(p.replace(n=n))) for n in n_values]
