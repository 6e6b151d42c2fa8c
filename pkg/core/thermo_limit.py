"""
Thermodynamic-Limit Solver

Closed-form N -> infinity solution of the photon-dressed Dicke model. After a
Holstein-Primakoff mapping of the collective spin onto a boson d, the model
reduces to a bilinear two-mode Hamiltonian in each phase:

- normal phase: bare modes b_n and d, frequencies omega_n and Omega;
- superradiant phase: both modes displaced by the mean fields beta and nu,
  spin frequency Omega_tilde = Omega (1 + chi_n^2)/2.

Each bilinear form is diagonalised by a Bogoliubov transformation. This module
exposes the spectra, mixing angles, Bogoliubov coefficients, ground-state energy
densities, the order parameter, field coherence and position variance.
"""

import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np

from config import config
from core.model import (
    DressedFrame,
    ModelParams,
    PhaseLabel,
    UnstableRegimeError,
    classify_phase,
    critical_couplings,
    dressed_frame,
)

logger = logging.getLogger(__name__)


class ThermoLimitError(Exception):
    """Custom exception for thermodynamic-limit errors."""
    pass


class PhaseMismatchError(ThermoLimitError):
    """Raised when a phase-specific formula is evaluated in the wrong phase."""
    pass


class CriticalDivergenceError(ThermoLimitError):
    """Raised when the lower excitation energy is below the divergence guard."""
    pass


@dataclass(frozen=True)
class ExcitationSpectrum:
    """Excitation energies of the bilinear Hamiltonian of one phase."""
    phase: PhaseLabel
    omega_minus: float
    omega_plus: float
    theta: float
    eg_density: float
    Omega_tilde: Optional[float] = None


@dataclass(frozen=True)
class BogoliubovSet:
    """
    Coefficients expressing b_n and d through the normal modes e_1, e_2:

        b_n = xi_b_minus e_1^dag + xi_b_plus e_1 + zeta_b_minus e_2^dag + zeta_b_plus e_2
        d   = xi_d_minus e_1^dag + xi_d_plus e_1 + zeta_d_minus e_2^dag + zeta_d_plus e_2
    """
    xi_b_minus: float
    xi_b_plus: float
    zeta_b_minus: float
    zeta_b_plus: float
    xi_d_minus: float
    xi_d_plus: float
    zeta_d_minus: float
    zeta_d_plus: float

    def symplectic_norms(self) -> Tuple[float, float]:
        """[b_n, b_n^dag] and [d, d^dag] expressed through the coefficients (both 1)."""
        b_norm = (self.xi_b_plus ** 2 - self.xi_b_minus ** 2) + (self.zeta_b_plus ** 2 - self.zeta_b_minus ** 2)
        d_norm = (self.xi_d_plus ** 2 - self.xi_d_minus ** 2) + (self.zeta_d_plus ** 2 - self.zeta_d_minus ** 2)
        return b_norm, d_norm

    def cross_commutators(self) -> Tuple[float, float]:
        """[b_n, d^dag] and [b_n, d] expressed through the coefficients (both 0)."""
        with_dagger = (
            self.xi_b_plus * self.xi_d_plus - self.xi_b_minus * self.xi_d_minus
            + self.zeta_b_plus * self.zeta_d_plus - self.zeta_b_minus * self.zeta_d_minus
        )
        without_dagger = (
            self.xi_b_plus * self.xi_d_minus - self.xi_b_minus * self.xi_d_plus
            + self.zeta_b_plus * self.zeta_d_minus - self.zeta_b_minus * self.zeta_d_plus
        )
        return with_dagger, without_dagger


@dataclass(frozen=True)
class GroundObservables:
    """Ground-state observables; extensive amplitudes are reported per sqrt(N)."""
    psi_q: float
    b_coherence_pair: Tuple[float, float]
    delta_x: Optional[float]
    beta: Optional[float]
    nu: Optional[float]
    ratio_Omega_omega_n: float


@dataclass(frozen=True)
class PhasePoint:
    """Everything the thermodynamic-limit solution says about one parameter point."""
    phase: PhaseLabel
    chi: float
    s: float
    chi_n: Optional[float] = None
    omega_minus: Optional[float] = None
    omega_plus: Optional[float] = None
    theta: Optional[float] = None
    eg_density: Optional[float] = None
    psi_q: Optional[float] = None
    coherence: Optional[float] = None
    delta_x: Optional[float] = None
    beta: Optional[float] = None
    nu: Optional[float] = None
    ratio_Omega_omega_n: Optional[float] = None

    def as_dict(self) -> dict:
        """Flat JSON-friendly mapping (phase as its string value)."""
        return {
            "phase": self.phase.value,
            "chi": self.chi,
            "s": self.s,
            "chi_n": self.chi_n,
            "omega_minus": self.omega_minus,
            "omega_plus": self.omega_plus,
            "theta": self.theta,
            "eg_density": self.eg_density,
            "psi_q": self.psi_q,
            "coherence": self.coherence,
            "delta_x": self.delta_x,
            "beta": self.beta,
            "nu": self.nu,
            "ratio_Omega_omega_n": self.ratio_Omega_omega_n,
        }


def _require_frame(p: ModelParams) -> DressedFrame:
    frame = dressed_frame(p)
    if not frame.is_defined:
        raise UnstableRegimeError(f"Unstable point: s = {frame.s:.6g} <= 0")
    return frame


def normal_spectrum(p: ModelParams, tol: Optional[float] = None) -> ExcitationSpectrum:
    """
    Excitation energies of the normal-phase bilinear Hamiltonian.

    omega_pm^2 = (1/2)[omega_n^2 + Omega^2 +- sqrt((omega_n^2 - Omega^2)^2 + 4 chi^2 Omega^2 omega^2)]

    Args:
        p: Model parameters in the Normal or Critical phase
        tol: Classification tolerance; defaults to config

    Returns:
        ExcitationSpectrum with eg_density = -Omega/2

    Raises:
        PhaseMismatchError: If p is Superradiant or Unstable
    """
    phase = classify_phase(p, tol)
    if phase not in (PhaseLabel.NORMAL, PhaseLabel.CRITICAL):
        raise PhaseMismatchError(f"normal_spectrum called in the {phase.value} phase")

    frame = _require_frame(p)
    Omega, omega_n = p.Omega, frame.omega_n
    total = omega_n ** 2 + Omega ** 2
    radical = math.sqrt((omega_n ** 2 - Omega ** 2) ** 2 + 4.0 * frame.chi ** 2 * Omega ** 2 * p.omega ** 2)
    omega_plus_sq = 0.5 * (total + radical)
    # product of the two roots, written so the gap closes without cancellation
    product = Omega ** 2 * p.omega ** 2 * (frame.s - frame.chi ** 2)
    omega_minus_sq = max(product / omega_plus_sq, 0.0)

    theta = 0.5 * math.atan2(4.0 * frame.lambda_n * math.sqrt(Omega * omega_n), Omega ** 2 - omega_n ** 2)

    return ExcitationSpectrum(
        phase=phase,
        omega_minus=math.sqrt(omega_minus_sq),
        omega_plus=math.sqrt(omega_plus_sq),
        theta=theta,
        eg_density=-Omega / 2.0,
    )


def superradiant_spectrum(p: ModelParams, tol: Optional[float] = None) -> ExcitationSpectrum:
    """
    Excitation energies of the displaced (superradiant) bilinear Hamiltonian.

    omega~_pm^2 = (1/2)[omega_n^2 + chi_n^4 Omega^2 +- sqrt((chi_n^4 Omega^2 - omega_n^2)^2 + 4 Omega^2 omega_n^2)]

    Args:
        p: Model parameters in the Superradiant or Critical phase
        tol: Classification tolerance; defaults to config

    Returns:
        ExcitationSpectrum with eg_density = -(Omega/4)(chi_n^2 + chi_n^-2)

    Raises:
        PhaseMismatchError: If p is Normal or Unstable
    """
    phase = classify_phase(p, tol)
    if phase not in (PhaseLabel.SUPERRADIANT, PhaseLabel.CRITICAL):
        raise PhaseMismatchError(f"superradiant_spectrum called in the {phase.value} phase")

    frame = _require_frame(p)
    Omega, omega_n = p.Omega, frame.omega_n
    chi_n2 = frame.chi_n ** 2
    spin_term = chi_n2 ** 2 * Omega ** 2
    total = omega_n ** 2 + spin_term
    radical = math.sqrt((spin_term - omega_n ** 2) ** 2 + 4.0 * Omega ** 2 * omega_n ** 2)
    omega_plus_sq = 0.5 * (total + radical)
    product = Omega ** 2 * omega_n ** 2 * (chi_n2 ** 2 - 1.0)
    omega_minus_sq = max(product / omega_plus_sq, 0.0)

    theta = 0.5 * math.atan2(2.0 * omega_n * Omega, spin_term - omega_n ** 2)

    return ExcitationSpectrum(
        phase=phase,
        omega_minus=math.sqrt(omega_minus_sq),
        omega_plus=math.sqrt(omega_plus_sq),
        theta=theta,
        eg_density=-(Omega / 4.0) * (chi_n2 + 1.0 / chi_n2),
        Omega_tilde=Omega * (1.0 + chi_n2) / 2.0,
    )


def phase_spectrum(p: ModelParams, tol: Optional[float] = None) -> ExcitationSpectrum:
    """Spectrum of whichever phase p is in; Critical points use the normal branch."""
    phase = classify_phase(p, tol)
    if phase == PhaseLabel.UNSTABLE:
        raise UnstableRegimeError(f"No spectrum in the unstable phase (s = {dressed_frame(p).s:.6g})")
    if phase == PhaseLabel.SUPERRADIANT:
        return superradiant_spectrum(p, tol)
    return normal_spectrum(p, tol)


def bogoliubov_coefficients(p: ModelParams, guard: Optional[float] = None) -> BogoliubovSet:
    """
    Bogoliubov coefficients of the phase-appropriate normal-mode transformation.

    Args:
        p: Model parameters at a stable point
        guard: Divergence guard on omega_minus; defaults to config

    Returns:
        BogoliubovSet (tilde coefficients in the superradiant phase)

    Raises:
        CriticalDivergenceError: If omega_minus <= guard
    """
    if guard is None:
        guard = config.divergence_guard

    spectrum = phase_spectrum(p)
    if spectrum.omega_minus <= guard:
        raise CriticalDivergenceError(
            f"omega_minus = {spectrum.omega_minus:.3g} is below the divergence guard {guard:.1g}"
        )

    omega_n = dressed_frame(p).omega_n
    spin_frequency = spectrum.Omega_tilde if spectrum.Omega_tilde is not None else p.Omega
    w_minus, w_plus = spectrum.omega_minus, spectrum.omega_plus
    cos_t, sin_t = math.cos(spectrum.theta), math.sin(spectrum.theta)

    def component(amplitude: float, frequency: float, mode: float, sign: float) -> float:
        return amplitude * (frequency + sign * mode) / (2.0 * math.sqrt(frequency * mode))

    return BogoliubovSet(
        xi_b_minus=component(cos_t, omega_n, w_minus, -1.0),
        xi_b_plus=component(cos_t, omega_n, w_minus, +1.0),
        zeta_b_minus=component(sin_t, omega_n, w_plus, -1.0),
        zeta_b_plus=component(sin_t, omega_n, w_plus, +1.0),
        xi_d_minus=-component(sin_t, spin_frequency, w_minus, -1.0),
        xi_d_plus=-component(sin_t, spin_frequency, w_minus, +1.0),
        zeta_d_minus=component(cos_t, spin_frequency, w_plus, -1.0),
        zeta_d_plus=component(cos_t, spin_frequency, w_plus, +1.0),
    )


def position_variance(p: ModelParams, spectrum: ExcitationSpectrum, guard: Optional[float] = None) -> Optional[float]:
    """
    Ground-state Delta x for x = (b^dag + b)/sqrt(2).

    Uses x = e^{r_n}(b_n^dag + b_n)/sqrt(2) and e^{2 r_n} omega_n = omega:
    Delta x^2 = (omega/2)(cos^2 theta / omega_minus + sin^2 theta / omega_plus).
    Returns None when omega_minus is below the divergence guard.
    """
    if guard is None:
        guard = config.divergence_guard
    if spectrum.omega_minus <= guard:
        return None
    variance = 0.5 * p.omega * (
        math.cos(spectrum.theta) ** 2 / spectrum.omega_minus
        + math.sin(spectrum.theta) ** 2 / spectrum.omega_plus
    )
    return math.sqrt(variance)


def ground_observables(p: ModelParams) -> GroundObservables:
    """
    Order parameter, coherence, displacement amplitudes and position variance.

    Args:
        p: Model parameters at a stable point

    Returns:
        GroundObservables

    Raises:
        UnstableRegimeError: If s <= 0
    """
    frame = dressed_frame(p)
    if classify_phase(p) == PhaseLabel.UNSTABLE or not frame.is_defined:
        raise UnstableRegimeError(f"Unstable point: s = {frame.s:.6g}")

    spectrum = phase_spectrum(p)
    ratio = p.Omega / frame.omega_n
    delta_x = position_variance(p, spectrum)

    if spectrum.phase != PhaseLabel.SUPERRADIANT:
        return GroundObservables(
            psi_q=0.0,
            b_coherence_pair=(0.0, 0.0),
            delta_x=delta_x,
            beta=None,
            nu=None,
            ratio_Omega_omega_n=ratio,
        )

    chi_n2 = frame.chi_n ** 2
    split = chi_n2 - 1.0 / chi_n2
    beta = math.sqrt(p.Omega / (4.0 * frame.omega_n) * split)
    nu = math.sqrt(0.5 * (1.0 - 1.0 / chi_n2))
    coherence = math.exp(frame.r_n) * beta

    return GroundObservables(
        psi_q=0.25 * split,
        b_coherence_pair=(coherence, -coherence),
        delta_x=delta_x,
        beta=beta,
        nu=nu,
        ratio_Omega_omega_n=ratio,
    )


def solve_point(p: ModelParams) -> PhasePoint:
    """Classify p and evaluate every thermodynamic-limit observable there."""
    phase = classify_phase(p)
    frame = dressed_frame(p)
    if phase == PhaseLabel.UNSTABLE:
        return PhasePoint(phase=phase, chi=frame.chi, s=frame.s)

    spectrum = phase_spectrum(p)
    observables = ground_observables(p)
    return PhasePoint(
        phase=phase,
        chi=frame.chi,
        s=frame.s,
        chi_n=frame.chi_n,
        omega_minus=spectrum.omega_minus,
        omega_plus=spectrum.omega_plus,
        theta=spectrum.theta,
        eg_density=spectrum.eg_density,
        psi_q=observables.psi_q,
        coherence=observables.b_coherence_pair[0],
        delta_x=observables.delta_x,
        beta=observables.beta,
        nu=observables.nu,
        ratio_Omega_omega_n=observables.ratio_Omega_omega_n,
    )


def normal_ground_energy(p: ModelParams, N: int) -> float:
    """
    Finite-N ground energy of the normal phase to O(1).

    E_g = -N Omega/2 + C_n + (omega_minus + omega_plus - Omega - omega_n)/2, the last
    term being the zero-point shift of the two normal modes.
    """
    spectrum = normal_spectrum(p)
    frame = dressed_frame(p)
    zero_point = 0.5 * (spectrum.omega_minus + spectrum.omega_plus - p.Omega - frame.omega_n)
    return -0.5 * N * p.Omega + frame.C_n + zero_point


def variance_scaling_exponent(
    p: ModelParams,
    side: Literal["normal", "superradiant"],
    gap_window: Tuple[float, float] = (1e-5, 1e-2),
    samples: int = 60,
) -> float:
    """
    Log-log slope of Delta x against omega_minus approaching the critical point.

    Args:
        p: Base parameters (lambda is ignored)
        side: Phase from which chi_c is approached
        gap_window: (smallest, largest) omega_minus used for the fit
        samples: Number of fit points, log-spaced in omega_minus

    Returns:
        Fitted exponent (about -1/2)

    Raises:
        ThermoLimitError: If there is no critical point or the side cannot be bracketed
    """
    report = critical_couplings(p)
    if not report.exists:
        raise ThermoLimitError(f"No critical point to approach: {report.branch_note}")
    chi_c = report.chi_c
    low, high = gap_window
    # the fit reaches gaps whose |chi^2 - s| is below the default classification tolerance
    tol = 1e-15

    def gap_at(chi: float) -> Optional[float]:
        point = p.with_chi(chi)
        if classify_phase(point, tol).value != side:
            return None
        return phase_spectrum(point, tol).omega_minus

    # superradiant side lies above chi_c for alpha < 1 and below it for alpha > 1
    direction = 1.0 if (side == "superradiant") == (p.alpha < 1.0) else -1.0
    step = 1e-6 * chi_c
    probe = None
    while step < 10.0 * chi_c:
        candidate = chi_c + direction * step
        if candidate <= 0.0:
            break
        gap = gap_at(candidate)
        if gap is None:
            break
        if gap > high:
            probe = candidate
            break
        step *= 1.5
    if probe is None:
        raise ThermoLimitError(f"Could not bracket the {side} side of chi_c = {chi_c:.6g}")

    def chi_for_gap(target: float) -> float:
        inner, outer = chi_c, probe
        for _ in range(80):
            middle = 0.5 * (inner + outer)
            gap = gap_at(middle)
            if gap is None or gap < target:
                inner = middle
            else:
                outer = middle
        return outer

    gaps, spreads = [], []
    for target in np.logspace(np.log10(low), np.log10(high), samples):
        point = p.with_chi(chi_for_gap(float(target)))
        spectrum = phase_spectrum(point, tol)
        spread = position_variance(point, spectrum)
        if spread is None:
            continue
        gaps.append(spectrum.omega_minus)
        spreads.append(spread)

    slope, _ = np.polyfit(np.log(gaps), np.log(spreads), 1)
    logger.debug("Variance exponent on the %s side of chi_c=%.6g: %.4f", side, chi_c, slope)
    return float(slope)
