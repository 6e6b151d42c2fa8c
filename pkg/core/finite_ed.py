"""
Finite-N Exact Diagonalization

Ground state of the full model at finite N in a truncated Fock (x) collective-spin
basis. The spin lives in the maximal j = N/2 sector, so a basis state is |k, m>
with boson number k = 0..M and m = -N/2..N/2, stored at index k*(N+1) + (m + N/2).

Two unitarily equivalent assemblies are provided:
- build_hamiltonian: the original frame, with the ancilla number replaced by n;
- build_dressed_hamiltonian: the squeezed frame, where the field is a plain
  oscillator of frequency omega_n. The squeezed frame needs far smaller cutoffs
  because the superradiant field occupation is e^{2 r_n} times lower there.

Both Hamiltonians commute with the parity (-1)^(k + m + N/2); the ground state is
found sector by sector so that it is an exact parity eigenstate.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Iterator, Literal, Optional, Tuple, Union

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from config import config
from core.model import ModelParams, PhaseLabel, UnstableRegimeError, classify_phase, dressed_frame
from core.thermo_limit import CriticalDivergenceError, bogoliubov_coefficients, ground_observables

logger = logging.getLogger(__name__)

Frame = Literal["dressed", "bare"]


class ExactDiagonalizationError(Exception):
    """Custom exception for exact-diagonalization errors."""
    pass


class CutoffTooSmallError(ExactDiagonalizationError):
    """Raised when the Fock cutoff is below 2."""
    pass


class OverflowRiskError(ExactDiagonalizationError):
    """Raised when the basis dimension exceeds the configured maximum."""
    pass


class NoConvergenceError(ExactDiagonalizationError):
    """Raised when the eigensolver exhausts its budget."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class BasisMismatchError(ExactDiagonalizationError):
    """Raised when a state vector does not match the (M, N) basis."""
    pass


class CutoffCeilingError(ExactDiagonalizationError):
    """Raised (strict mode) when max_cutoff is reached without convergence."""

    def __init__(self, message: str, result: "EDResult"):
        super().__init__(message)
        self.result = result


class EDConfig(BaseModel):
    """Solver and truncation settings for exact diagonalization."""

    model_config = ConfigDict(frozen=True)

    fock_cutoff: Union[Literal["auto"], int] = Field(default="auto", description="Initial boson cutoff M or 'auto'")
    cutoff_growth: float = Field(default=1.5, gt=1, description="Multiplicative cutoff growth per step")
    cutoff_tol: float = Field(default=1e-6, gt=0, lt=1, description="Relative convergence tolerance on <b^dag b>")
    max_cutoff: int = Field(default=4096, ge=2, description="Hard ceiling on M")
    eig_tol: float = Field(default=1e-10, gt=0, description="Eigensolver residual tolerance")
    dense_threshold: int = Field(default=2000, ge=0, description="Largest sector dimension solved densely")
    max_dim: int = Field(default=10**6, ge=4, description="Largest basis dimension that may be assembled")
    degeneracy_tol: float = Field(default=1e-10, gt=0, description="Relative splitting below which the doublet is degenerate")
    seed: int = Field(default=0, description="Seed of the Lanczos start vector")
    krylov_dim: int = Field(default=40, ge=3, description="Lanczos basis size")
    max_iterations: Optional[int] = Field(default=None, description="Lanczos restart budget (None: solver default)")
    frame: Frame = Field(default_factory=lambda: config.ed_frame, description="Assembly frame")
    strict: bool = Field(default=False, description="Raise CutoffCeilingError instead of returning unconverged")

    @field_validator("fock_cutoff")
    @classmethod
    def validate_cutoff(cls, v: Union[str, int]) -> Union[str, int]:
        if v != "auto" and v < 2:
            raise ValueError(f"fock_cutoff must be >= 2, got {v}")
        return v


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Real symmetric operator stored as its upper triangle (row <= column)."""
    upper: sparse.coo_matrix
    cutoff: int
    n_spins: int
    frame: Frame = "bare"

    @property
    def dim(self) -> int:
        return (self.cutoff + 1) * (self.n_spins + 1)

    def index(self, k: int, m: float) -> int:
        """Basis index of |k, m>."""
        return k * (self.n_spins + 1) + int(round(m + self.n_spins / 2))

    def entries(self) -> Iterator[Tuple[int, int, float]]:
        """Stored (row, column, value) triplets."""
        return zip(self.upper.row.tolist(), self.upper.col.tolist(), self.upper.data.tolist())

    def to_csr(self) -> sparse.csr_matrix:
        """Full symmetric matrix."""
        upper = self.upper.tocsr()
        return (upper + sparse.triu(upper, k=1, format="csr").T).tocsr()

    def to_dense(self) -> np.ndarray:
        return self.to_csr().toarray()


@dataclass(frozen=True, eq=False)
class GroundState:
    """Lowest eigenpair with doublet and accuracy metadata."""
    energy: float
    vector: np.ndarray
    splitting: float
    residual: float
    method: str
    frame: Frame = "bare"


@dataclass(frozen=True, eq=False)
class EDResult:
    """Finite-N ground state and its observables, in terms of the original field b."""
    ground_energy: float
    ground_vector: np.ndarray
    n_b: float
    jz: float
    x_mean: float
    x2_mean: float
    b_mean: float
    parity: float
    psi_q: float
    delta_x: float
    cutoff_used: int
    converged: bool
    n_spins: int
    frame: str
    splitting: float = math.nan
    residual: float = math.nan

    @property
    def energy_density(self) -> float:
        return self.ground_energy / self.n_spins


def _require_finite_spins(p: ModelParams) -> int:
    if p.is_thermodynamic_limit:
        raise ExactDiagonalizationError("Exact diagonalization needs a finite number of spins N")
    return int(p.N)


def _check_basis(M: int, N: int, max_dim: int) -> None:
    if M < 2:
        raise CutoffTooSmallError(f"Fock cutoff must be >= 2, got {M}")
    dim = (M + 1) * (N + 1)
    if dim > max_dim:
        raise OverflowRiskError(f"Basis dimension {dim} exceeds the maximum {max_dim}")


def _boson_operators(M: int) -> Tuple[sparse.spmatrix, sparse.spmatrix, sparse.spmatrix]:
    """Number, quadrature b + b^dag and its exact square on 0..M."""
    k = np.arange(M + 1, dtype=float)
    number = sparse.diags(k)
    ladder = sparse.diags(np.sqrt(k[1:]), 1)
    quadrature = ladder + ladder.T
    # (b + b^dag)^2 built from its matrix elements, free of the truncation error at k = M
    off = np.sqrt((k[:-2] + 1.0) * (k[:-2] + 2.0))
    square = sparse.diags([2.0 * k + 1.0, off, off], [0, 2, -2])
    return number, quadrature, square


def _collective_spin(N: int) -> Tuple[sparse.spmatrix, sparse.spmatrix]:
    """J_z and J_x = J_+ + J_- in the j = N/2 sector, ordered m = -j..j."""
    j = N / 2.0
    m = np.arange(N + 1, dtype=float) - j
    jz = sparse.diags(m)
    raising = sparse.diags(np.sqrt(j * (j + 1.0) - m[:-1] * (m[:-1] + 1.0)), -1)
    return jz, raising + raising.T


def _assemble(
    M: int,
    N: int,
    field_frequency: float,
    spin_frequency: float,
    coupling: float,
    quadratic: float,
    constant: float,
    frame: Frame,
) -> OperatorMatrix:
    number, quadrature, square = _boson_operators(M)
    jz, jx = _collective_spin(N)
    boson_identity = sparse.identity(M + 1)
    spin_identity = sparse.identity(N + 1)

    H = (
        field_frequency * sparse.kron(number, spin_identity)
        + spin_frequency * sparse.kron(boson_identity, jz)
        + (coupling / math.sqrt(N)) * sparse.kron(quadrature, jx)
        + quadratic * sparse.kron(square, spin_identity)
        + constant * sparse.identity((M + 1) * (N + 1))
    ).tocsr()
    H.eliminate_zeros()

    upper = sparse.triu(H, format="coo")
    if not np.all(np.isfinite(upper.data)):
        raise ExactDiagonalizationError("Hamiltonian has non-finite matrix elements")
    return OperatorMatrix(upper=upper, cutoff=M, n_spins=N, frame=frame)


def build_hamiltonian(p: ModelParams, M: int, max_dim: int = 10**6) -> OperatorMatrix:
    """
    Assemble the original-frame Hamiltonian.

    H = n omega_c + Omega J_z + omega b^dag b + (lambda/sqrt(N))(b^dag + b) J_x + K (b^dag + b)^2
    with K = alpha lambda^2/Omega - n g0.

    Args:
        p: Model parameters with finite N
        M: Fock cutoff (largest boson number kept)
        max_dim: Largest admissible basis dimension

    Returns:
        OperatorMatrix

    Raises:
        CutoffTooSmallError: If M < 2
        OverflowRiskError: If (M+1)(N+1) > max_dim
    """
    N = _require_finite_spins(p)
    _check_basis(M, N, max_dim)
    K = p.alpha * p.lam ** 2 / p.Omega - p.n * p.g0
    return _assemble(
        M, N,
        field_frequency=p.omega,
        spin_frequency=p.Omega,
        coupling=p.lam,
        quadratic=K,
        constant=p.n * p.omega_c,
        frame="bare",
    )


def build_dressed_hamiltonian(p: ModelParams, M: int, max_dim: int = 10**6) -> OperatorMatrix:
    """
    Assemble the squeezed-frame Hamiltonian
    H_n = Omega J_z + omega_n b_n^dag b_n + (lambda_n/sqrt(N))(b_n^dag + b_n) J_x + C_n.

    Raises:
        UnstableRegimeError: If s <= 0 (no squeezed frame exists)
    """
    N = _require_finite_spins(p)
    _check_basis(M, N, max_dim)
    frame = dressed_frame(p)
    if not frame.is_defined:
        raise UnstableRegimeError(f"No squeezed frame for s = {frame.s:.6g} <= 0")
    return _assemble(
        M, N,
        field_frequency=frame.omega_n,
        spin_frequency=p.Omega,
        coupling=frame.lambda_n,
        quadratic=0.0,
        constant=frame.C_n,
        frame="dressed",
    )


def assemble_hamiltonian(
    p: ModelParams, M: int, frame: Optional[Frame] = None, max_dim: int = 10**6
) -> OperatorMatrix:
    """Dispatch to the requested frame (config.ed_frame when omitted)."""
    frame = frame or config.ed_frame
    if frame == "dressed":
        return build_dressed_hamiltonian(p, M, max_dim)
    return build_hamiltonian(p, M, max_dim)


def _parity_signs(N: int, M: int) -> np.ndarray:
    return 1.0 - 2.0 * (np.add.outer(np.arange(M + 1), np.arange(N + 1)) % 2).ravel()


def parity_matrix(N: int, M: int) -> OperatorMatrix:
    """Diagonal parity (-1)^(k + m + N/2) over the (M, N) basis."""
    if M < 2:
        raise CutoffTooSmallError(f"Fock cutoff must be >= 2, got {M}")
    upper = sparse.diags(_parity_signs(N, M)).tocoo()
    return OperatorMatrix(upper=upper, cutoff=M, n_spins=N)


def commutes_with_parity(H: OperatorMatrix) -> bool:
    """Structural [H, Pi] = 0: every stored element joins states of equal parity."""
    signs = _parity_signs(H.n_spins, H.cutoff)
    return bool(np.all(signs[H.upper.row] == signs[H.upper.col]))


def _lowest_in_sector(block: sparse.csr_matrix, cfg: EDConfig) -> Tuple[float, np.ndarray, str]:
    size = block.shape[0]
    if size <= max(cfg.dense_threshold, 2):
        values, vectors = scipy.linalg.eigh(block.toarray(), subset_by_index=[0, 0])
        return float(values[0]), vectors[:, 0], "dense"

    start = np.random.default_rng(cfg.seed).standard_normal(size)
    ncv = min(size, cfg.krylov_dim)
    tol = 0.01 * cfg.eig_tol
    for attempt in range(2):
        try:
            values, vectors = eigsh(block, k=1, which="SA", v0=start, ncv=ncv, tol=tol, maxiter=cfg.max_iterations)
        except ArpackNoConvergence as e:
            if len(e.eigenvalues) == 0:
                raise NoConvergenceError("Lanczos did not converge", residual=math.inf) from e
            values, vectors = e.eigenvalues, e.eigenvectors
        vector = vectors[:, 0]
        energy = float(values[0])
        residual = float(np.linalg.norm(block @ vector - energy * vector))
        if residual <= cfg.eig_tol * max(1.0, abs(energy)):
            return energy, vector, "lanczos"
        logger.debug("Lanczos residual %.3g above tolerance, restarting (attempt %d)", residual, attempt + 1)
        start, tol = vector, 0.01 * tol

    raise NoConvergenceError(f"Lanczos residual {residual:.3g} above tolerance {cfg.eig_tol:.1g}", residual=residual)


def ground_eigenpair(H: OperatorMatrix, cfg: Optional[EDConfig] = None) -> GroundState:
    """
    Lowest eigenpair of a parity-symmetric Hamiltonian.

    The even and odd parity sectors are diagonalised separately (dense below
    cfg.dense_threshold, Lanczos above). The lower of the two sector ground
    states is returned; when the doublet splitting is below cfg.degeneracy_tol
    the parity-even member is reported.

    Args:
        H: Hamiltonian over the (M, N) basis
        cfg: Solver settings

    Returns:
        GroundState with unit-norm vector, doublet splitting and residual

    Raises:
        NoConvergenceError: If the iterative solver fails
    """
    cfg = cfg or EDConfig()
    if H.dim < 2:
        raise ExactDiagonalizationError("Need a basis of dimension >= 2")

    full = H.to_csr()
    signs = _parity_signs(H.n_spins, H.cutoff)
    sectors = {}
    for label, sign in (("even", 1.0), ("odd", -1.0)):
        index = np.flatnonzero(signs == sign)
        block = full[index][:, index]
        energy, vector, method = _lowest_in_sector(block, cfg)
        sectors[label] = (energy, index, vector, method)

    even_energy, odd_energy = sectors["even"][0], sectors["odd"][0]
    splitting = abs(odd_energy - even_energy)
    degenerate = splitting <= cfg.degeneracy_tol * max(1.0, abs(even_energy))
    chosen = "even" if degenerate or even_energy <= odd_energy else "odd"
    if chosen == "odd":
        logger.warning("Odd-parity ground state (splitting %.3g)", splitting)
    elif degenerate:
        logger.debug("Quasi-degenerate parity doublet, splitting %.3g", splitting)

    energy, index, sector_vector, method = sectors[chosen]
    vector = np.zeros(H.dim)
    vector[index] = sector_vector
    vector /= np.linalg.norm(vector)
    # fix the global sign so repeated solves give identical vectors
    if vector[np.argmax(np.abs(vector))] < 0:
        vector = -vector

    residual = float(np.linalg.norm(full @ vector - energy * vector))
    if residual > cfg.eig_tol * max(1.0, abs(energy)):
        logger.warning("Ground-state residual %.3g exceeds tolerance %.1g", residual, cfg.eig_tol)
    logger.debug("Ground state dim=%d E=%.12g splitting=%.3g residual=%.3g (%s)", H.dim, energy, splitting, residual, method)

    return GroundState(
        energy=energy, vector=vector, splitting=splitting, residual=residual, method=method, frame=H.frame
    )


def compute_observables(
    p: ModelParams,
    v: np.ndarray,
    M: int,
    frame: Optional[Frame] = None,
    ground: Optional[GroundState] = None,
) -> EDResult:
    """
    Observables of a state over the (M, N) basis, expressed for the original field b.

    In the dressed frame the moments of b_n are mapped back through
    b = cosh(r_n) b_n + sinh(r_n) b_n^dag.

    Args:
        p: Model parameters with finite N
        v: Real state vector of length (M+1)(N+1)
        M: Fock cutoff of the basis
        frame: Frame the vector was computed in; taken from ground when omitted,
            otherwise the original frame
        ground: Eigensolver output supplying energy, splitting and residual

    Returns:
        EDResult (cutoff_used = M, converged = False)

    Raises:
        BasisMismatchError: If len(v) != (M+1)(N+1) or frame contradicts ground.frame
    """
    N = _require_finite_spins(p)
    if frame is None:
        frame = ground.frame if ground is not None else "bare"
    elif ground is not None and ground.frame != frame:
        raise BasisMismatchError(f"State solved in the {ground.frame} frame, observables requested for {frame}")
    v = np.asarray(v, dtype=float)
    if v.shape != ((M + 1) * (N + 1),):
        raise BasisMismatchError(f"State of length {v.size} does not match the basis (M={M}, N={N})")

    amplitudes = v.reshape(M + 1, N + 1)
    weights = amplitudes ** 2
    k = np.arange(M + 1, dtype=float)
    m = np.arange(N + 1, dtype=float) - N / 2.0

    number = float(weights.sum(axis=1) @ k)
    jz = float(weights.sum(axis=0) @ m)
    parity = float(np.sum(weights * _parity_signs(N, M).reshape(M + 1, N + 1)))
    lowering = float(np.sqrt(k[1:]) @ np.einsum("ij,ij->i", amplitudes[:-1], amplitudes[1:]))
    pair = 2.0 * float(np.sqrt((k[:-2] + 1.0) * (k[:-2] + 2.0)) @ np.einsum("ij,ij->i", amplitudes[:-2], amplitudes[2:]))
    quadrature = 2.0 * lowering
    quadrature_sq = float(weights.sum(axis=1) @ (2.0 * k + 1.0)) + pair

    s = dressed_frame(p).s
    if frame == "dressed":
        r = dressed_frame(p).r_n
        if r is None:
            raise UnstableRegimeError(f"No squeezed frame for s = {s:.6g} <= 0")
        n_b = math.cosh(2 * r) * number + math.sinh(r) ** 2 + 0.5 * math.sinh(2 * r) * pair
        x_mean = math.exp(r) * quadrature / math.sqrt(2.0)
        x2_mean = math.exp(2 * r) * quadrature_sq / 2.0
        b_mean = math.exp(r) * lowering
    else:
        n_b = number
        x_mean = quadrature / math.sqrt(2.0)
        x2_mean = quadrature_sq / 2.0
        b_mean = lowering

    return EDResult(
        ground_energy=ground.energy if ground else math.nan,
        ground_vector=v,
        n_b=n_b,
        jz=jz,
        x_mean=x_mean,
        x2_mean=x2_mean,
        b_mean=b_mean,
        parity=parity,
        psi_q=s * p.omega * n_b / (N * p.Omega),
        delta_x=math.sqrt(max(x2_mean - x_mean ** 2, 0.0)),
        cutoff_used=M,
        converged=False,
        n_spins=N,
        frame=frame,
        splitting=ground.splitting if ground else math.nan,
        residual=ground.residual if ground else math.nan,
    )


def auto_cutoff(p: ModelParams, frame: Frame) -> int:
    """
    Initial cutoff from the analytic boson occupation of the active frame.

    The estimate adds the mean-field displacement N*beta^2 and the normal-mode
    fluctuations; the bare frame also carries the squeezed-vacuum occupation.
    """
    N = _require_finite_spins(p)
    df = dressed_frame(p)
    observables = ground_observables(p)
    occupation = N * observables.beta ** 2 if observables.beta is not None else 0.0
    try:
        coefficients = bogoliubov_coefficients(p)
        occupation += coefficients.xi_b_minus ** 2 + coefficients.zeta_b_minus ** 2
    except CriticalDivergenceError:
        pass
    if frame == "bare":
        occupation = math.exp(2 * df.r_n) * occupation + math.sinh(df.r_n) ** 2
    return max(16, math.ceil(occupation + 12.0 * math.sqrt(occupation + 1.0) + 16.0))


def converge_cutoff(p: ModelParams, cfg: Optional[EDConfig] = None) -> EDResult:
    """
    Ground state with the Fock cutoff grown until <b^dag b> stops changing.

    Args:
        p: Model parameters with finite N at a stable point
        cfg: Solver and truncation settings

    Returns:
        EDResult of the last solve; converged is False when the ceiling was hit

    Raises:
        UnstableRegimeError: If s <= 0
        CutoffCeilingError: If cfg.strict and the ceiling is reached unconverged
    """
    cfg = cfg or EDConfig()
    N = _require_finite_spins(p)
    if classify_phase(p) == PhaseLabel.UNSTABLE or not dressed_frame(p).is_defined:
        raise UnstableRegimeError(f"Unstable point: s = {dressed_frame(p).s:.6g}")

    ceiling = min(cfg.max_cutoff, cfg.max_dim // (N + 1) - 1)
    M = auto_cutoff(p, cfg.frame) if cfg.fock_cutoff == "auto" else cfg.fock_cutoff
    M = max(2, min(M, ceiling))

    previous: Optional[EDResult] = None
    while True:
        H = assemble_hamiltonian(p, M, cfg.frame, cfg.max_dim)
        ground = ground_eigenpair(H, cfg)
        result = compute_observables(p, ground.vector, M, cfg.frame, ground)
        logger.debug("N=%d M=%d n_b=%.12g", N, M, result.n_b)

        if previous is not None and math.isclose(result.n_b, previous.n_b, rel_tol=cfg.cutoff_tol, abs_tol=1e-12):
            return replace(result, converged=True)

        if M >= ceiling:
            unconverged = replace(result, converged=False)
            message = f"Cutoff ceiling {ceiling} reached without convergence (N={N}, n_b={result.n_b:.6g})"
            if cfg.strict:
                raise CutoffCeilingError(message, result=unconverged)
            logger.warning(message)
            return unconverged

        previous = result
        M = min(ceiling, max(M + 1, math.ceil(M * cfg.cutoff_growth)))
