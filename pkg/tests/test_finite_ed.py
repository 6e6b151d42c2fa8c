"""
Unit tests for finite-N exact diagonalization.

Tests Hamiltonian assembly, parity structure, the sector-wise ground-state
solver, observables in both frames and cutoff convergence.
"""

import math
import pytest
from pathlib import Path

# Add parent directory to path for imports
import sys
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
from pydantic import ValidationError

from core.finite_ed import (
    BasisMismatchError,
    CutoffCeilingError,
    CutoffTooSmallError,
    EDConfig,
    ExactDiagonalizationError,
    OverflowRiskError,
    assemble_hamiltonian,
    auto_cutoff,
    build_dressed_hamiltonian,
    build_hamiltonian,
    commutes_with_parity,
    compute_observables,
    converge_cutoff,
    ground_eigenpair,
    parity_matrix,
)
from core.model import ModelParams, UnstableRegimeError, dressed_frame
from core.thermo_limit import normal_ground_energy, solve_point


def params(chi=0.0, alpha=0.0, g0=0.0, n=0, N=2, **extra):
    return ModelParams(Omega=1.0, omega=1.0, alpha=alpha, g0=g0, n=n, N=N, **extra).with_chi(chi)


def reversed_config(chi, N):
    return params(chi=chi, alpha=2.0, g0=0.251, n=1, N=N)


def random_stable_params(rng, N=2):
    return ModelParams(
        Omega=1.0,
        omega=1.0,
        lam=rng.uniform(0.0, 1.0),
        alpha=rng.uniform(0.0, 2.0),
        g0=rng.uniform(0.0, 0.24),
        n=int(rng.integers(0, 2)),
        N=N,
    )


class TestEDConfig:
    """Test EDConfig validation."""

    @pytest.mark.unit
    def test_defaults(self):
        cfg = EDConfig()
        assert cfg.fock_cutoff == "auto"
        assert cfg.frame == "dressed"
        assert cfg.max_cutoff == 4096
        assert not cfg.strict

    @pytest.mark.parametrize("field,value", [
        ("fock_cutoff", 1),
        ("cutoff_growth", 1.0),
        ("cutoff_tol", 0.0),
        ("frame", "lab"),
    ])
    def test_invalid_settings(self, field, value):
        with pytest.raises(ValidationError):
            EDConfig(**{field: value})


class TestAssembly:
    """Test Hamiltonian matrix elements and basis checks."""

    def test_decoupled_spin_energy(self):
        H = build_hamiltonian(params(N=2), M=2)
        assert H.dim == 9
        diagonal = np.diag(H.to_dense())
        assert diagonal.min() == -1.0
        assert diagonal[H.index(0, -1)] == -1.0
        assert diagonal[H.index(2, 1)] == 3.0

    def test_rabi_element(self):
        """For N = 1, <0, -1/2|H|1, +1/2> = lambda."""
        H = build_hamiltonian(ModelParams(lam=0.3, N=1), M=2)
        dense = H.to_dense()
        assert dense[H.index(0, -0.5), H.index(1, 0.5)] == pytest.approx(0.3)
        assert dense[H.index(1, 0.5), H.index(0, -0.5)] == pytest.approx(0.3)
        assert dense[H.index(0, -0.5), H.index(1, -0.5)] == 0.0

    def test_quadratic_term(self):
        """K (b + b^dag)^2 with K = alpha lambda^2/Omega - n g0."""
        p = ModelParams(lam=0.3, alpha=1.0, g0=0.05, n=1, omega_c=2.0, N=2)
        K = 0.09 - 0.05
        H = build_hamiltonian(p, M=4)
        dense = H.to_dense()
        assert dense[H.index(0, 0), H.index(2, 0)] == pytest.approx(K * math.sqrt(2.0))
        assert dense[H.index(0, -1), H.index(0, -1)] == pytest.approx(2.0 - 1.0 + K)
        assert dense[H.index(4, 1), H.index(4, 1)] == pytest.approx(2.0 + 1.0 + 4.0 + 9.0 * K)

    def test_upper_triangle_storage(self):
        H = build_hamiltonian(params(chi=0.8, alpha=1.0, g0=0.1, n=1, N=3), M=6)
        assert all(row <= column for row, column, _ in H.entries())
        dense = H.to_dense()
        assert np.array_equal(dense, dense.T)

    def test_cutoff_too_small(self):
        with pytest.raises(CutoffTooSmallError):
            build_hamiltonian(params(), M=1)
        with pytest.raises(CutoffTooSmallError):
            parity_matrix(2, 1)

    def test_dimension_ceiling(self):
        with pytest.raises(OverflowRiskError):
            build_hamiltonian(params(N=10), M=100, max_dim=500)

    def test_thermodynamic_limit_rejected(self):
        with pytest.raises(ExactDiagonalizationError):
            build_hamiltonian(ModelParams(), M=4)

    def test_dressed_frame_needs_stable_point(self):
        with pytest.raises(UnstableRegimeError):
            build_dressed_hamiltonian(reversed_config(0.04, N=2), M=4)

    def test_dressed_frame_is_plain_dicke(self):
        p = params(chi=0.3, g0=0.2, n=1)
        frame = dressed_frame(p)
        H = build_dressed_hamiltonian(p, M=4)
        dense = H.to_dense()
        assert dense[H.index(1, -1), H.index(1, -1)] == pytest.approx(frame.C_n + frame.omega_n - 1.0)
        assert dense[H.index(0, 0), H.index(2, 0)] == 0.0
        assert dense[H.index(0, -1), H.index(1, 0)] == pytest.approx(frame.lambda_n)


class TestParity:
    """Test the parity symmetry of both assemblies."""

    def test_parity_signs(self):
        P = parity_matrix(2, 3)
        diagonal = np.diag(P.to_dense())
        assert diagonal[P.index(0, -1)] == 1.0
        assert diagonal[P.index(1, -1)] == -1.0
        assert diagonal[P.index(0, 0)] == -1.0
        assert diagonal[P.index(3, 0)] == 1.0

    @pytest.mark.parametrize("frame", ["bare", "dressed"])
    def test_commutes_on_random_points(self, frame):
        rng = np.random.default_rng(13)
        for _ in range(10):
            N = int(rng.integers(1, 6))
            p = random_stable_params(rng, N=N)
            H = assemble_hamiltonian(p, int(rng.integers(2, 12)), frame)
            assert commutes_with_parity(H)
            dense, parity = H.to_dense(), parity_matrix(N, H.cutoff).to_dense()
            assert np.array_equal(dense @ parity, parity @ dense)


class TestGroundEigenpair:
    """Test the sector-wise ground-state solver."""

    def test_decoupled_ground_state(self):
        """lambda = 0: spin fully down, boson vacuum."""
        ground = ground_eigenpair(build_hamiltonian(params(N=2), M=4))
        assert ground.energy == pytest.approx(-1.0, abs=1e-12)
        assert ground.vector[0] == pytest.approx(1.0)
        assert ground.method == "dense"

    def test_squeezed_vacuum_energy(self):
        """Boson sector omega b^dag b - 0.2 (b + b^dag)^2 has ground energy (sqrt(0.2) - 1)/2."""
        p = params(g0=0.2, n=1, N=2)
        expected = -1.0 + p.omega_c + (math.sqrt(0.2) - 1.0) / 2.0
        bare = ground_eigenpair(build_hamiltonian(p, M=200))
        dressed = ground_eigenpair(build_dressed_hamiltonian(p, M=4))
        assert bare.energy == pytest.approx(expected, abs=1e-8)
        assert dressed.energy == pytest.approx(expected, abs=1e-12)

    def test_matches_full_diagonalization(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            H = build_hamiltonian(random_stable_params(rng), M=8)
            ground = ground_eigenpair(H)
            assert ground.energy == pytest.approx(np.linalg.eigvalsh(H.to_dense())[0], abs=1e-10)
            assert np.linalg.norm(ground.vector) == pytest.approx(1.0)

    def test_iterative_matches_dense(self):
        """Lanczos on every sector agrees with dense diagonalization over random draws."""
        rng = np.random.default_rng(19)
        dense_cfg, lanczos_cfg = EDConfig(), EDConfig(dense_threshold=0)
        for _ in range(50):
            p = random_stable_params(rng)
            H = build_hamiltonian(p, M=8)
            dense = ground_eigenpair(H, dense_cfg)
            iterative = ground_eigenpair(H, lanczos_cfg)
            assert iterative.method == "lanczos"
            assert iterative.energy == pytest.approx(dense.energy, abs=1e-10)

            a = compute_observables(p, dense.vector, 8, "bare", dense)
            b = compute_observables(p, iterative.vector, 8, "bare", iterative)
            for name in ("n_b", "jz", "x2_mean", "parity"):
                assert getattr(b, name) == pytest.approx(getattr(a, name), abs=1e-8)

    def test_ground_state_is_parity_eigenstate(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            p = random_stable_params(rng, N=4)
            ground = ground_eigenpair(build_hamiltonian(p, M=10))
            result = compute_observables(p, ground.vector, 10, "bare", ground)
            assert abs(result.parity) == pytest.approx(1.0, abs=1e-12)
            assert abs(result.x_mean) <= 1e-9
            assert abs(result.b_mean) <= 1e-9

    def test_deterministic_vector(self):
        H = build_hamiltonian(params(chi=1.5, N=3), M=20)
        first, second = ground_eigenpair(H), ground_eigenpair(H)
        assert np.array_equal(first.vector, second.vector)
        assert first.vector[np.argmax(np.abs(first.vector))] > 0


class TestComputeObservables:
    """Test observables and the frame mapping."""

    def test_vacuum(self):
        p = params(N=2)
        v = np.zeros(15)
        v[0] = 1.0
        result = compute_observables(p, v, 4, "bare")
        assert result.n_b == 0.0
        assert result.jz == -1.0
        assert result.parity == pytest.approx(1.0, abs=1e-12)
        assert result.psi_q == 0.0
        assert result.delta_x == pytest.approx(1.0 / math.sqrt(2.0))
        assert not result.converged
        assert math.isnan(result.ground_energy)

    def test_dressed_vacuum_is_squeezed(self):
        """The b_n vacuum carries sinh^2 r_n photons of the original field."""
        p = params(g0=0.2, n=1, N=2)
        r = dressed_frame(p).r_n
        v = np.zeros(15)
        v[0] = 1.0
        result = compute_observables(p, v, 4, "dressed")
        assert result.n_b == pytest.approx(math.sinh(r) ** 2)
        assert result.x2_mean == pytest.approx(math.exp(2.0 * r) / 2.0)

    def test_basis_mismatch(self):
        with pytest.raises(BasisMismatchError):
            compute_observables(params(N=2), np.ones(10) / math.sqrt(10.0), 4)

    def test_original_frame_pipeline_defaults(self):
        """build_hamiltonian -> ground_eigenpair -> compute_observables(p, v, M) stays in the original frame."""
        p = params(g0=0.2, n=1, N=2)
        r = dressed_frame(p).r_n
        H = build_hamiltonian(p, M=120)
        ground = ground_eigenpair(H)
        assert H.frame == ground.frame == "bare"

        for result in (compute_observables(p, ground.vector, 120), compute_observables(p, ground.vector, 120, ground=ground)):
            assert result.frame == "bare"
            assert result.n_b == pytest.approx(math.sinh(r) ** 2, abs=1e-8)
            assert result.delta_x == pytest.approx(math.exp(r) / math.sqrt(2.0), abs=1e-8)

    def test_frame_follows_assembly(self):
        p = params(chi=0.3, g0=0.2, n=1, N=2)
        H = build_dressed_hamiltonian(p, M=40)
        ground = ground_eigenpair(H)
        assert H.frame == ground.frame == "dressed"
        assert compute_observables(p, ground.vector, 40, ground=ground).frame == "dressed"
        assert assemble_hamiltonian(p, 8).frame == EDConfig().frame

    def test_frame_contradicting_ground_rejected(self):
        p = params(chi=0.3, g0=0.2, n=1, N=2)
        ground = ground_eigenpair(build_dressed_hamiltonian(p, M=10))
        with pytest.raises(BasisMismatchError):
            compute_observables(p, ground.vector, 10, "bare", ground)

    def test_frames_agree(self):
        p = params(chi=0.3, g0=0.2, n=1, N=2)
        bare = ground_eigenpair(build_hamiltonian(p, M=120))
        dressed = ground_eigenpair(build_dressed_hamiltonian(p, M=40))
        a = compute_observables(p, bare.vector, 120, "bare", bare)
        b = compute_observables(p, dressed.vector, 40, "dressed", dressed)
        assert a.ground_energy == pytest.approx(b.ground_energy, abs=1e-9)
        assert a.n_b == pytest.approx(b.n_b, abs=1e-8)
        assert a.x2_mean == pytest.approx(b.x2_mean, abs=1e-8)
        assert a.jz == pytest.approx(b.jz, abs=1e-8)


class TestConvergeCutoff:
    """Test cutoff growth and convergence reporting."""

    def test_decoupled_point(self):
        result = converge_cutoff(params(N=4))
        assert result.converged
        assert result.n_b == pytest.approx(0.0, abs=1e-14)
        assert result.ground_energy == pytest.approx(-2.0)
        assert result.energy_density == pytest.approx(-0.5)

    def test_reversed_transition_point(self):
        p = reversed_config(0.05, N=10)
        result = converge_cutoff(p)
        assert result.converged
        assert result.cutoff_used <= 1024
        assert result.parity == pytest.approx(1.0, abs=1e-12)
        assert abs(result.x_mean) <= 1e-9
        assert result.psi_q == pytest.approx(solve_point(p).psi_q, abs=0.15)

    def test_unstable_point(self):
        with pytest.raises(UnstableRegimeError):
            converge_cutoff(reversed_config(0.04, N=4))

    def test_ceiling_returns_unconverged(self):
        result = converge_cutoff(reversed_config(0.05, N=10), EDConfig(max_cutoff=20))
        assert not result.converged
        assert result.cutoff_used == 20

    def test_ceiling_strict(self):
        with pytest.raises(CutoffCeilingError) as exc_info:
            converge_cutoff(reversed_config(0.05, N=10), EDConfig(max_cutoff=20, strict=True))
        assert not exc_info.value.result.converged
        assert exc_info.value.result.cutoff_used == 20

    def test_energy_non_increasing_in_cutoff(self):
        p = reversed_config(0.05, N=4)
        energies = [ground_eigenpair(build_dressed_hamiltonian(p, M)).energy for M in (20, 40, 80, 160)]
        assert all(later <= earlier + 1e-9 for earlier, later in zip(energies, energies[1:]))

    def test_auto_cutoff_tracks_occupation(self):
        assert auto_cutoff(params(N=4), "dressed") == 28
        small = auto_cutoff(reversed_config(0.06, N=10), "dressed")
        large = auto_cutoff(reversed_config(0.05, N=100), "dressed")
        assert 16 <= small < large
        assert auto_cutoff(reversed_config(0.05, N=10), "bare") > auto_cutoff(reversed_config(0.05, N=10), "dressed")

    def test_normal_phase_energy(self):
        """Deep in the normal phase the ground energy follows the two zero-point shifts."""
        p = params(chi=0.5, N=100)
        result = converge_cutoff(p)
        assert result.converged
        assert result.ground_energy == pytest.approx(normal_ground_energy(p, 100), abs=1e-3)

    @pytest.mark.slow
    def test_superradiant_energy_density(self):
        """At N = 100 the superradiant energy density sits within 0.02 of the N -> infinity value."""
        p = params(chi=1.5, N=100)
        result = converge_cutoff(p)
        assert result.converged
        assert result.energy_density == pytest.approx(solve_point(p.replace(N="thermodynamic-limit")).eg_density, abs=0.02)
        assert result.energy_density == pytest.approx(-0.25 * (2.25 + 1.0 / 2.25), abs=0.02)

    def test_single_photon_trigger_converges_faster(self):
        """At matched chi_n = 1.5 and N = 10 the one-photon point lies closer to the N -> infinity order parameter."""
        triggered = params(chi=1.5 * math.sqrt(0.004), g0=0.249, n=1, N=10)
        vacuum = params(chi=1.5, N=10)
        assert dressed_frame(triggered).chi_n == pytest.approx(1.5, rel=1e-6)

        limit = 0.25 * (2.25 - 1.0 / 2.25)
        triggered_gap = abs(converge_cutoff(triggered).psi_q - limit)
        vacuum_gap = abs(converge_cutoff(vacuum).psi_q - limit)
        assert triggered_gap < vacuum_gap


def localized_ground_state(H):
    """Equal mix of the even and odd sector ground states: one of the two displaced minima."""
    full = H.to_csr()
    signs = parity_matrix(H.n_spins, H.cutoff).to_csr().diagonal()
    state = np.zeros(H.dim)
    for sign in (1.0, -1.0):
        index = np.flatnonzero(signs == sign)
        _, vectors = np.linalg.eigh(full[index][:, index].toarray())
        state[index] = vectors[:, 0]
    return state / np.linalg.norm(state)


class TestPositionVarianceOracle:
    """Test the closed-form Delta x against exact diagonalization."""

    def test_normal_phase(self):
        """Single-photon configuration below chi_c: ED approaches the closed form as N grows."""
        errors = []
        for N in (10, 100):
            p = params(chi=0.03, g0=0.249, n=1, N=N)
            analytic = solve_point(p.replace(N="thermodynamic-limit")).delta_x
            result = converge_cutoff(p)
            assert result.converged
            assert abs(result.x_mean) <= 1e-9
            error = abs(result.delta_x - analytic)
            assert error <= 2.0 * analytic / N
            errors.append(error)
        assert errors[1] < errors[0]

    @pytest.mark.slow
    def test_superradiant_phase(self):
        """Single-photon configuration above chi_c: Delta x is the spread about one displaced minimum."""
        errors = []
        for N, M in ((10, 220), (20, 360)):
            p = params(chi=0.1, g0=0.249, n=1, N=N)
            analytic = solve_point(p.replace(N="thermodynamic-limit"))
            state = localized_ground_state(build_dressed_hamiltonian(p, M=M))
            result = compute_observables(p, state, M, "dressed")

            assert abs(result.x_mean) == pytest.approx(math.sqrt(2.0 * N) * analytic.coherence, rel=3.0 / N)
            error = abs(result.delta_x - analytic.delta_x)
            assert error <= 3.0 * analytic.delta_x / N
            errors.append(error)
        assert errors[1] < errors[0]


@pytest.mark.slow
class TestFiniteSizeConvergence:
    """Test convergence of the finite-N order parameter towards N -> infinity."""

    def test_reversed_transition_monotone(self):
        chi = 0.055
        limit = solve_point(reversed_config(chi, N=4).replace(N="thermodynamic-limit")).psi_q
        gaps = []
        for N in (4, 10, 40, 100):
            result = converge_cutoff(reversed_config(chi, N=N))
            assert result.converged
            gaps.append(abs(result.psi_q - limit))
        assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))
        assert gaps[-1] <= 0.1


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
