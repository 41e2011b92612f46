"""Tests for product drivers, GHZ condensation, quantum doubles and the SPT bridge."""

import numpy as np
import pytest

from mixphase.lindblad import Lindbladian, evolve_expm
from mixphase.models import (
    GHZFamily,
    SiteChannel,
    basis_generation_check,
    bridge_evolution,
    build_quantum_double,
    build_rep,
    condensation_channel,
    covariance_check,
    distance_bound,
    ghz_condense_channel,
    pauli_rep,
    product_driver,
    psi_plus,
    replacement_channel,
    spt_bridge_states,
    trivial_rep,
)
from mixphase.models.paulis import X
from mixphase.models.spt import ELEMENTS, IsometricMPS, ProjectiveRep
from mixphase.qstate import LatticeGeometry
from mixphase.qstate.linalg import NumericPolicy, random_density, random_ket, trace_distance
from mixphase.utils.errors import DimensionError, NumericGuardError, ValidationError

PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture(scope="module")
def z2_double():
    return build_quantum_double(2, 2, 2)


class TestSiteChannel:
    """Single-site channels and their transfer matrices."""

    def test_replacement_is_idempotent(self):
        assert replacement_channel(PLUS).idempotence_residual() <= 1e-12

    def test_condensation_is_idempotent(self):
        channel = condensation_channel(4, 2)
        assert channel.dim == 4
        assert channel.idempotence_residual() <= 1e-12

    def test_condensation_moves_odd_levels_down(self):
        channel = condensation_channel(4, 2)
        rho = np.zeros((4, 4), dtype=complex)
        rho[3, 3] = 1.0
        out = channel.apply(rho)
        assert out[2, 2] == pytest.approx(1.0)

    def test_sublattice_must_divide(self):
        with pytest.raises(ValidationError):
            condensation_channel(4, 3)

    def test_not_trace_preserving(self):
        with pytest.raises(ValidationError):
            SiteChannel((0.5 * np.eye(2),))

    def test_zero_target(self):
        with pytest.raises(ValidationError):
            replacement_channel(np.zeros(2))


class TestProductDriver:
    """Closed-form evolution of L = sum_i (T_i - id)."""

    def test_closed_form_matches_expm(self, rng):
        geometry = LatticeGeometry.chain(3)
        driver = product_driver(geometry, PLUS)
        rho = random_density(8, rng)
        closed = driver.closed_form_evolve(rho, 2.0)
        exact = evolve_expm(driver.lindbladian(), rho, 2.0).matrix
        assert np.abs(closed - exact).max() <= 1e-9

    def test_zero_time_is_identity(self, rng):
        driver = product_driver(LatticeGeometry.chain(2), PLUS)
        rho = random_density(4, rng)
        np.testing.assert_allclose(driver.closed_form_evolve(rho, 0.0), rho, atol=1e-14)

    def test_negative_time(self):
        driver = product_driver(LatticeGeometry.chain(1), PLUS)
        with pytest.raises(ValidationError):
            driver.closed_form_evolve(np.eye(2) / 2, -1.0)

    def test_distance_bound(self, rng):
        geometry = LatticeGeometry.chain(3)
        driver = product_driver(geometry, PLUS)
        rho = random_density(8, rng)
        times = [0.1, 0.5, 1.0, 3.0]
        for t, d in zip(times, driver.trajectory_distances(rho, times)):
            assert d <= driver.distance_bound(t) + 1e-12
        assert distance_bound(0.0, 3) == pytest.approx(1.0)

    def test_subset_of_sites(self):
        geometry = LatticeGeometry.chain(2)
        driver = product_driver(geometry, PLUS, sites=[1])
        zero = np.diag([1.0, 0.0, 0.0, 0.0]).astype(complex)
        fixed = driver.fixed_point(zero)
        expected = np.kron(np.diag([1.0, 0.0]), np.outer(PLUS, PLUS.conj()))
        np.testing.assert_allclose(fixed, expected, atol=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            product_driver(LatticeGeometry.chain(2), psi_plus(2))

    def test_rejects_non_idempotent_channel(self):
        from mixphase.models.drivers import ProductDriver

        flip = SiteChannel((np.sqrt(0.7) * np.eye(2), np.sqrt(0.3) * X), "bit_flip")
        with pytest.raises(ValidationError):
            ProductDriver(LatticeGeometry.chain(1), flip)


class TestGHZ:
    """GHZ families and their condensation."""

    def test_basis_is_orthonormal(self):
        family = GHZFamily(LatticeGeometry.chain(3, 3))
        assert family.orthonormality_residual() <= 1e-12
        assert family.change_of_basis_residual() <= 1e-12

    def test_clock_generates_family(self):
        family = GHZFamily(LatticeGeometry.chain(3, 3))
        assert family.clock_action_residual(1) <= 1e-12

    def test_sublattice_levels(self):
        family = GHZFamily(LatticeGeometry.chain(2, 4), m=2)
        assert family.levels == [0, 2]
        assert family.clock_action_residual(0) <= 1e-12

    def test_parent_energy(self):
        geometry = LatticeGeometry.chain(3, 2)
        family = GHZFamily(geometry)
        assert family.ground_energy(family.density(1)) == pytest.approx(0.0, abs=1e-12)
        product = np.zeros(8, dtype=complex)
        product[0b010] = 1.0
        assert family.ground_energy(np.outer(product, product)) > 0.5

    def test_size_must_divide(self):
        with pytest.raises(ValidationError):
            GHZFamily(LatticeGeometry.chain(2, 4), m=3)

    def test_condensation_fixed_point(self):
        geometry = LatticeGeometry.chain(4, 4)
        driver = ghz_condense_channel(geometry, 2)
        ghz4 = GHZFamily(geometry).density(0)
        ghz2 = GHZFamily(geometry, m=2).density(0)
        assert trace_distance(driver.fixed_point(ghz4), ghz2) <= 1e-12
        assert trace_distance(driver.closed_form_evolve(ghz4, 40.0), ghz2) <= 1e-10

    def test_condensation_is_monotone(self):
        geometry = LatticeGeometry.chain(4, 4)
        driver = ghz_condense_channel(geometry, 2)
        distances = driver.trajectory_distances(GHZFamily(geometry).density(0), [0.5, 1.0, 2.0])
        assert distances[0] > distances[1] > distances[2]

    def test_uniform_dimension_required(self):
        geometry = LatticeGeometry.sites([4, 2])
        with pytest.raises(DimensionError):
            ghz_condense_channel(geometry, 2)


class TestCovariance:
    """U^dag L(U rho U^dag) U = L(rho) for on-site symmetries."""

    def test_zero_lindbladian(self):
        geometry = LatticeGeometry.chain(2)
        assert covariance_check(Lindbladian.zero(geometry), [X]) == 0.0

    def test_plus_driver_is_covariant(self):
        rep = pauli_rep()
        geometry = LatticeGeometry.chain(2, 4)
        driver = product_driver(geometry, psi_plus(2))
        assert covariance_check(driver.lindbladian(), rep.onsite_unitaries()) <= 1e-10

    def test_product_target_breaks_covariance(self):
        rep = pauli_rep()
        geometry = LatticeGeometry.chain(2, 4)
        zero = np.zeros(4, dtype=complex)
        zero[0] = 1.0
        driver = product_driver(geometry, zero)
        assert covariance_check(driver.lindbladian(), rep.onsite_unitaries()) > 0.1

    def test_dense_guard(self):
        geometry = LatticeGeometry.chain(3)
        policy = NumericPolicy(dense_dim_limit=4)
        with pytest.raises(NumericGuardError):
            covariance_check(Lindbladian.zero(geometry), [X], policy=policy)


class TestQuantumDouble:
    """D(Z_n) on the torus."""

    def test_ground_space_dimension(self, z2_double):
        assert z2_double.ground_space_dimension() == 4

    def test_stabilizer_counting(self, z2_double):
        assert z2_double.stabilizer_count() == 8
        assert z2_double.redundancies() == 2

    def test_stabilizers_commute(self, z2_double):
        assert z2_double.commutation_residual() <= 1e-12

    def test_logical_anticommutation_dense(self, z2_double):
        dims = z2_double.dims
        xx = z2_double.x_x().dense(dims)
        zy = z2_double.z_y().dense(dims)
        np.testing.assert_allclose(xx @ zy, -zy @ xx, atol=1e-12)

    def test_homotopy(self, z2_double):
        assert z2_double.homotopy_residual() <= 1e-10

    def test_basis(self, z2_double):
        assert z2_double.basis.shape == (256, 4)
        assert z2_double.basis_orthonormality_residual() <= 1e-10
        assert z2_double.ground_space_residual() <= 1e-10

    def test_z3_ket_checks(self):
        qd = build_quantum_double(3, 2, 2)
        assert qd.basis.shape == (3**8, 9)
        assert qd.logical_algebra_residual() <= 1e-10
        assert qd.commutation_residual() <= 1e-10
        assert qd.homotopy_residual() <= 1e-10

    def test_ket_guard(self):
        with pytest.raises(NumericGuardError) as exc:
            build_quantum_double(2, 3, 3, NumericPolicy(ket_dim_limit=2**10))
        assert exc.value.guard == "ket_dim_limit"

    def test_group_order(self):
        with pytest.raises(ValidationError):
            build_quantum_double(1, 2, 2)


class TestBasisGeneration:
    """Ladder and diagonal orbits of ground-space vectors."""

    def test_ladder_is_string_shift(self, z2_double):
        """X~^(gamma + n delta) moves |alpha, beta> to |alpha + gamma, beta + delta>."""
        n = z2_double.n
        identity = np.eye(n * n)
        for gamma in range(n):
            for delta in range(n):
                shift = z2_double.ladder(gamma + n * delta)
                for alpha in range(n):
                    for beta in range(n):
                        column = shift[:, z2_double.index(alpha, beta)]
                        target = identity[z2_double.index(alpha + gamma, beta + delta)]
                        np.testing.assert_allclose(column, target, atol=1e-10)

    def test_diagonal_strings_are_characters(self, z2_double):
        """The Z~^i are diagonal and mutually orthogonal as character vectors."""
        size = z2_double.n**2
        mats = [z2_double.diagonal(i) for i in range(size)]
        for mat in mats:
            np.testing.assert_allclose(mat, np.diag(np.diag(mat)), atol=1e-10)
        chars = np.array([np.diag(mat) for mat in mats])
        np.testing.assert_allclose(chars @ chars.conj().T, size * np.eye(size), atol=1e-10)

    def test_diagonal_eigenvector(self, z2_double):
        report = basis_generation_check(z2_double, np.eye(4)[0])
        assert report.rank_x == 4
        assert report.rank_z == 1
        assert report.generates

    def test_uniform_superposition(self, z2_double):
        report = basis_generation_check(z2_double, np.ones(4) / 2)
        assert report.rank_x == 1
        assert report.rank_z == 4
        assert report.generates

    def test_full_ket_input(self, z2_double):
        assert basis_generation_check(z2_double, z2_double.basis[:, 2]).generates

    def test_random_states(self, z2_double, rng):
        assert all(
            basis_generation_check(z2_double, random_ket(4, rng)).generates for _ in range(100)
        )

    def test_unnormalized(self, z2_double):
        with pytest.raises(ValidationError):
            basis_generation_check(z2_double, np.ones(4))


class TestProjectiveRep:
    """Z2 x Z2 representations and their cohomology class."""

    def test_onsite_is_linear(self):
        for rep in (pauli_rep(), trivial_rep()):
            assert rep.linearity_residual() <= 1e-12
            assert rep.cocycle_residual() <= 1e-12

    def test_pauli_class_is_nontrivial(self):
        rep = pauli_rep()
        assert rep.commutator_phase() == pytest.approx(-1.0)
        assert not rep.is_trivial
        assert trivial_rep().is_trivial

    def test_registry(self):
        assert not build_rep("nontrivial").is_trivial
        with pytest.raises(ValidationError):
            build_rep("haldane")

    def test_non_unitary(self):
        matrices = {g: 2 * np.eye(2) for g in ELEMENTS}
        with pytest.raises(ValidationError):
            ProjectiveRep("bad", matrices)


class TestSPTBridge:
    """Covariant bridge between two SPT classes."""

    def test_mps_is_symmetric(self):
        mps = IsometricMPS(4, pauli_rep())
        assert np.linalg.norm(mps.ket()) == pytest.approx(1.0)
        assert mps.symmetry_defect() <= 1e-12

    def test_bridge_converges(self):
        bridge = spt_bridge_states(pauli_rep(), trivial_rep(), n_sites=4)
        report = bridge_evolution(bridge, [0.0, 30.0])
        start, final = report.samples
        assert start.total_distance > 0.5
        assert final.total_distance <= 1e-9
        assert final.distances[2] == 0.0
        assert max(report.covariance) <= 1e-10
        assert max(max(s.symmetry_defects) for s in report.samples) <= 1e-10
        assert report.rows()[1][0] == 30.0

    def test_bond_dimension_mismatch(self):
        one = ProjectiveRep("scalar", {g: np.eye(1, dtype=complex) for g in ELEMENTS})
        with pytest.raises(ValidationError):
            spt_bridge_states(pauli_rep(), one)
