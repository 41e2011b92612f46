"""Tests for fattening, light-cone probes and the overlap witnesses."""

import numpy as np
import pytest

from mixphase.lindblad import LindbladTerm, Lindbladian, heisenberg_evolve
from mixphase.models import build_quantum_double, product_driver
from mixphase.models.paulis import X, Y, Z
from mixphase.nogo import (
    NOGO_HEADER,
    depolarizing_lindbladian,
    fatten,
    fattening_errors,
    fattening_region,
    ghz_nogo_probe,
    lr_probe,
    overlap_probe,
    rate_ladder,
    restriction_duality_residual,
    schwarz_gap,
    write_overlap_csv,
)
from mixphase.qstate import LatticeGeometry, LocalOperator
from mixphase.qstate.linalg import (
    operator_norm,
    random_density,
    random_hermitian,
    random_matrix,
)
from mixphase.utils.errors import ValidationError

HEISENBERG = np.kron(X, X) + np.kron(Y, Y) + np.kron(Z, Z)


@pytest.fixture
def rng():
    return np.random.default_rng(17)


@pytest.fixture(scope="module")
def z2_double():
    return build_quantum_double(2, 2, 2)


def random_lindbladian(rng, geometry, scale=0.5):
    terms = []
    for a, b in geometry.edges:
        terms.append(
            LindbladTerm((a, b), random_hermitian(4, rng), (scale * random_matrix(4, rng),))
        )
    for s in range(geometry.n_sites):
        terms.append(LindbladTerm((s,), None, (scale * random_matrix(2, rng),)))
    return Lindbladian(geometry, tuple(terms))


def heisenberg_ring(geometry, dephasing=0.3):
    terms = [LindbladTerm.coherent(edge, HEISENBERG) for edge in geometry.edges]
    terms += [
        LindbladTerm.dissipator((s,), [np.sqrt(dephasing) * Z]) for s in range(geometry.n_sites)
    ]
    return Lindbladian(geometry, tuple(terms))


class TestFattening:
    """fat_ell(A) = e^{t L*_{S_ell}}(A)."""

    def test_region(self):
        ring = LatticeGeometry.ring(6)
        assert fattening_region(ring, [0], 1) == (0, 1, 5)
        assert fattening_region(ring, [0, 1], 0) == (0, 1)

    def test_no_terms_inside_leaves_operator(self):
        geometry = LatticeGeometry.ring(4)
        lind = Lindbladian(geometry, (LindbladTerm.dissipator((2,), [Z]),))
        fat = fatten(lind, LocalOperator((0,), X), 1.0, 0)
        assert fat.region == (0,)
        np.testing.assert_array_equal(fat.matrix, X)

    def test_full_region_is_heisenberg_evolution(self, rng):
        geometry = LatticeGeometry.chain(2)
        lind = random_lindbladian(rng, geometry)
        a = random_matrix(2, rng)
        fat = fatten(lind, LocalOperator((0,), a), 0.8, 1)
        exact = heisenberg_evolve(lind, np.kron(a, np.eye(2)), 0.8)
        assert np.abs(fat.full(geometry) - exact).max() <= 1e-10

    def test_errors_decrease_with_radius(self):
        lind = heisenberg_ring(LatticeGeometry.ring(4))
        errors = fattening_errors(lind, LocalOperator((0,), X), 0.5, [0, 1, 2])
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] <= 1e-10

    def test_dual_contractivity(self, rng):
        lind = random_lindbladian(rng, LatticeGeometry.chain(3))
        a = random_matrix(2, rng)
        fat = fatten(lind, LocalOperator((1,), a), 1.0, 1)
        assert fat.norm <= operator_norm(a) + 1e-10

    def test_adjoint(self, rng):
        lind = random_lindbladian(rng, LatticeGeometry.chain(2))
        a = random_matrix(2, rng)
        fat = fatten(lind, LocalOperator((0,), a), 0.4, 1)
        fat_dagger = fatten(lind, LocalOperator((0,), a.conj().T), 0.4, 1)
        np.testing.assert_allclose(fat.dagger().matrix, fat_dagger.matrix, atol=1e-10)

    def test_negative_radius(self):
        lind = Lindbladian.zero(LatticeGeometry.chain(2))
        with pytest.raises(ValidationError):
            fatten(lind, LocalOperator((0,), X), 1.0, -1)

    def test_restriction_duality(self, rng):
        geometry = LatticeGeometry.chain(3)
        lind = random_lindbladian(rng, geometry)
        rho = random_density(8, rng)
        residual = restriction_duality_residual(lind, LocalOperator((0,), Z), rho, 0.6, 1)
        assert residual <= 1e-8


class TestSchwarz:
    """T*(A)^dag T*(A) <= T*(A^dag A)."""

    def test_random_channels(self, rng):
        geometry = LatticeGeometry.chain(2)
        for _ in range(20):
            lind = random_lindbladian(rng, geometry)
            a = random_matrix(4, rng)
            assert schwarz_gap(lind, a, 0.7, rng) <= 1e-9

    def test_unitary_evolution_saturates(self, rng):
        geometry = LatticeGeometry.chain(1)
        lind = Lindbladian(geometry, (LindbladTerm.coherent((0,), X),))
        assert abs(schwarz_gap(lind, Z, 1.3, rng)) <= 1e-10


class TestLightCone:
    """Commutators of evolved local operators."""

    def test_zero_time(self):
        lind = heisenberg_ring(LatticeGeometry.chain(4))
        probe = lr_probe(lind, X, 0, Z, [0.0], fit=False)
        assert probe.table.max() == 0.0

    def test_commuting_lindbladian(self):
        geometry = LatticeGeometry.chain(4)
        terms = [LindbladTerm.coherent(edge, np.kron(Z, Z)) for edge in geometry.edges]
        terms += [LindbladTerm.dissipator((s,), [Z]) for s in range(4)]
        lind = Lindbladian(geometry, tuple(terms))
        probe = lr_probe(lind, Z, 0, Z, [0.5, 1.0], fit=False)
        assert probe.table.max() <= 1e-12

    def test_cone_fit(self):
        lind = heisenberg_ring(LatticeGeometry.chain(6))
        probe = lr_probe(lind, X, 0, X, np.linspace(0.1, 1.0, 6))
        assert list(probe.distances) == [1, 2, 3, 4, 5]
        assert np.all(np.diff(probe.table[-1]) > 0)
        assert np.all(probe.table[0] >= probe.table[-1])
        assert probe.fit.velocity > 0
        assert probe.fit.decay > 0
        assert len(probe.rows()) == 30


class TestOverlapProbe:
    """Gram witnesses on the Z_2 double."""

    def test_noiseless_probe_is_exact(self, z2_double):
        lind = Lindbladian.zero(z2_double.geometry)
        report = overlap_probe(z2_double, None, lind, 1.0, 1)
        np.testing.assert_allclose(report.gram, report.reference, atol=1e-12)
        np.testing.assert_allclose(report.reference, np.eye(4), atol=1e-10)
        assert report.det_gap <= 1e-12
        assert report.schwarz_defect <= 1e-12
        assert report.position_defect <= 1e-10
        assert report.max_residual <= 1e-10

    def test_depolarizing_closed_form(self, z2_double):
        """X strings decay as e^{-2rt} and stabilizers as e^{-4rt}."""
        r, t = 0.1, 1.0
        lind = depolarizing_lindbladian(z2_double.geometry, r)
        report = overlap_probe(z2_double, None, lind, t, 0)
        assert report.det_gram == pytest.approx(np.exp(-16 * r * t), rel=1e-6)
        assert report.schwarz_defect == pytest.approx(1 - np.exp(-4 * r * t), rel=1e-6)
        assert report.max_residual == pytest.approx(4 * (1 - np.exp(-4 * r * t)), rel=1e-6)
        assert report.position_defect > 0

    @pytest.mark.slow
    def test_rate_ladder_is_monotone(self, z2_double, tmp_path):
        reports = rate_ladder(z2_double, [0.0, 0.05, 0.1, 0.2], 1.0, 1)
        gaps = [rep.det_gap for rep in reports]
        defects = [rep.schwarz_defect for rep in reports]
        assert gaps[0] <= 1e-12
        assert np.all(np.diff(gaps) > 0)
        assert np.all(np.diff(defects) > 0)
        out = tmp_path / "nogo.csv"
        write_overlap_csv(out, reports)
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(NOGO_HEADER)
        assert len(lines) == 5

    def test_lattice_mismatch(self, z2_double):
        with pytest.raises(ValidationError):
            overlap_probe(z2_double, None, Lindbladian.zero(LatticeGeometry.chain(2)), 1.0, 1)

    def test_unnormalized_ket(self, z2_double):
        lind = Lindbladian.zero(z2_double.geometry)
        with pytest.raises(ValidationError):
            overlap_probe(z2_double, 2 * z2_double.vacuum(), lind, 1.0, 1)

    def test_negative_rate(self, z2_double):
        with pytest.raises(ValidationError):
            depolarizing_lindbladian(z2_double.geometry, -0.1)


class TestGHZProbe:
    """The one-dimensional analogue on GHZ chains."""

    def test_rank_equals_sublattice_size(self):
        report = ghz_nogo_probe(2, 4, None, 1.0, 1, n_sites=3)
        assert report.rank == 2
        assert report.max_residual <= 1e-12

    def test_full_family_is_orthonormal(self):
        report = ghz_nogo_probe(2, 2, None, 1.0, 1, n_sites=3)
        np.testing.assert_allclose(report.gram, np.eye(2), atol=1e-12)

    def test_incompatible_driver_raises_residuals(self):
        geometry = LatticeGeometry.chain(3, 4)
        level_one = np.eye(4)[1]
        lind = product_driver(geometry, level_one).lindbladian()
        residuals = [
            ghz_nogo_probe(2, 4, lind, t, 1, n_sites=3).max_residual for t in (0.0, 0.5, 1.0)
        ]
        assert residuals[0] <= 1e-12
        assert residuals[0] < residuals[1] < residuals[2]

    def test_mismatched_lindbladian(self):
        with pytest.raises(ValidationError):
            ghz_nogo_probe(2, 4, Lindbladian.zero(LatticeGeometry.chain(3)), 1.0, 1, n_sites=3)

    def test_sublattice_must_divide(self):
        with pytest.raises(ValidationError):
            ghz_nogo_probe(3, 4, None, 1.0, 1, n_sites=2)
