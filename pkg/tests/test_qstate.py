"""Tests for geometries, states, local operators and norms."""

import numpy as np
import pytest

from mixphase.qstate import (
    DensityMatrix,
    Ket,
    LatticeGeometry,
    LocalOperator,
    ProductOperator,
    apply_local,
    conditional_expectation,
    embed,
    embed_matrix,
    load_matrix,
    matrix_from_json,
    matrix_to_json,
    partial_trace,
    partial_trace_array,
    save_matrix,
    trace_distance,
    trace_norm,
)
from mixphase.qstate.linalg import (
    NumericPolicy,
    min_eigenvalue,
    random_density,
    random_unitary,
    von_neumann_entropy,
)
from mixphase.utils.errors import DimensionError, NumericGuardError, ValidationError

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


class TestGeometry:
    """Test lattice geometries and their metric."""

    def test_ring_distances(self):
        """Ring distance wraps around."""
        ring = LatticeGeometry.ring(8)
        assert ring.distance(0, 7) == 1
        assert ring.distance(0, 4) == 4
        assert ring.diameter == 4
        assert ring.dim == 256

    def test_ball_and_neighborhood(self):
        """Balls are strict, neighborhoods inclusive."""
        ring = LatticeGeometry.ring(8)
        assert ring.ball(0, 2) == frozenset({7, 0, 1})
        assert ring.neighborhood([0], 2) == frozenset({6, 7, 0, 1, 2})
        assert ring.neighborhood([], 3) == frozenset()

    def test_chain_is_open(self):
        """Chain ends are far apart."""
        chain = LatticeGeometry.chain(5)
        assert chain.distance(0, 4) == 4

    def test_torus_edge_indexing(self):
        """Torus edges sharing a vertex are adjacent."""
        torus = LatticeGeometry.torus_edges(2, 2)
        assert torus.n_sites == 8
        assert torus.spatial_dim == 2
        # h(0,0)=0 and v(0,0)=4 meet at vertex (0,0)
        assert torus.distance(0, 4) == 1

    def test_restrict_reindexes(self):
        """Restriction keeps induced edges and sorts sites."""
        ring = LatticeGeometry.ring(6)
        sub = ring.restrict([4, 5, 0])
        assert sub.n_sites == 3
        # sites (0, 4, 5) -> (0, 1, 2); edges 4-5 and 5-0 survive
        assert sub.distance(1, 2) == 1
        assert sub.distance(0, 2) == 1
        assert sub.distance(0, 1) == 2

    def test_unknown_sites_rejected(self):
        """Unknown sites raise DimensionError."""
        with pytest.raises(DimensionError, match="unknown sites"):
            LatticeGeometry.ring(3).validate_sites([0, 5])

    def test_disconnected_distance_is_infinite(self):
        """Sites without edges are infinitely far apart."""
        geom = LatticeGeometry.sites([2, 2], edges=[])
        assert np.isinf(geom.distance(0, 1))


class TestNorms:
    """Test norms and partial traces."""

    def test_trace_distance_orthogonal_states(self):
        """Orthogonal pure states are at distance one."""
        assert trace_distance(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == pytest.approx(1.0)

    def test_trace_norm_non_hermitian(self):
        """Non-Hermitian input uses singular values."""
        a = np.array([[0, 2], [0, 0]], dtype=complex)
        assert trace_norm(a) == pytest.approx(2.0)

    def test_trace_norm_requires_square(self):
        """Rectangular input is rejected."""
        with pytest.raises(DimensionError):
            trace_norm(np.zeros((2, 3)))

    def test_partial_trace_of_product(self, rng):
        """Tracing out a factor of a product state leaves the other factor."""
        a = random_density(2, rng)
        b = random_density(3, rng)
        np.testing.assert_allclose(partial_trace_array(np.kron(a, b), [2, 3], [0]), a, atol=1e-12)
        np.testing.assert_allclose(partial_trace_array(np.kron(a, b), [2, 3], [1]), b, atol=1e-12)

    def test_partial_trace_empty_keep(self, rng):
        """Empty keep returns the trace."""
        rho = random_density(4, rng)
        out = partial_trace_array(rho, [2, 2], [])
        assert out.shape == (1, 1)
        assert out[0, 0] == pytest.approx(1.0)

    def test_entropy_of_maximally_mixed(self):
        """Maximally mixed qubit pair has two bits of entropy."""
        assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0)

    def test_trace_norm_unitary_invariance(self, rng):
        """Trace norm is invariant under unitary conjugation."""
        rho = random_density(4, rng) - random_density(4, rng)
        u = random_unitary(4, rng)
        assert trace_norm(u @ rho @ u.conj().T) == pytest.approx(trace_norm(rho), abs=1e-10)

    def test_dense_guard(self):
        """Dense operations beyond the limit raise NumericGuardError."""
        policy = NumericPolicy(dense_dim_limit=8)
        with pytest.raises(NumericGuardError) as exc:
            policy.check_dense(16)
        assert exc.value.guard == "dense_dim_limit"


class TestStates:
    """Test kets and density matrices."""

    def test_basis_ket(self):
        """Basis kets put weight on the right index, site 0 leftmost."""
        geom = LatticeGeometry.chain(2)
        ket = Ket.basis(geom, [1, 0])
        assert ket.amplitudes[2] == 1.0

    def test_unnormalized_ket_rejected(self):
        """Kets flagged normalized must have unit norm."""
        with pytest.raises(ValidationError):
            Ket(LatticeGeometry.chain(1), np.array([1.0, 1.0]))

    def test_density_validation(self):
        """Invalid traces and negative eigenvalues are rejected."""
        geom = LatticeGeometry.chain(1)
        with pytest.raises(ValidationError, match="trace"):
            DensityMatrix(geom, np.eye(2))
        with pytest.raises(ValidationError, match="negative"):
            DensityMatrix(geom, np.diag([1.5, -0.5]))

    def test_dimension_mismatch(self):
        """Matrix shape must match the geometry."""
        with pytest.raises(DimensionError):
            DensityMatrix(LatticeGeometry.chain(2), np.eye(2) / 2)

    def test_partial_trace_of_bell_state(self):
        """Half of a Bell pair is maximally mixed."""
        geom = LatticeGeometry.chain(2)
        bell = Ket(geom, np.array([1, 0, 0, 1]) / np.sqrt(2)).density()
        reduced = partial_trace(bell, [1])
        np.testing.assert_allclose(reduced.matrix, np.eye(2) / 2, atol=1e-12)
        assert reduced.geometry.n_sites == 1

    def test_min_eigenvalue_of_random_state(self, rng):
        """Random density matrices are positive."""
        rho = DensityMatrix.random(LatticeGeometry.chain(3), rng)
        assert min_eigenvalue(rho.matrix) >= -1e-12


class TestOperators:
    """Test embeddings and local operator algebra."""

    def test_embed_orders_factors_by_support(self):
        """Support order fixes the Kronecker factor order."""
        geom = LatticeGeometry.chain(3)
        op = LocalOperator((2, 0), np.kron(X, Z))
        expected = np.kron(np.kron(Z, np.eye(2)), X)
        np.testing.assert_allclose(embed(op, geom), expected)

    def test_embed_sparse_matches_dense(self):
        """Sparse and dense embeddings agree."""
        dims = [2, 3, 2]
        m = np.arange(36, dtype=complex).reshape(6, 6)
        dense = embed_matrix(m, [2, 1], dims)
        sparse = embed_matrix(m, [2, 1], dims, sparse=True)
        np.testing.assert_allclose(sparse.toarray(), dense)

    def test_embed_unknown_site(self):
        """Embedding on an unknown site fails."""
        with pytest.raises(DimensionError, match="unknown sites"):
            embed_matrix(X, [3], [2, 2])

    def test_apply_local_matches_embedding(self, rng):
        """Tensor contraction equals multiplication by the embedded matrix."""
        dims = [2, 3, 2]
        ket = rng.normal(size=12) + 1j * rng.normal(size=12)
        m = rng.normal(size=(4, 4)) + 0j
        direct = embed_matrix(m, [2, 0], dims) @ ket
        np.testing.assert_allclose(apply_local(ket, m, [2, 0], dims), direct, atol=1e-12)

    def test_conditional_expectation_idempotent(self, rng):
        """E is idempotent and keeps operators already supported on keep."""
        dims = [2, 2, 2]
        a = rng.normal(size=(8, 8)) + 0j
        once = conditional_expectation(a, dims, [0, 2])
        np.testing.assert_allclose(conditional_expectation(once, dims, [0, 2]), once, atol=1e-12)
        local = embed_matrix(np.kron(X, Z), [0, 2], dims)
        np.testing.assert_allclose(conditional_expectation(local, dims, [0, 2]), local)

    def test_product_operator_apply(self, rng):
        """Product operators act like their dense form."""
        dims = [2, 2, 2]
        prod = ProductOperator({0: X, 2: Z})
        ket = rng.normal(size=8) + 0j
        np.testing.assert_allclose(prod.apply(ket, dims), prod.dense(dims) @ ket, atol=1e-12)

    def test_local_and_product_dagger_agree(self):
        """Both operator types take the adjoint through the same method."""
        y = np.array([[0, -1j], [1j, 0]])
        prod = ProductOperator({0: X @ y, 1: y})
        local = prod.to_local()
        np.testing.assert_allclose(local.dagger().matrix, local.matrix.conj().T)
        np.testing.assert_allclose(prod.dagger().to_local().matrix, local.dagger().matrix)
        assert local.dagger().support == local.support


class TestMatrixPayload:
    """Test the JSON matrix layout."""

    def test_json_roundtrip(self, tmp_path):
        """Saved matrices load back unchanged."""
        m = np.array([[1, 1j], [-1j, 2]])
        path = tmp_path / "m.json"
        save_matrix(path, m, [2])
        loaded, dims = load_matrix(path)
        np.testing.assert_array_equal(loaded, m)
        assert dims == (2,)

    def test_bad_shape_rejected(self):
        """Shape mismatches raise ValidationError."""
        data = matrix_to_json(np.eye(2), [2])
        data["dims"] = [2, 2]
        with pytest.raises(ValidationError):
            matrix_from_json(data)

    def test_extra_fields_rejected(self):
        """Unknown keys are not allowed."""
        data = matrix_to_json(np.eye(2), [2])
        data["scale"] = 2
        with pytest.raises(ValidationError):
            matrix_from_json(data)
