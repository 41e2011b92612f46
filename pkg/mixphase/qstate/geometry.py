"""Lattice geometries: site lists, local dimensions and graph distances.

Site 0 is the leftmost (slowest) Kronecker factor everywhere in mixphase.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from mixphase.utils.errors import DimensionError, ValidationError


class LatticeKind(Enum):
    """Kinds of lattice a geometry can describe."""

    RING = "ring"
    CHAIN = "chain"
    TORUS_EDGES = "torus_edges"
    SITES = "sites"


@dataclass(frozen=True, eq=False)
class LatticeGeometry:
    """
    Sites with local dimensions and a graph metric.

    Attributes:
        kind: Lattice kind
        local_dims: Local Hilbert dimension per site
        edges: Undirected adjacency used for the graph distance
        spatial_dim: Growth exponent d of balls, |B(j, a)| <= kappa * a**d
        kappa: Stored ball-growth constant
        shape: Extra shape information (ring length, torus (Lx, Ly))
    """

    kind: LatticeKind
    local_dims: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...] = ()
    spatial_dim: int = 1
    kappa: float = 2.0
    shape: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        if any(int(d) < 1 for d in self.local_dims):
            raise ValidationError(f"Local dimensions must be positive, got {self.local_dims}")
        for a, b in self.edges:
            if not (0 <= a < self.n_sites and 0 <= b < self.n_sites):
                raise DimensionError(f"Edge ({a}, {b}) references unknown sites")

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def ring(cls, n: int, local_dim: int = 2) -> "LatticeGeometry":
        """Periodic 1D ring of ``n`` sites."""
        if n < 1:
            raise ValidationError("Ring needs at least one site")
        edges = tuple((i, (i + 1) % n) for i in range(n)) if n > 1 else ()
        return cls(LatticeKind.RING, (local_dim,) * n, edges, 1, 2.0, (n,))

    @classmethod
    def chain(cls, n: int, local_dim: int = 2) -> "LatticeGeometry":
        """Open 1D chain of ``n`` sites."""
        edges = tuple((i, i + 1) for i in range(n - 1))
        return cls(LatticeKind.CHAIN, (local_dim,) * n, edges, 1, 2.0, (n,))

    @classmethod
    def sites(
        cls, local_dims: Sequence[int], edges: Optional[Iterable[Tuple[int, int]]] = None
    ) -> "LatticeGeometry":
        """Abstract site list; without explicit edges the sites form a path."""
        local_dims = tuple(int(d) for d in local_dims)
        if edges is None:
            edges = [(i, i + 1) for i in range(len(local_dims) - 1)]
        return cls(LatticeKind.SITES, local_dims, tuple(edges), 1, 2.0, (len(local_dims),))

    @classmethod
    def torus_edges(cls, lx: int, ly: int, local_dim: int = 2) -> "LatticeGeometry":
        """
        Edge qudits of an ``lx`` x ``ly`` square torus.

        Horizontal edge h(x, y) has index ``y * lx + x`` and joins vertex (x, y)
        to (x + 1, y); vertical edge v(x, y) has index ``lx * ly + y * lx + x``
        and joins (x, y) to (x, y + 1). Two edges are adjacent when they share
        a vertex.
        """
        if lx < 2 or ly < 2:
            raise ValidationError("Torus needs lx, ly >= 2")
        incident: List[List[int]] = [[] for _ in range(lx * ly)]

        def vertex(x: int, y: int) -> int:
            return (y % ly) * lx + (x % lx)

        for y in range(ly):
            for x in range(lx):
                h = y * lx + x
                v = lx * ly + y * lx + x
                incident[vertex(x, y)] += [h, v]
                incident[vertex(x + 1, y)].append(h)
                incident[vertex(x, y + 1)].append(v)
        edges = set()
        for star in incident:
            for i in star:
                for j in star:
                    if i < j:
                        edges.add((i, j))
        return cls(
            LatticeKind.TORUS_EDGES,
            (local_dim,) * (2 * lx * ly),
            tuple(sorted(edges)),
            2,
            8.0,
            (lx, ly),
        )

    # ------------------------------------------------------------------
    # Basic properties
    # ------------------------------------------------------------------

    @property
    def n_sites(self) -> int:
        return len(self.local_dims)

    @property
    def dim(self) -> int:
        """Total Hilbert-space dimension."""
        return int(np.prod(self.local_dims, dtype=np.int64)) if self.local_dims else 1

    def dims_of(self, sites: Iterable[int]) -> Tuple[int, ...]:
        """Local dimensions of ``sites`` in the given order."""
        sites = tuple(sites)
        self.validate_sites(sites)
        return tuple(self.local_dims[s] for s in sites)

    def validate_sites(self, sites: Iterable[int]) -> None:
        """
        Check that all sites belong to this geometry.

        Raises:
            DimensionError: If a site is unknown or repeated
        """
        sites = list(sites)
        unknown = [s for s in sites if not (0 <= int(s) < self.n_sites)]
        if unknown:
            raise DimensionError(f"unknown sites {unknown} for geometry with {self.n_sites} sites")
        if len(set(sites)) != len(sites):
            raise DimensionError(f"Repeated sites in {sites}")

    # ------------------------------------------------------------------
    # Metric
    # ------------------------------------------------------------------

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        """All-pairs graph distances; disconnected pairs are ``inf``."""
        n = self.n_sites
        if n == 0:
            return np.zeros((0, 0))
        if not self.edges:
            dist = np.full((n, n), np.inf)
            np.fill_diagonal(dist, 0.0)
            return dist
        rows = [a for a, b in self.edges]
        cols = [b for a, b in self.edges]
        graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
        return shortest_path(graph, directed=False, unweighted=True)

    def distance(self, i: int, j: int) -> float:
        return float(self.distance_matrix[i, j])

    def set_distance(self, x: int, sites: Iterable[int]) -> float:
        """Distance from site ``x`` to the nearest site of ``sites``."""
        sites = list(sites)
        if not sites:
            return np.inf
        return float(self.distance_matrix[x, sites].min())

    @property
    def diameter(self) -> float:
        """Largest finite distance between two sites."""
        finite = self.distance_matrix[np.isfinite(self.distance_matrix)]
        return float(finite.max()) if finite.size else 0.0

    def ball(self, j: int, alpha: float) -> FrozenSet[int]:
        """B(j, alpha) = {i : d(i, j) < alpha}."""
        return frozenset(int(i) for i in np.flatnonzero(self.distance_matrix[j] < alpha))

    def neighborhood(self, sites: Iterable[int], ell: float) -> FrozenSet[int]:
        """S_ell(sites) = {x : d(x, sites) <= ell}."""
        sites = list(sites)
        if not sites:
            return frozenset()
        dist = self.distance_matrix[:, sites].min(axis=1)
        return frozenset(int(i) for i in np.flatnonzero(dist <= ell))

    def ball_bound(self, alpha: float) -> float:
        """The stored growth bound kappa * alpha**d."""
        return self.kappa * alpha**self.spatial_dim

    # ------------------------------------------------------------------
    # Derived geometries
    # ------------------------------------------------------------------

    def restrict(self, sites: Iterable[int]) -> "LatticeGeometry":
        """
        Sub-geometry on ``sites`` (sorted), keeping induced edges.

        Site ``sites_sorted[k]`` becomes site ``k`` of the result.
        """
        kept = sorted(set(sites))
        self.validate_sites(kept)
        index = {s: k for k, s in enumerate(kept)}
        edges = tuple(
            (index[a], index[b]) for a, b in self.edges if a in index and b in index
        )
        return LatticeGeometry(
            LatticeKind.SITES,
            tuple(self.local_dims[s] for s in kept),
            edges,
            self.spatial_dim,
            self.kappa,
            (len(kept),),
        )

    def concat(self, other: "LatticeGeometry") -> "LatticeGeometry":
        """Disjoint union; ``other``'s sites follow this geometry's sites."""
        offset = self.n_sites
        edges = self.edges + tuple((a + offset, b + offset) for a, b in other.edges)
        return LatticeGeometry(
            LatticeKind.SITES,
            self.local_dims + other.local_dims,
            edges,
            max(self.spatial_dim, other.spatial_dim),
            max(self.kappa, other.kappa),
            (self.n_sites + other.n_sites,),
        )

    def __repr__(self) -> str:
        return (
            f"LatticeGeometry(kind={self.kind.value}, sites={self.n_sites}, "
            f"local_dims={set(self.local_dims)})"
        )
