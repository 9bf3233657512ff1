"""Nodal counts, surpluses and the graph quantities that bound them."""

from dataclasses import dataclass
import math

import numpy as np

from .kernels import edge_sign_counts
from .spectral import as_symmetric, symmetric_eigen

NODAL_SCALE = math.pi ** 1.5 / math.sqrt(2.0)
GAP_TOL = 1e-10
ZERO_TOL = 1e-12


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n
        self.components = n

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.components -= 1
        return True


@dataclass(frozen=True)
class GraphStructure:
    n: int
    edges: np.ndarray  # (m, 2) int array of pairs i < j
    components: int

    @property
    def num_edges(self):
        return int(self.edges.shape[0])

    @property
    def betti(self):
        return self.num_edges - self.n + self.components

    @property
    def connected(self):
        return self.components == 1


def graph_of(A, edge_tol=0.0):
    """Signed weighted graph of ``A``: one edge per ``i < j`` with ``|A[i, j]| > edge_tol``."""
    if edge_tol < 0:
        raise ValueError("edge_tol must be non-negative")
    A = np.asarray(A, dtype=np.float64)
    n = A.shape[0]
    iu, ju = np.triu_indices(n, 1)
    keep = np.abs(A[iu, ju]) > edge_tol
    edges = np.stack([iu[keep], ju[keep]], axis=1)
    uf = UnionFind(n)
    for i, j in edges.tolist():
        uf.union(i, j)
        if uf.components == 1:
            break
    return GraphStructure(n, edges, uf.components)


@dataclass
class NodalVector:
    n: int
    phi: np.ndarray
    sigma: np.ndarray
    phi_norm: np.ndarray
    sigma_norm: np.ndarray
    betti: int
    components: int
    generic: bool
    min_product_magnitude: float
    lambdas: np.ndarray


def normalized_count(counts, n):
    """``(pi^{3/2}/sqrt 2) (counts / C(n,2) - 1/2) sqrt(n)``."""
    pairs = n * (n - 1) / 2.0
    return NODAL_SCALE * (np.asarray(counts, dtype=np.float64) / pairs - 0.5) * math.sqrt(n)


def _genericity(A, spec, zero_tol, edge_tol=0.0):
    """Per-eigenvector genericity flags.

    Fails on a near-tied eigenvalue, an eigenvector entry below
    ``zero_tol * |phi|_inf``, or a kept edge weight below ``zero_tol * |A|_max``.
    Edge products are judged factor by factor: a product of three
    well-resolved factors has a reliable sign however small it is.
    """
    V = spec.vectors
    vmax = np.abs(V).max(axis=0)
    ok = np.abs(V).min(axis=0) > zero_tol * vmax
    gaps = np.diff(spec.lambdas)
    tied = np.zeros(spec.n, dtype=bool)
    tied[:-1] |= gaps <= GAP_TOL
    tied[1:] |= gaps <= GAP_TOL
    ok &= ~tied
    if spec.n > 1:
        w = np.abs(A[np.triu_indices(spec.n, 1)])
        w = w[w > edge_tol]
        if w.size and w.min() <= zero_tol * np.abs(A).max():
            ok[:] = False
    return ok


def nodal_count(A, spec, k, zero_tol=ZERO_TOL, edge_tol=0.0):
    """Nodal count of the ``k``-th eigenvector (1-based) and its genericity flag."""
    n = spec.n
    if not 1 <= k <= n:
        raise IndexError(f"k must be in 1..{n}, got {k}")
    A = np.asarray(A, dtype=np.float64)
    v = spec.vectors[:, k - 1]
    iu, ju = np.triu_indices(n, 1)
    a = A[iu, ju]
    keep = np.abs(a) > edge_tol
    p = a[keep] * v[iu[keep]] * v[ju[keep]]
    count = int(np.count_nonzero(p > 0.0))
    generic = bool(_genericity(A, spec, zero_tol, edge_tol)[k - 1])
    return count, generic


def nodal_all(A, zero_tol=ZERO_TOL, edge_tol=0.0, spec=None):
    """All nodal counts, surpluses and their normalisations for ``A``."""
    A = as_symmetric(A)
    if spec is None:
        spec = symmetric_eigen(A)
    n = spec.n
    counts, min_prod = edge_sign_counts(A, spec.vectors, edge_tol)
    generic = bool(np.all(_genericity(A, spec, zero_tol, edge_tol)))
    sigma = counts - np.arange(n)
    g = graph_of(A, edge_tol)
    return NodalVector(
        n=n,
        phi=counts,
        sigma=sigma,
        phi_norm=normalized_count(counts, n),
        sigma_norm=normalized_count(sigma, n),
        betti=g.betti,
        components=g.components,
        generic=generic,
        min_product_magnitude=float(min_prod.min()),
        lambdas=spec.lambdas,
    )


def surplus_average_bounds_check(nv):
    """``beta/n <= avg(sigma) <= beta - beta/n`` (1e-9 slack).

    Returns ``None`` (inconclusive) for non-generic or disconnected inputs.
    """
    if not nv.generic or nv.components != 1:
        return None
    b, n = nv.betti, nv.n
    a = float(np.mean(nv.sigma))
    return bool(b / n - 1e-9 <= a <= b - b / n + 1e-9)
