"""Hot loops, each in a numba flavour and a pure-numpy flavour.

The public names (``edge_sign_counts``, ``frame_edge_signs``) dispatch on
:data:`nodalcount._accel.USE_NUMBA`. The ``*_numba`` / ``*_numpy`` variants
are exported so tests and the benchmark can compare them directly.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

__all__ = [
    "edge_sign_counts",
    "edge_sign_counts_numba",
    "edge_sign_counts_numpy",
    "frame_edge_signs",
    "frame_edge_signs_numba",
    "frame_edge_signs_numpy",
    "pair_index",
]


# --------------------------------------------------------------------------
# nodal counts for every eigenvector at once
# --------------------------------------------------------------------------


_KBLOCK = 32


def _edge_sign_counts_loop(A, V, edge_tol):
    # eigenvectors are processed in column blocks so each pass over the upper
    # triangle of A serves _KBLOCK of them (the loop is memory bound otherwise)
    n = A.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    min_prod = np.full(n, np.inf)
    cb = np.zeros(_KBLOCK, dtype=np.int64)
    mb = np.empty(_KBLOCK)
    for k0 in range(0, n, _KBLOCK):
        kw = min(_KBLOCK, n - k0)
        Vb = np.ascontiguousarray(V[:, k0:k0 + kw])
        cb[:] = 0
        mb[:] = np.inf
        for i in range(n - 1):
            vi = Vb[i]
            for j in range(i + 1, n):
                a = A[i, j]
                if abs(a) <= edge_tol:
                    continue
                vj = Vb[j]
                for t in range(kw):
                    p = a * vi[t] * vj[t]
                    cb[t] += p > 0.0
                    mb[t] = min(mb[t], abs(p))
        counts[k0:k0 + kw] = cb[:kw]
        min_prod[k0:k0 + kw] = mb[:kw]
    return counts, min_prod


edge_sign_counts_numba = njit(_edge_sign_counts_loop)


def edge_sign_counts_numpy(A, V, edge_tol):
    n = A.shape[0]
    iu, ju = np.triu_indices(n, 1)
    a = A[iu, ju]
    keep = np.abs(a) > edge_tol
    iu, ju, a = iu[keep], ju[keep], a[keep]
    counts = np.zeros(n, dtype=np.int64)
    min_prod = np.full(n, np.inf)
    if a.size == 0:
        return counts, min_prod
    block = max(1, min(n, (1 << 22) // a.size))
    for k0 in range(0, n, block):
        ks = slice(k0, min(n, k0 + block))
        p = a[:, None] * V[iu, ks] * V[ju, ks]
        counts[ks] = np.count_nonzero(p > 0.0, axis=0)
        min_prod[ks] = np.abs(p).min(axis=0)
    return counts, min_prod


def edge_sign_counts(A, V, edge_tol=0.0):
    """Count edges with ``A[i, j] * v[i] * v[j] > 0`` for every column ``v`` of ``V``.

    Parameters
    ----------
    A : (n, n) float array
        Symmetric matrix; only the strict upper triangle is read.
    V : (n, n) float array
        Eigenvectors stored as columns.
    edge_tol : float
        Pairs with ``|A[i, j]| <= edge_tol`` are not edges.

    Returns
    -------
    counts : (n,) int64
    min_prod : (n,) float64
        Smallest ``|A[i, j] v[i] v[j]|`` over edges (``inf`` without edges).
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    V = np.ascontiguousarray(V, dtype=np.float64)
    if USE_NUMBA:
        return edge_sign_counts_numba(A, V, float(edge_tol))
    return edge_sign_counts_numpy(A, V, float(edge_tol))


# --------------------------------------------------------------------------
# signs of the edge statistic M(x, y) on batches of Haar frames
# --------------------------------------------------------------------------


def pair_index(m):
    """Pairs ``(a, b)``, ``a < b``, of frame rows in the order used by ``frame_edge_signs``."""
    return [(a, b) for a in range(m) for b in range(a + 1, m)]


def _frame_edge_signs_loop(G, lam, k):
    N, m, n = G.shape
    npairs = m * (m - 1) // 2
    out = np.zeros((N, npairs), dtype=np.int8)
    Q = np.empty((m, n))
    LQ = np.empty((m, n))
    for s in range(N):
        ok = True
        # modified Gram-Schmidt
        for a in range(m):
            for t in range(n):
                Q[a, t] = G[s, a, t]
            for b in range(a):
                d = 0.0
                for t in range(n):
                    d += Q[a, t] * Q[b, t]
                for t in range(n):
                    Q[a, t] -= d * Q[b, t]
            nrm = 0.0
            for t in range(n):
                nrm += Q[a, t] * Q[a, t]
            if nrm == 0.0:
                ok = False
                break
            nrm = np.sqrt(nrm)
            for t in range(n):
                Q[a, t] /= nrm
                LQ[a, t] = lam[t] * Q[a, t]
        if not ok:
            continue
        p = 0
        for a in range(m):
            for b in range(a + 1, m):
                acc = 0.0
                for t in range(n):
                    acc += LQ[a, t] * Q[b, t]
                val = Q[a, k] * Q[b, k] * acc
                if val > 0.0:
                    out[s, p] = 1
                elif val < 0.0:
                    out[s, p] = -1
                p += 1
    return out


frame_edge_signs_numba = njit(_frame_edge_signs_loop)


def frame_edge_signs_numpy(G, lam, k):
    N, m, n = G.shape
    Q = np.array(G, dtype=np.float64, copy=True)
    bad = np.zeros(N, dtype=bool)
    for a in range(m):
        for b in range(a):
            d = np.einsum("st,st->s", Q[:, a], Q[:, b])
            Q[:, a] -= d[:, None] * Q[:, b]
        nrm = np.sqrt(np.einsum("st,st->s", Q[:, a], Q[:, a]))
        bad |= nrm == 0.0
        Q[:, a] /= np.where(nrm == 0.0, 1.0, nrm)[:, None]
    LQ = Q * lam
    cols = []
    for a, b in pair_index(m):
        acc = np.einsum("st,st->s", LQ[:, a], Q[:, b])
        cols.append(np.sign(Q[:, a, k] * Q[:, b, k] * acc))
    out = np.stack(cols, axis=1).astype(np.int8)
    out[bad] = 0
    return out


def frame_edge_signs(G, lam, k):
    """Signs of ``M(x, y) = x_k y_k sum_j lam_j x_j y_j`` over pairs of Haar rows.

    Each ``G[s]`` is an ``(m, n)`` block of i.i.d. standard normals. Gram-Schmidt
    turns it into ``m`` orthonormal vectors distributed as the first ``m``
    columns (equivalently rows) of a Haar orthogonal matrix; for ``m = 2``
    this is exactly the ``(g/|g|, Qg'/|Qg'|)`` pair construction.

    Returns an ``(N, m(m-1)/2)`` int8 array of signs in :func:`pair_index`
    order. A zero marks a degenerate draw (zero norm or an exact zero product).
    """
    G = np.ascontiguousarray(G, dtype=np.float64)
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    if USE_NUMBA:
        return frame_edge_signs_numba(G, lam, int(k))
    return frame_edge_signs_numpy(G, lam, int(k))
