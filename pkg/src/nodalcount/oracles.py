"""Closed forms and independent Monte Carlo estimators for the edge statistic.

For a fixed normalised spectrum ``lam`` and an eigenvector index ``k`` the
edge statistic of two Haar rows ``x, y`` is

    M(x, y) = x_k y_k sum_j lam_j x_j y_j,

and the nodal count of ``A = Phi diag(lam) Phi^T`` is
``(1/2) sum_{i<j} (1 + sgn M(Phi_i, Phi_j))``. The estimators below sample
two, three or four Haar rows at a time by Gram-Schmidt on Gaussian blocks
(O(n) per row) instead of drawing full ``n x n`` Haar matrices.
"""

from dataclasses import dataclass
from math import comb
import math

import numpy as np

from .ensembles import conjugate
from .errors import InvalidInputError
from .kernels import frame_edge_signs
from .nodal import nodal_all
from .sampling import SeedPlan, sample_haar_orthogonal
from .spectral import check_spectral_growth

# E[sgn M_12] ~ EDGE_MEAN_COEF * lam_k / sqrt(n)
EDGE_MEAN_COEF = 2 ** 1.5 / math.pi ** 1.5

_CHUNK = 4096


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    n: int
    resampled: int = 0


def sheppard(rho):
    """``E[sgn X sgn Y] = (2/pi) arcsin(rho)`` for unit-variance Gaussians with correlation ``rho``."""
    if not -1.0 <= rho <= 1.0:
        raise InvalidInputError(f"correlation must lie in [-1, 1], got {rho}")
    return 2.0 / math.pi * math.asin(rho)


def _streams(source):
    """Yield generators: per-chunk child streams for a SeedPlan, else the stream itself."""
    if isinstance(source, SeedPlan):
        c = 0
        while True:
            yield source.stream(c)
            c += 1
    while True:
        yield source


def _estimate(values, resampled=0):
    values = np.asarray(values, dtype=np.float64)
    N = values.size
    se = float(values.std(ddof=1) / math.sqrt(N)) if N > 1 else float("nan")
    return MCEstimate(float(values.mean()), se, N, resampled)


def mc_sign_correlation(rho, N, stream):
    """Monte Carlo estimate of ``E[sgn X sgn Y]`` with ``Y = rho X + sqrt(1-rho^2) Z``."""
    if not -1.0 < rho < 1.0:
        raise InvalidInputError("rho must lie strictly inside (-1, 1)")
    if N < 1:
        raise InvalidInputError("N must be positive")
    c = math.sqrt(1.0 - rho * rho)
    out = np.empty(N, dtype=np.int8)
    done = 0
    chunk = 1 << 18
    for rng in _streams(stream):
        if done == N:
            break
        m = min(chunk, N - done)
        xz = rng.standard_normal((2, m))
        out[done:done + m] = np.sign(xz[0]) * np.sign(rho * xz[0] + c * xz[1])
        done += m
    return _estimate(out)


def _check_lambdas(lambdas, k):
    lam = np.asarray(lambdas, dtype=np.float64)
    n = lam.size
    if n < 2:
        raise InvalidInputError("need at least two eigenvalues")
    if abs(lam.mean()) > 1e-8 or abs(lam.std() - 1.0) > 1e-8:
        raise InvalidInputError("eigenvalues must be normalised (avg 0, population std 1)")
    if not 1 <= k <= n:
        raise IndexError(f"k must be in 1..{n}, got {k}")
    return lam


def frame_signs(lambdas, k, m, N, stream):
    """``N`` non-degenerate rows of edge signs for ``m``-row Haar frames.

    Degenerate frames (a zero sign anywhere) are dropped and replaced by
    fresh draws; the number dropped is returned alongside.
    """
    lam = np.asarray(lambdas, dtype=np.float64)
    n = lam.size
    rows = []
    have = 0
    dropped = 0
    for rng in _streams(stream):
        if have >= N:
            break
        G = rng.standard_normal((_CHUNK, m, n))
        s = frame_edge_signs(G, lam, k - 1)
        good = np.all(s != 0, axis=1)
        dropped += int(np.count_nonzero(~good))
        s = s[good]
        rows.append(s[: N - have])
        have += min(s.shape[0], N - have)
    return np.concatenate(rows, axis=0), dropped


def mc_quadform_sign(lambdas, k, N, stream):
    """Estimate ``E[sgn(<P u, u_hat> <B u, u_hat>)]`` with ``P = e_k e_k^T``, ``B = diag(lam)``.

    ``(u, u_hat)`` are the first two columns of a Haar matrix built from two
    Gaussian vectors; the target is ``EDGE_MEAN_COEF * lam_k / sqrt(n)`` up to
    ``O~(n^{-3/2})``.
    """
    lam = _check_lambdas(lambdas, k)
    s, dropped = frame_signs(lam, k, 2, N, stream)
    return _estimate(s[:, 0], dropped)


def mc_edge_mean(lambdas, k, N, stream):
    """``E[sgn M_12]`` for two rows of the eigenvector matrix; same estimator as :func:`mc_quadform_sign`."""
    return mc_quadform_sign(lambdas, k, N, stream)


def _pair_covariance(pairs_prod, singles):
    """Covariance estimate and delta-method stderr.

    ``pairs_prod`` holds, per sample, the average of ``s_e * s_f`` over
    exchangeable edge pairs; ``singles`` the per-sample average of the ``s_e``.
    """
    mbar = singles.mean()
    cov = pairs_prod.mean() - mbar * mbar
    influence = pairs_prod - 2.0 * mbar * singles
    N = pairs_prod.size
    return float(cov), float(influence.std(ddof=1) / math.sqrt(N))


def mc_adjacent_cov(lambdas, k, N, stream, n=None):
    """``Cov(sgn M_13, sgn M_23)``: edges sharing one vertex.

    Each sample is three Haar rows; the three edges of the triangle pairwise
    share a vertex, so all three pairs are averaged.
    """
    lam = _check_lambdas(lambdas, k)
    if n is not None and n != lam.size:
        raise InvalidInputError("n does not match the number of eigenvalues")
    s, dropped = frame_signs(lam, k, 3, N, stream)
    s = s.astype(np.float64)
    prod = (s[:, 0] * s[:, 1] + s[:, 0] * s[:, 2] + s[:, 1] * s[:, 2]) / 3.0
    cov, se = _pair_covariance(prod, s.mean(axis=1))
    return MCEstimate(cov, se, s.shape[0], dropped)


def mc_nonadjacent_cov(lambdas, k, N, stream, n=None, independent=False):
    """``Cov(sgn M_12, sgn M_34)``: vertex-disjoint edges.

    Each sample is four Haar rows and averages the three perfect matchings.
    With ``independent=True`` the two edges come from unrelated Haar frames,
    which makes the true covariance exactly zero (a null check).
    """
    lam = _check_lambdas(lambdas, k)
    if n is not None and n != lam.size:
        raise InvalidInputError("n does not match the number of eigenvalues")
    if independent:
        plan_a, plan_b = _split(stream)
        a, da = frame_signs(lam, k, 2, N, plan_a)
        b, db = frame_signs(lam, k, 2, N, plan_b)
        s = np.concatenate([a, b], axis=1).astype(np.float64)
        prod = s[:, 0] * s[:, 1]
        cov, se = _pair_covariance(prod, s.mean(axis=1))
        return MCEstimate(cov, se, N, da + db)
    s, dropped = frame_signs(lam, k, 4, N, stream)
    s = s.astype(np.float64)
    # pair order: 01, 02, 03, 12, 13, 23
    prod = (s[:, 0] * s[:, 5] + s[:, 1] * s[:, 4] + s[:, 2] * s[:, 3]) / 3.0
    cov, se = _pair_covariance(prod, s.mean(axis=1))
    return MCEstimate(cov, se, s.shape[0], dropped)


def _split(stream):
    if isinstance(stream, SeedPlan):
        return stream.child("a"), stream.child("b")
    return stream, stream


@dataclass(frozen=True)
class VarianceDecomposition:
    n: int
    k: int
    direct: MCEstimate
    rhs: float
    rhs_stderr: float
    edge_var: MCEstimate
    adjacent_cov: MCEstimate
    nonadjacent_cov: MCEstimate
    nongeneric: int

    @property
    def gap(self):
        return self.direct.mean - self.rhs

    @property
    def combined_stderr(self):
        return math.hypot(self.direct.stderr, self.rhs_stderr)


def decomposition_weights(n):
    """Multiplicities of the three covariance terms in ``Var(phi(A, k))``.

    Each of the ``C(n,2)`` edges pairs with itself, with ``2(n-2)`` edges
    sharing a vertex and with ``C(n-2,2)`` disjoint edges; the factor 1/4
    comes from ``phi = (1/2) sum (1 + sgn M)``.
    """
    pairs = comb(n, 2)
    return 0.25 * pairs, 0.5 * (n - 2) * pairs, 0.25 * pairs * comb(n - 2, 2)


def variance_decomposition_check(n, lambdas, k, R, stream, N=None):
    """Compare a direct ``Var(phi(A, k))`` with the three-term edge decomposition.

    ``stream`` must be a :class:`SeedPlan`: the direct side and each Monte
    Carlo term draw from separate child plans so the two sides stay
    independent. ``N`` (default ``400 R``) is the number of Haar frames per
    covariance term.
    """
    lam = _check_lambdas(lambdas, k)
    if lam.size != n:
        raise InvalidInputError("n does not match the number of eigenvalues")
    if not isinstance(stream, SeedPlan):
        raise InvalidInputError("variance_decomposition_check needs a SeedPlan")
    N = 400 * R if N is None else N

    direct_plan = stream.child("direct")
    counts = []
    nongeneric = 0
    for r in range(R):
        Phi = sample_haar_orthogonal(n, direct_plan.stream(r))
        nv = nodal_all(conjugate(Phi, lam))
        if not nv.generic:
            nongeneric += 1
            continue
        counts.append(nv.phi[k - 1])
    counts = np.asarray(counts, dtype=np.float64)
    sq = (counts - counts.mean()) ** 2
    direct = MCEstimate(float(sq.mean()), float(sq.std(ddof=1) / math.sqrt(sq.size)), sq.size)

    w_var, w_adj, w_non = decomposition_weights(n)
    s, dropped = frame_signs(lam, k, 2, N, stream.child("edge"))
    x = s[:, 0].astype(np.float64)
    xbar = x.mean()
    edge_var = MCEstimate(float(1.0 - xbar * xbar),
                          float((2 * abs(xbar)) * x.std(ddof=1) / math.sqrt(x.size)),
                          x.size, dropped)
    terms = [(w_var, edge_var)]
    if n >= 3:
        adj = mc_adjacent_cov(lam, k, N, stream.child("adjacent"))
        terms.append((w_adj, adj))
    else:
        adj = MCEstimate(0.0, 0.0, 0)
    if n >= 4:
        non = mc_nonadjacent_cov(lam, k, N, stream.child("nonadjacent"))
        terms.append((w_non, non))
    else:
        non = MCEstimate(0.0, 0.0, 0)
    rhs = sum(w * t.mean for w, t in terms)
    rhs_se = math.sqrt(sum((w * t.stderr) ** 2 for w, t in terms))
    return VarianceDecomposition(n, k, direct, rhs, rhs_se, edge_var, adj, non, nongeneric)


def concentration_bound(n):
    return 10.0 * math.sqrt(n) * math.log(n) ** 2


def quadform_concentration_check(lambdas, trials, stream, n=None):
    """Gaussian quadratic forms stay within ``10 sqrt(n) log(n)^2`` of their means.

    Checks ``|<g,g> - n|``, ``|<g,h>|``, ``|<g,Lg>|`` and ``|<g,Lh>|`` with
    ``L = diag(lambdas)`` over ``trials`` independent pairs drawn from
    ``stream`` (anything with a ``standard_normal(size)`` method).
    """
    lam = np.asarray(lambdas, dtype=np.float64)
    if n is not None and n != lam.size:
        raise InvalidInputError("n does not match the number of eigenvalues")
    n = lam.size
    if not check_spectral_growth(lam, 3.0, 1.0):
        raise InvalidInputError("spectrum violates the growth bound")
    bound = concentration_bound(n)
    rngs = _streams(stream)
    for _ in range(trials):
        rng = next(rngs)
        g = np.asarray(rng.standard_normal(n), dtype=np.float64)
        h = np.asarray(rng.standard_normal(n), dtype=np.float64)
        forms = (g @ g - n, g @ h, g @ (lam * g), g @ (lam * h))
        if max(abs(f) for f in forms) > bound:
            return False
    return True
