"""The verification suite: every oracle and graph bound as one pass/fail table.

Checks never short-circuit; a failing or crashing check is recorded and the
rest still run.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import constants as K
from . import oracles
from .ensembles import random_signing, sample_goe
from .nodal import nodal_all, surplus_average_bounds_check
from .spectral import normalize_spectrum
from .stats import ReferenceLaw, emp, semicircle_quantiles, wasserstein1


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""


def random_tree_matrix(n, rng, diagonal=True):
    """Symmetric matrix supported on a uniform-attachment random tree.

    Edge weights are positive; the diagonal is Gaussian when ``diagonal`` so
    the eigenvectors are generic almost surely.
    """
    A = np.zeros((n, n))
    perm = rng.permutation(n)
    for i in range(1, n):
        j = int(rng.integers(0, i))
        w = rng.uniform(0.5, 2.0)
        a, b = perm[i], perm[j]
        A[a, b] = A[b, a] = w
    if diagonal:
        A[np.diag_indices(n)] = rng.standard_normal(n)
    return A


def random_signed_dense(n, rng):
    """Dense symmetric matrix with independent Gaussian entries (random signs)."""
    X = rng.standard_normal((n, n))
    return np.triu(X) + np.triu(X, 1).T


def check_sheppard(plan, N=10 ** 6, rhos=(-0.9, -0.5, 0.0, 0.5, 0.9)):
    worst = 0.0
    for i, rho in enumerate(rhos):
        est = oracles.mc_sign_correlation(rho, N, plan.child(i))
        worst = max(worst, abs(est.mean - oracles.sheppard(rho)) / est.stderr)
    return CheckResult("sheppard_identity", worst <= K.Z_SIGNIFICANCE, worst, K.Z_SIGNIFICANCE,
                       "max |z| over rho grid")


def check_quadform(plan, n=1024, N=10 ** 5):
    lam = normalize_spectrum(semicircle_quantiles(n))[0]
    slack = 10 * n ** -1.5 * math.log(n) ** 2
    worst = -math.inf
    for k in (1, n // 2, n):
        est = oracles.mc_quadform_sign(lam, k, N, plan.child(k))
        target = oracles.EDGE_MEAN_COEF * lam[k - 1] / math.sqrt(n)
        # excess over the allowed band; <= 0 passes
        worst = max(worst, abs(est.mean - target) - (K.Z_SIGNIFICANCE * est.stderr + slack))
    return CheckResult("quadform_sign_mean", worst <= 0, worst, 0.0,
                       f"n={n}; excess over 4 se + 10 n^-1.5 log^2 n")


def check_adjacent(plan, n=256, N=10 ** 5):
    lam = normalize_spectrum(semicircle_quantiles(n))[0]
    est = oracles.mc_adjacent_cov(lam, n, N, plan)
    return CheckResult("adjacent_covariance", abs(est.mean) <= K.ADJACENT_COV_CAP,
                       abs(est.mean), K.ADJACENT_COV_CAP, f"n={n}, k=n")


def check_nonadjacent(plan, n=256, N=10 ** 5):
    lam = normalize_spectrum(semicircle_quantiles(n))[0]
    est = oracles.mc_nonadjacent_cov(lam, n, N, plan)
    cap = K.Z_SIGNIFICANCE * est.stderr + K.NONADJACENT_COV_SLACK
    return CheckResult("nonadjacent_covariance", abs(est.mean) <= cap, abs(est.mean), cap,
                       f"n={n}, k=n")


def check_trees(plan, count=200):
    rng = plan.stream(0)
    bad = generic = 0
    for _ in range(count):
        n = int(rng.integers(2, 17))
        nv = nodal_all(random_tree_matrix(n, rng))
        if not nv.generic:
            continue
        generic += 1
        bad += int(np.any(nv.sigma != 0))
    return CheckResult("fiedler_trees", bad == 0 and generic > 0, bad, 0,
                       f"{generic}/{count} generic samples")


def check_surplus_bounds(plan, count=200):
    rng = plan.stream(0)
    sandwich_bad = average_bad = generic = 0
    for _ in range(count):
        n = int(rng.integers(4, 11))
        nv = nodal_all(random_signed_dense(n, rng))
        avg = surplus_average_bounds_check(nv)
        if avg is None:
            continue
        generic += 1
        sandwich_bad += int(np.any((nv.sigma < 0) | (nv.sigma > nv.betti)))
        average_bad += int(not avg)
    bad = sandwich_bad + average_bad
    return CheckResult("surplus_bounds", bad == 0 and generic > 0, bad, 0,
                       f"{generic}/{count} generic; sandwich={sandwich_bad}, "
                       f"average={average_bad}")


def check_concentration(plan, n=4096, trials=100):
    lam = normalize_spectrum(semicircle_quantiles(n))[0]
    ok = oracles.quadform_concentration_check(lam, trials, plan)
    return CheckResult("quadform_concentration", ok, float(ok), 1.0, f"n={n}, {trials} trials")


def check_decomposition(plan, n=8, R=4000):
    lam = normalize_spectrum(semicircle_quantiles(n))[0]
    rep = oracles.variance_decomposition_check(n, lam, n, R, plan)
    z = abs(rep.gap) / rep.combined_stderr
    return CheckResult("variance_decomposition", z <= K.Z_DECOMPOSITION, z, K.Z_DECOMPOSITION,
                       f"n={n}, k=n, direct={rep.direct.mean:.4g}, rhs={rep.rhs:.4g}")


def check_signing(plan, n=512):
    stream = plan.stream(0)
    A = random_signing(sample_goe(n, stream), stream)
    w = wasserstein1(emp(np.linalg.eigvalsh(A)), ReferenceLaw.semicircle())
    return CheckResult("signing_semicircle", w <= K.W1_SIGNING_MAX, w, K.W1_SIGNING_MAX,
                       f"n={n}")


CHECKS = (
    check_sheppard,
    check_quadform,
    check_adjacent,
    check_nonadjacent,
    check_trees,
    check_surplus_bounds,
    check_concentration,
    check_decomposition,
    check_signing,
)


def run_checks(plan, checks=CHECKS):
    out = []
    for fn in checks:
        name = fn.__name__.removeprefix("check_")
        try:
            out.append(fn(plan.child(name)))
        except Exception as exc:  # recorded, never short-circuits the suite
            out.append(CheckResult(name, False, math.nan, math.nan,
                                   f"{type(exc).__name__}: {exc}"))
    return out
