import math

import numpy as np
import pytest

from nodalcount.ensembles import (
    TRIMODAL_MIXTURE,
    EigenvalueLaw,
    random_signing,
    sample_goe,
    sample_oe,
)
from nodalcount.errors import ConfigError, InvalidDimensionError, ZeroVarianceError
from nodalcount.spectral import symmetric_eigen
from nodalcount.stats import ReferenceLaw, count_modes, emp, wasserstein1


def test_goe_variances(rng):
    n, R = 64, 100
    off, diag = [], []
    iu = np.triu_indices(n, 1)
    for _ in range(R):
        A = sample_goe(n, rng)
        assert np.array_equal(A, A.T)
        off.append(A[iu])
        diag.append(np.diag(A))
    off, diag = np.concatenate(off), np.concatenate(diag)
    # var of a sample variance of N normals with variance s2 is 2 s2^2 / N
    assert abs(off.var() - 1 / n) <= 4 * math.sqrt(2 / off.size) / n
    assert abs(diag.var() - 2 / n) <= 4 * math.sqrt(2 / diag.size) * 2 / n


def test_goe_needs_two(rng):
    with pytest.raises(InvalidDimensionError):
        sample_goe(1, rng)


def test_explicit_roundtrip(rng):
    s = sample_oe(2, EigenvalueLaw.explicit([-1.0, 1.0]), rng)
    assert np.allclose(np.linalg.eigvalsh(s.matrix), [-1, 1], atol=1e-10)
    lam = np.sort(rng.standard_normal(20))
    s = sample_oe(20, EigenvalueLaw.explicit(lam[::-1]), rng)
    assert np.array_equal(s.lambdas_used, lam)
    assert np.allclose(symmetric_eigen(s.matrix).lambdas, lam, atol=1e-8)
    assert np.array_equal(s.matrix, s.matrix.T)


def test_explicit_length_mismatch(rng):
    with pytest.raises(InvalidDimensionError):
        sample_oe(3, EigenvalueLaw.explicit([1.0, 2.0]), rng)


def test_zero_variance_with_normalize(rng):
    with pytest.raises(ZeroVarianceError):
        sample_oe(3, EigenvalueLaw.explicit([1.0, 1.0, 1.0], normalize=True), rng)


def test_goe_dispatch(rng):
    s = sample_oe(5, EigenvalueLaw.goe(), rng)
    assert s.lambdas_used.size == 0 and s.matrix.shape == (5, 5)


def test_trimodal_mixture_modes(rng):
    s = sample_oe(1000, EigenvalueLaw.mixture(TRIMODAL_MIXTURE), rng)
    lam = s.lambdas_used
    assert abs(lam.mean()) < 1e-12 and abs(lam.std() - 1) < 1e-12
    assert count_modes(lam) == 3
    # mixture variance 12 puts the modes near means / sqrt(12)
    assert abs(s.scale - math.sqrt(12)) < 0.3
    for m in (-5, -1, 3):
        near = lam[np.abs(lam - m / math.sqrt(12)) < 0.15]
        assert near.size > 20


def test_law_validation():
    with pytest.raises(ConfigError):
        EigenvalueLaw.mixture([(0.5, 0, 1), (0.6, 1, 1)])
    with pytest.raises(ConfigError):
        EigenvalueLaw.mixture([(1.0, 0, 0)])
    with pytest.raises(ConfigError):
        EigenvalueLaw.explicit([1.0, float("inf")])
    with pytest.raises(ConfigError):
        EigenvalueLaw("wishart")


def test_law_dict_roundtrip():
    law = EigenvalueLaw.mixture(TRIMODAL_MIXTURE)
    assert EigenvalueLaw.from_dict(law.to_dict()) == law
    law = EigenvalueLaw.explicit([1.0, 2.0], normalize=True)
    assert EigenvalueLaw.from_dict(law.to_dict()) == law


def test_signing_zero_and_abs(rng):
    assert np.array_equal(random_signing(np.zeros((4, 4)), rng), np.zeros((4, 4)))
    A = sample_goe(30, rng)
    B = random_signing(A, rng)
    assert np.array_equal(np.abs(A), np.abs(B))
    assert np.array_equal(np.diag(A), np.diag(B))
    assert np.array_equal(B, B.T)


def test_signing_fraction(rng):
    n = 100
    A = np.ones((n, n))
    B = random_signing(A, rng)
    frac = np.mean(B[np.triu_indices(n, 1)] < 0)
    assert 0.45 <= frac <= 0.55


def test_signing_twice_same_law(rng):
    n = 60
    A = np.ones((n, n))
    once = random_signing(A, rng)[np.triu_indices(n, 1)]
    twice = random_signing(random_signing(A, rng), rng)[np.triu_indices(n, 1)]
    m = once.size
    assert abs(np.mean(once < 0) - np.mean(twice < 0)) <= 4 * math.sqrt(0.5 / m)


def test_signed_goe_semicircle(rng):
    A = random_signing(sample_goe(256, rng), rng)
    assert wasserstein1(emp(np.linalg.eigvalsh(A)), ReferenceLaw.semicircle()) <= 0.1


def test_permutation_invariance_of_moments(rng):
    n, R = 6, 3000
    law = EigenvalueLaw.explicit(np.linspace(-1, 1, n))
    p = rng.permutation(n)
    a = np.array([sample_oe(n, law, rng).matrix for _ in range(R)])
    b = np.array([sample_oe(n, law, rng).matrix[np.ix_(p, p)] for _ in range(R)])
    se = np.sqrt((a.var(axis=0) + b.var(axis=0)) / R)
    assert np.all(np.abs(a.mean(axis=0) - b.mean(axis=0)) <= 5 * se + 1e-12)
