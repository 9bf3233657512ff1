import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from nodalcount.errors import InvalidDimensionError, InvalidInputError, ZeroVarianceError
from nodalcount.spectral import (
    as_symmetric,
    check_spectral_growth,
    normalize_spectrum,
    symmetric_eigen,
)
from nodalcount.ensembles import sample_goe


def test_diagonal():
    s = symmetric_eigen(np.diag([3.0, 1.0, 2.0]))
    assert np.array_equal(s.lambdas, [1, 2, 3])
    assert np.array_equal(np.abs(s.vectors), np.eye(3)[:, [1, 2, 0]])


def test_two_by_two():
    s = symmetric_eigen([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(s.lambdas, [-1, 1])
    r = 1 / math.sqrt(2)
    assert np.allclose(s.vectors[:, 0], [r, -r])
    assert np.allclose(s.vectors[:, 1], [r, r])


def test_residual_and_orthonormality(rng):
    X = rng.standard_normal((50, 50))
    A = X + X.T
    s = symmetric_eigen(A)
    assert np.all(np.diff(s.lambdas) >= 0)
    tol = 1e-9 * max(1, np.abs(A).max() * 50)
    for k in range(50):
        assert np.linalg.norm(A @ s.vectors[:, k] - s.lambdas[k] * s.vectors[:, k]) <= tol
    assert np.abs(s.vectors.T @ s.vectors - np.eye(50)).max() <= 1e-10
    lead = s.vectors[np.argmax(np.abs(s.vectors) > 1e-12, axis=0), np.arange(50)]
    assert np.all(lead > 0)


def test_trace_roundtrip_and_permutation(rng):
    A = sample_goe(40, rng)
    s = symmetric_eigen(A)
    scale = 40 * np.abs(A).max()
    assert abs(s.lambdas.sum() - np.trace(A)) <= 1e-8 * scale
    assert np.abs((s.vectors * s.lambdas) @ s.vectors.T - A).max() <= 1e-8 * scale
    p = rng.permutation(40)
    assert np.allclose(symmetric_eigen(A[np.ix_(p, p)]).lambdas, s.lambdas, atol=1e-9)


def test_deterministic(rng):
    A = sample_goe(30, rng)
    a, b = symmetric_eigen(A), symmetric_eigen(A.copy())
    assert np.array_equal(a.lambdas, b.lambdas) and np.array_equal(a.vectors, b.vectors)


def test_upper_triangle_is_authoritative():
    A = np.array([[1.0, 2.0], [99.0, 3.0]])
    assert np.array_equal(as_symmetric(A), [[1, 2], [2, 3]])


def test_bad_inputs():
    with pytest.raises(InvalidInputError):
        symmetric_eigen([[np.nan, 0], [0, 1]])
    with pytest.raises(InvalidDimensionError):
        symmetric_eigen(np.ones((2, 3)))


def test_normalize_examples():
    with pytest.raises(ZeroVarianceError):
        normalize_spectrum([1.0, 1.0, 1.0])
    z, shift, scale = normalize_spectrum([-1.0, 1.0])
    assert np.allclose(z, [-1, 1]) and shift == 0 and scale == 1
    z, shift, scale = normalize_spectrum([0.0, 2.0, 4.0])
    assert np.allclose(z, [-math.sqrt(1.5), 0, math.sqrt(1.5)], atol=1e-12)
    assert shift == 2 and math.isclose(scale, math.sqrt(8 / 3))


@given(arrays(np.float64, st.integers(2, 60),
              elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_normalize_property(x):
    try:
        z, shift, scale = normalize_spectrum(x)
    except ZeroVarianceError:
        return
    assert abs(z.mean()) <= 1e-12
    assert abs(z.std() - 1) <= 1e-12
    assert np.allclose(z * scale + shift, x, atol=1e-6 * max(1.0, np.abs(x).max()))


def test_spectral_growth(rng):
    lam = np.linalg.eigvalsh(sample_goe(256, rng))
    assert check_spectral_growth(lam, 3, 1)
    # a lone outlier normalises to sqrt(n - 1) whatever its size, so it only
    # breaks 3 log n once sqrt(n - 1) > 3 log n
    x = np.zeros(100)
    x[0] = 1e6
    assert check_spectral_growth(x, 3, 1)
    x = np.zeros(1000)
    x[0] = 1e6
    assert not check_spectral_growth(x, 3, 1)
    assert check_spectral_growth([-1.0, 1.0], 1, 0)
