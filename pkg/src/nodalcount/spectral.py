"""Symmetric eigendecomposition with fixed ordering and sign conventions."""

from dataclasses import dataclass
import math

import numpy as np

from .errors import InvalidDimensionError, InvalidInputError, ZeroVarianceError

SIGN_TOL = 1e-12


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues and matching orthonormal eigenvectors (as columns)."""

    lambdas: np.ndarray
    vectors: np.ndarray

    @property
    def n(self):
        return self.lambdas.shape[0]


def as_symmetric(A):
    """Validate ``A`` and return an exactly symmetric float copy.

    The upper triangle is authoritative; the lower triangle is overwritten by
    its mirror.
    """
    A = np.array(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise InvalidDimensionError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError("matrix has non-finite entries")
    iu = np.triu_indices(A.shape[0], 1)
    A.T[iu] = A[iu]
    return A


def fix_signs(vectors, tol=SIGN_TOL):
    """Flip columns so the first entry with ``|x| > tol`` is positive (in place)."""
    big = np.abs(vectors) > tol
    first = np.argmax(big, axis=0)
    lead = vectors[first, np.arange(vectors.shape[1])]
    flip = np.where(lead < 0, -1.0, 1.0)
    vectors *= flip
    return vectors


def symmetric_eigen(A):
    """Eigendecomposition of a real symmetric matrix.

    LAPACK ``syevd`` via :func:`numpy.linalg.eigh` reading the upper triangle;
    eigenvalues ascending, eigenvector signs normalised by :func:`fix_signs`.
    """
    A = as_symmetric(A)
    lambdas, vectors = np.linalg.eigh(A, UPLO="U")
    fix_signs(vectors)
    return Spectrum(lambdas, vectors)


def avg(x):
    return float(np.mean(x))


def std(x):
    """Population standard deviation (divisor ``n``)."""
    return float(np.std(x))


def normalize_spectrum(lambdas):
    """Center and scale to average 0 and population std 1.

    Returns ``(normalized, shift, scale)`` with ``normalized = (lambdas - shift) / scale``.
    """
    x = np.asarray(lambdas, dtype=np.float64)
    if x.size == 0:
        raise InvalidInputError("empty vector")
    shift = avg(x)
    scale = std(x)
    if not scale > 0.0 or scale <= 1e-14 * max(1.0, float(np.max(np.abs(x)))):
        raise ZeroVarianceError("vector has zero variance")
    z = (x - shift) / scale
    # one refinement pass so avg and std hit 0 and 1 to ~1e-15
    z -= z.mean()
    z /= z.std()
    return z, shift, scale


def check_spectral_growth(lambdas, C, c):
    """True iff ``max |normalized lambda_i| <= C * log(n)**c``."""
    z, _, _ = normalize_spectrum(lambdas)
    n = z.size
    return bool(np.max(np.abs(z)) <= C * math.log(n) ** c)
