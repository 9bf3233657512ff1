"""Empirical measures, reference laws, distances and streaming moments."""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import InvalidInputError
from .spectral import normalize_spectrum

W1_GRID = 4096


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Uniform atoms on ``values`` (sorted ascending, multiplicities kept)."""

    values: np.ndarray

    @property
    def m(self):
        return self.values.shape[0]

    def quantile(self, p):
        """Left-continuous inverse cdf: ``values[ceil(p m) - 1]``."""
        p = np.asarray(p, dtype=np.float64)
        idx = np.clip(np.ceil(p * self.m).astype(np.int64) - 1, 0, self.m - 1)
        return self.values[idx]


def emp(x):
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size == 0:
        raise InvalidInputError("empirical measure of an empty vector")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("empirical measure of non-finite values")
    return EmpiricalMeasure(np.sort(x))


def emp_normalized(x):
    z, _, _ = normalize_spectrum(x)
    return emp(z)


# --------------------------------------------------------------------------
# reference laws
# --------------------------------------------------------------------------


def semicircle_density(x):
    x = np.asarray(x, dtype=np.float64)
    return np.where(np.abs(x) <= 2.0, np.sqrt(np.clip(4.0 - x * x, 0.0, None)) / (2 * np.pi), 0.0)


def semicircle_cdf(x):
    """CDF of the semicircle law on ``[-2, 2]`` (clamped outside)."""
    x = np.clip(np.asarray(x, dtype=np.float64), -2.0, 2.0)
    F = 0.5 + x * np.sqrt(4.0 - x * x) / (4 * np.pi) + np.arcsin(x / 2.0) / np.pi
    F = np.clip(F, 0.0, 1.0)
    return float(F) if F.ndim == 0 else F


def semicircle_quantile(p, tol=1e-10):
    """Inverse of :func:`semicircle_cdf` by bisection, vectorised over ``p``."""
    p = np.asarray(p, dtype=np.float64)
    if np.any((p < 0) | (p > 1)) or np.any(np.isnan(p)):
        raise InvalidInputError("probabilities must lie in [0, 1]")
    lo = np.full(p.shape, -2.0)
    hi = np.full(p.shape, 2.0)
    # interval width 4 / 2**40 < 1e-11
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        below = semicircle_cdf(mid) < p
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    q = 0.5 * (lo + hi)
    q = np.where(p <= 0.0, -2.0, np.where(p >= 1.0, 2.0, q))
    return float(q) if q.ndim == 0 else q


@dataclass(frozen=True)
class ReferenceLaw:
    kind: str = "semicircle"
    mean: float = 0.0
    std: float = 1.0

    @classmethod
    def semicircle(cls):
        return cls("semicircle")

    @classmethod
    def normal(cls, mean=0.0, std=1.0):
        if not std > 0:
            raise InvalidInputError("normal law needs a positive std")
        return cls("normal", float(mean), float(std))

    def cdf(self, x):
        if self.kind == "semicircle":
            return semicircle_cdf(x)
        return ndtr((np.asarray(x, dtype=np.float64) - self.mean) / self.std)

    def quantile(self, p):
        if self.kind == "semicircle":
            return semicircle_quantile(p)
        return self.mean + self.std * ndtri(np.asarray(p, dtype=np.float64))


def semicircle_quantiles(n):
    """``n`` semicircle quantiles at ``(i - 1/2)/n``: a deterministic GOE-like spectrum."""
    return semicircle_quantile((np.arange(1, n + 1) - 0.5) / n)


# --------------------------------------------------------------------------
# distances
# --------------------------------------------------------------------------


def _w1_empirical(a, b):
    va, vb = a.values, b.values
    if a.m == b.m:
        return float(np.mean(np.abs(va - vb)))
    # integrate |Fa^-1 - Fb^-1| over the merged breakpoints of both step functions
    br = np.union1d(np.arange(a.m + 1) / a.m, np.arange(b.m + 1) / b.m)
    mid = 0.5 * (br[:-1] + br[1:])
    return float(np.sum(np.diff(br) * np.abs(a.quantile(mid) - b.quantile(mid))))


def wasserstein1(mu, ref, grid=W1_GRID):
    """1-Wasserstein distance from an empirical measure to ``ref``.

    Empirical vs empirical is exact. Empirical vs a :class:`ReferenceLaw` uses
    the midpoint quantile grid ``(g - 1/2)/grid``.
    """
    if isinstance(ref, EmpiricalMeasure):
        return _w1_empirical(mu, ref)
    p = (np.arange(1, grid + 1) - 0.5) / grid
    return float(np.mean(np.abs(mu.quantile(p) - ref.quantile(p))))


def ks_distance(sample, law):
    """``sup_x |F_emp(x) - F(x)|`` evaluated at the sample points."""
    x = sample.values
    m = sample.m
    F = np.asarray(law.cdf(x), dtype=np.float64)
    i = np.arange(1, m + 1)
    return float(max(np.max(np.abs(F - i / m)), np.max(np.abs(F - (i - 1) / m))))


def loglog_fit(xs, ys):
    """Least-squares line through ``(log x, log y)``; returns ``(slope, intercept)``."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape:
        raise InvalidInputError("xs and ys differ in length")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise InvalidInputError("log-log fit needs positive values")
    if np.unique(xs).size < 2:
        raise InvalidInputError("log-log fit needs two distinct xs")
    lx, ly = np.log(xs), np.log(ys)
    dx = lx - lx.mean()
    slope = float(np.sum(dx * (ly - ly.mean())) / np.sum(dx * dx))
    return slope, float(ly.mean() - slope * lx.mean())


def count_modes(values, bandwidth=None, grid=2048):
    """Number of local maxima of a Gaussian kernel density estimate.

    Bandwidth defaults to Silverman's rule.
    """
    x = np.asarray(values, dtype=np.float64)
    if bandwidth is None:
        iqr = np.subtract(*np.percentile(x, [75, 25]))
        spread = min(x.std(), iqr / 1.34) if iqr > 0 else x.std()
        bandwidth = 0.9 * spread * x.size ** -0.2
    t = np.linspace(x.min() - 3 * bandwidth, x.max() + 3 * bandwidth, grid)
    dens = np.zeros(grid)
    for chunk in np.array_split(x, max(1, x.size // 512)):
        dens += np.exp(-0.5 * ((t[:, None] - chunk[None, :]) / bandwidth) ** 2).sum(axis=1)
    peaks = (dens[1:-1] > dens[:-2]) & (dens[1:-1] >= dens[2:])
    return int(np.count_nonzero(peaks))


# --------------------------------------------------------------------------
# streaming moments
# --------------------------------------------------------------------------


@dataclass
class MomentAccumulator:
    """Count, mean and summed squared deviations, elementwise over a fixed shape.

    Updates use Welford's recurrence; :meth:`merge` uses the pairwise
    (Chan et al.) combination so partial results can be reduced in any
    grouping.
    """

    count: int = 0
    mean: np.ndarray = field(default_factory=lambda: np.zeros(()))
    m2: np.ndarray = field(default_factory=lambda: np.zeros(()))

    def add(self, value):
        value = np.asarray(value, dtype=np.float64)
        if self.count == 0:
            self.mean = np.zeros_like(value)
            self.m2 = np.zeros_like(value)
        self.count += 1
        delta = value - self.mean
        self.mean = self.mean + delta / self.count
        self.m2 = self.m2 + delta * (value - self.mean)
        return self

    def merge(self, other):
        if other.count == 0:
            return MomentAccumulator(self.count, np.copy(self.mean), np.copy(self.m2))
        if self.count == 0:
            return MomentAccumulator(other.count, np.copy(other.mean), np.copy(other.m2))
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / n)
        m2 = self.m2 + other.m2 + delta * delta * (self.count * other.count / n)
        return MomentAccumulator(n, mean, m2)

    def variance(self, ddof=0):
        """Population variance by default; ``ddof=1`` for the sample variance."""
        if self.count - ddof <= 0:
            return np.full_like(self.m2, np.nan, dtype=np.float64)
        return self.m2 / (self.count - ddof)

    def std(self, ddof=0):
        return np.sqrt(self.variance(ddof))

    def stderr(self):
        return np.sqrt(self.variance(1) / self.count)


def accumulate(acc, value):
    return acc.add(value)


def merge(a, b):
    return a.merge(b)
