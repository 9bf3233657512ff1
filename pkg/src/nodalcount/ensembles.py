"""Random symmetric matrices: GOE, orthogonal ensembles with a chosen eigenvalue law, signings."""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import ConfigError, InvalidDimensionError
from .sampling import sample_haar_orthogonal
from .spectral import normalize_spectrum

GOE_IMPLICIT = "goe"
IID_MIXTURE = "iid_mixture"
EXPLICIT = "explicit"

# weights 1/4, 1/4, 1/2 at means -5, -1, 3, unit stds
TRIMODAL_MIXTURE = ((0.25, -5.0, 1.0), (0.25, -1.0, 1.0), (0.5, 3.0, 1.0))


@dataclass(frozen=True)
class EigenvalueLaw:
    """How the spectrum of an orthogonal-ensemble matrix is drawn.

    ``components`` holds ``(weight, mean, std)`` triples for ``iid_mixture``;
    ``values`` holds the fixed spectrum for ``explicit``.
    """

    variant: str = GOE_IMPLICIT
    components: tuple = ()
    values: tuple = ()
    normalize: bool = False

    def __post_init__(self):
        if self.variant not in (GOE_IMPLICIT, IID_MIXTURE, EXPLICIT):
            raise ConfigError(f"unknown eigenvalue law {self.variant!r}")
        if self.variant == IID_MIXTURE:
            if not self.components:
                raise ConfigError("iid_mixture needs at least one component")
            w = np.array([c[0] for c in self.components], dtype=float)
            s = np.array([c[2] for c in self.components], dtype=float)
            if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
                raise ConfigError("mixture weights must be non-negative and sum to 1")
            if np.any(s <= 0):
                raise ConfigError("mixture stds must be positive")
        if self.variant == EXPLICIT:
            v = np.asarray(self.values, dtype=float)
            if v.size == 0 or not np.all(np.isfinite(v)):
                raise ConfigError("explicit eigenvalues must be a non-empty finite list")

    @classmethod
    def goe(cls):
        return cls(GOE_IMPLICIT)

    @classmethod
    def mixture(cls, components, normalize=True):
        return cls(IID_MIXTURE, components=tuple(tuple(map(float, c)) for c in components),
                   normalize=normalize)

    @classmethod
    def explicit(cls, values, normalize=False):
        return cls(EXPLICIT, values=tuple(float(v) for v in values), normalize=normalize)

    @classmethod
    def from_dict(cls, d):
        variant = d.get("variant", GOE_IMPLICIT)
        comps = tuple(
            (float(c["weight"]), float(c["mean"]), float(c["std"]))
            for c in d.get("components", ())
        )
        return cls(variant, components=comps, values=tuple(float(v) for v in d.get("values", ())),
                   normalize=bool(d.get("normalize", False)))

    def to_dict(self):
        out = {"variant": self.variant, "normalize": self.normalize}
        if self.components:
            out["components"] = [dict(weight=w, mean=m, std=s) for w, m, s in self.components]
        if self.values:
            out["values"] = list(self.values)
        return out

    def sample_lambdas(self, n, stream):
        if self.variant == EXPLICIT:
            if len(self.values) != n:
                raise InvalidDimensionError(
                    f"explicit law has {len(self.values)} values, expected {n}")
            return np.array(self.values, dtype=np.float64)
        if self.variant == IID_MIXTURE:
            w = np.array([c[0] for c in self.components])
            mu = np.array([c[1] for c in self.components])
            sd = np.array([c[2] for c in self.components])
            idx = stream.choice(len(w), size=n, p=w)
            return mu[idx] + sd[idx] * stream.standard_normal(n)
        raise ConfigError("the GOE law has no explicit spectrum sampler")


@dataclass
class OEMatrixSample:
    matrix: np.ndarray
    lambdas_used: np.ndarray = field(default_factory=lambda: np.empty(0))
    signing_applied: bool = False
    shift: float = 0.0
    scale: float = 1.0


def sample_goe(n, stream):
    """GOE matrix with off-diagonal variance ``1/n`` and diagonal variance ``2/n``."""
    if int(n) != n or n < 2:
        raise InvalidDimensionError(f"GOE needs n >= 2, got {n!r}")
    n = int(n)
    X = stream.standard_normal((n, n))
    return (X + X.T) * (1.0 / math.sqrt(2.0 * n))


def conjugate(Phi, lambdas):
    """``Phi diag(lambdas) Phi^T``, made exactly symmetric."""
    M = (Phi * lambdas) @ Phi.T
    return (M + M.T) * 0.5


def sample_oe(n, law, stream):
    """Draw from the orthogonal ensemble with eigenvalue law ``law``."""
    if law.variant == GOE_IMPLICIT:
        return OEMatrixSample(sample_goe(n, stream))
    if int(n) != n or n < 1:
        raise InvalidDimensionError(f"dimension must be positive, got {n!r}")
    n = int(n)
    lam = law.sample_lambdas(n, stream)
    shift, scale = 0.0, 1.0
    if law.normalize:
        lam, shift, scale = normalize_spectrum(lam)
    lam = np.sort(lam)
    Phi = sample_haar_orthogonal(n, stream)
    return OEMatrixSample(conjugate(Phi, lam), lam, False, shift, scale)


def random_signing(A, stream):
    """Flip each off-diagonal pair ``(i, j), (j, i)`` by an independent fair sign."""
    A = np.asarray(A, dtype=np.float64)
    n = A.shape[0]
    iu, ju = np.triu_indices(n, 1)
    s = stream.integers(0, 2, size=iu.size) * 2.0 - 1.0
    out = A.copy()
    out[iu, ju] = A[iu, ju] * s
    out[ju, iu] = out[iu, ju]
    return out
