"""Reproducible random streams and primitive samplers.

Every stream is a :class:`numpy.random.Generator` over the counter-based
Philox bit generator, keyed by ``SeedSequence(master_seed, spawn_key=path +
(stream_id,))``. Deriving a stream never touches another stream, so replicate
``r`` sees the same numbers no matter which worker runs it.
"""

from dataclasses import dataclass, field
import zlib

import numpy as np

from .errors import DegenerateInputError, InvalidDimensionError

RngStream = np.random.Generator

_U64 = (1 << 64) - 1


def _key(part):
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    part = int(part)
    if part < 0:
        raise ValueError(f"stream key parts must be non-negative, got {part}")
    return part


@dataclass(frozen=True)
class SeedPlan:
    """A master seed plus a namespace path.

    ``plan.child("theorem", 256)`` gives an independent family of streams for
    one experiment / size without consuming anything from ``plan``.
    """

    master_seed: int
    path: tuple = field(default=())

    def __post_init__(self):
        if not 0 <= int(self.master_seed) <= _U64:
            raise ValueError("master_seed must fit in 64 unsigned bits")

    def child(self, *parts):
        return SeedPlan(self.master_seed, self.path + tuple(_key(p) for p in parts))

    def stream(self, stream_id):
        return derive_stream(self, stream_id)


def derive_stream(plan, stream_id):
    """Independent deterministic generator for ``(plan, stream_id)``."""
    ss = np.random.SeedSequence(
        int(plan.master_seed), spawn_key=plan.path + (_key(stream_id),)
    )
    return np.random.Generator(np.random.Philox(ss))


def _check_n(n):
    if int(n) != n or n < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {n!r}")
    return int(n)


def sample_gaussian_vector(n, stream):
    return stream.standard_normal(_check_n(n))


def sample_haar_orthogonal(n, stream):
    """Haar-distributed ``n x n`` orthogonal matrix.

    QR of a Gaussian matrix, with column ``j`` of Q multiplied by
    ``sgn(R[j, j])`` (``sgn(0) = +1``) so the factor is unique.
    """
    n = _check_n(n)
    Z = stream.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    d = np.sign(np.diag(R))
    d[d == 0] = 1.0
    return Q * d


def haar_pair_from_gaussians(g, g_hat):
    """First two Haar columns from two independent Gaussian vectors.

    ``u = g/|g|`` and ``u_hat = Q g_hat / |Q g_hat|`` with ``Q`` the projector
    onto the orthogonal complement of ``g``.
    """
    g = np.asarray(g, dtype=np.float64)
    g_hat = np.asarray(g_hat, dtype=np.float64)
    if g.shape != g_hat.shape or g.ndim != 1:
        raise InvalidDimensionError("g and g_hat must be vectors of equal length")
    gg = g @ g
    if gg == 0.0:
        raise DegenerateInputError("g has zero norm")
    u = g / np.sqrt(gg)
    w = g_hat - (u @ g_hat) * u
    ww = np.sqrt(w @ w)
    if ww <= 1e-12 * np.sqrt(g_hat @ g_hat):
        raise DegenerateInputError("g_hat is parallel to g")
    u_hat = w / ww
    # one re-orthogonalisation pass keeps <u, u_hat> at rounding level
    u_hat = u_hat - (u @ u_hat) * u
    u_hat /= np.linalg.norm(u_hat)
    return u, u_hat
