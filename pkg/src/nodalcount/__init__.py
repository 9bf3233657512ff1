"""Nodal-count statistics of random symmetric matrices from orthogonal ensembles."""

__version__ = "0.1.0"

from .ensembles import EigenvalueLaw, random_signing, sample_goe, sample_oe
from .errors import (
    ConfigError,
    DegenerateInputError,
    InvalidDimensionError,
    InvalidInputError,
    NodalCountError,
    ZeroVarianceError,
)
from .nodal import NodalVector, nodal_all, nodal_count
from .sampling import SeedPlan
from .spectral import normalize_spectrum, symmetric_eigen

__all__ = [
    "ConfigError",
    "DegenerateInputError",
    "EigenvalueLaw",
    "InvalidDimensionError",
    "InvalidInputError",
    "NodalCountError",
    "NodalVector",
    "SeedPlan",
    "ZeroVarianceError",
    "nodal_all",
    "nodal_count",
    "normalize_spectrum",
    "random_signing",
    "sample_goe",
    "sample_oe",
    "symmetric_eigen",
]
