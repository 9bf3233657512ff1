"""Tolerances for order-of-magnitude claims.

The asymptotic statements only fix rates, not constants, so every cap below
was set from pilot runs at desk scale (single core, n <= 2048). Bump
CALIBRATION_VERSION whenever a value changes; it is written to every result's
metadata.
"""

CALIBRATION_VERSION = "desk-2026.10.1"

# number of standard errors allowed for Monte Carlo agreement checks
Z_SIGNIFICANCE = 4.0
Z_DECOMPOSITION = 5.0

# expectation of the nodal count, n = 256 (pilot max gap ~0.02)
THEOREM_GAP_MAX = 0.15
THEOREM_MIDDLE_ABS_MAX = 0.1
THEOREM_EDGE_RANGE = (1.5, 2.2)

# variance growth of max_k Var[phi(A, k)] on n = 16..128 (pilot slope ~2.05)
VARIANCE_SLOPE_RANGE = (1.8, 2.2)

# semicircle convergence of emp(phi_N)
W1_SWEEP_MAX_AT_512 = 0.3
W1_SIGNING_MAX = 0.1
W1_MIXTURE_MAX = 0.2
W1_REFERENCE_SELF_MAX = 0.01

# covariance terms, n = 256
ADJACENT_COV_CAP = 0.2
NONADJACENT_COV_SLACK = 0.01

# Gaussian fit of individual nodal counts
KS_MAX = 0.2
KS_MIN_REPLICATES = 50

# mean/variance sweep, n = 128
MEAN_FRAC_RANGE = (0.44, 0.56)
STD_FRAC_MAX = 0.02

# mixture demo
MIXTURE_MODES = 3

# fraction of non-generic GOE replicates tolerated
NONGENERIC_FRACTION_MAX = 1e-3
