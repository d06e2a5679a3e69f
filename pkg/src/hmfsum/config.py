"""Single configuration surface for numerical defaults.

Every tunable constant used by the library and the CLI lives here so that a
run can be reproduced from the flags it was invoked with.
"""

import math
import os

# Partition verifier: shift added to pi/12 in the constant C.
PARTITION_EPS = 0.01

# Riesz verifier.
RIESZ_RHO = 2.0
RIESZ_EPSILON = 0.45
RIESZ_NODES_PER_UNIT = 10
RIESZ_N_MAX = 1000
RIESZ_TOL = 1e-3

# Truncation heights of the per-n contour integrals grow like sqrt(2 pi n);
# beyond T = a*sqrt(2 pi n) + b the integrand has fallen below about 1e-9 of
# its peak and keeps decaying faster than any exponential.
RIESZ_T_SLOPE = 3.5
RIESZ_T_OFFSET = 10.0

# Truncation caps.
SF1_N_MAX_CAP = 250_000
LSERIES_N_MAX = 4000

# Per-command tolerances.
SF1_TOL = 1e-6
FE_TOL = 1e-8

# Kummer M: series below this z, dominant asymptotic expansion above it
# (with per-point fallback to the series when the asymptotic error estimate
# is too large).
KUMMER_SERIES_Z = 1000.0
KUMMER_Z_MAX = 2 * math.pi * 1e5
KUMMER_MAX_TERMS = 2_000_000
KUMMER_ASYMPTOTIC_RTOL = 1e-13

# Growth bound for |Gamma(a+ix) M(a+ix, b, y)|: the exponent slack and the
# sampling grid used to calibrate the implied constant.
KUMMER_TAIL_EPS = 0.1
KUMMER_TAIL_GRID_X = (0.0, 50.0, 26)
KUMMER_TAIL_GRID_Y = (1.0, 100.0, 34)
KUMMER_TAIL_INFLATION = 2.0

# Quadrature.
QUAD_TOL = 1e-12
QUAD_MAX_LEVEL = 9

# Thread count used when the CLI is not given --threads.
THREADS_ENV = "HMFSUM_THREADS"


def default_threads():
    """Worker count from the environment, falling back to 1."""
    raw = os.environ.get(THREADS_ENV, "")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(1, value)
