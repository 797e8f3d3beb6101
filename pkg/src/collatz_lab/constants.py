"""Shared numeric constants for orbit ranges and growth-rate bands.

Everything here derives from log2(3). The k-range coefficients say how many
accelerated-map steps are worth checking for a given m; the per-step log
factors are the geometric decay rates of the three map variants.
"""

import math
from dataclasses import dataclass

LOG2_3 = math.log2(3.0)

# log2(sqrt(3)), the mean per-step log2 growth of T under fair coin parities.
LOG2_SQRT3 = LOG2_3 / 2.0

# k ranges up to range_coeff * log2(m) for the T-map band.
RANGE_COEFF = 1.0 / (1.0 - LOG2_SQRT3)

# Same coefficient expressed against natural log: 2 / ln(4/3).
NATURAL_LOG_COEFF = 2.0 / math.log(4.0 / 3.0)

# Converts natural log to log2.
TERRAS_COEFF = 1.0 / math.log(2.0)

# k ranges up to syracuse_coeff * log2(m) for the Syracuse band: 1 / log2(4/3).
SYRACUSE_COEFF = 1.0 / (2.0 - LOG2_3)

# k ranges up to col_coeff * log2(m) for the undivided-map band: 3 / (2 - log2(3)).
COL_COEFF = 3.0 / (2.0 - LOG2_3)

# Per-step log2 decay factors of the three bands.
LOG2_STEP_T = LOG2_SQRT3 - 1.0          # log2(sqrt(3)/2)
LOG2_STEP_COL = (LOG2_3 - 2.0) / 3.0    # log2(cbrt(3/4))
LOG2_STEP_SYR = LOG2_3 - 2.0            # log2(3/4)


@dataclass(frozen=True)
class MathConstants:
    """The coefficient bundle, one instance per process."""

    log2_sqrt3: float = LOG2_SQRT3
    range_coeff: float = RANGE_COEFF
    natural_log_coeff: float = NATURAL_LOG_COEFF
    terras_coeff: float = TERRAS_COEFF
    syracuse_coeff: float = SYRACUSE_COEFF
    col_coeff: float = COL_COEFF


CONSTANTS = MathConstants()
