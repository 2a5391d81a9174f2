"""Physical constants and unit helpers used throughout the package.

All internal rates are angular frequencies (rad/s). Quantities reported
"over 2 pi" divide by TWO_PI at the presentation layer only.
"""

import math

from scipy.constants import e as E_CHARGE  # elementary charge (C)
from scipy.constants import h as PLANCK  # Planck constant (J s)  # noqa: F401
from scipy.constants import hbar as HBAR  # reduced Planck constant (J s)

TWO_PI = 2.0 * math.pi

# Reduced flux quantum hbar / (2e), in weber. The Josephson potential is
# written as cos(phi / PHI0), so the low-flux condition compares phi to
# this reduced quantum, not to h / (2e).
PHI0 = HBAR / (2.0 * E_CHARGE)


def dbm_to_watts(p_dbm: float) -> float:
    """Convert a power from dBm to watts, P = 10**((dBm - 30) / 10)."""
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_watts: float) -> float:
    """Inverse of :func:`dbm_to_watts`; requires a strictly positive power."""
    if p_watts <= 0.0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * math.log10(p_watts) + 30.0


def db(power_ratio: float) -> float:
    """Power ratio in decibels, 10 log10(x). Returns -inf for zero."""
    if power_ratio < 0.0:
        raise ValueError("power ratio must be non-negative")
    if power_ratio == 0.0:
        return float("-inf")
    return 10.0 * math.log10(power_ratio)
