"""Central tolerance constants and capacity caps.

All entropies are in bits (log base 2), so H[U_V] = dim V and subspace-size
bounds read directly as dimensions.  Identity checks use IDENTITY_TOL,
fast-vs-naive oracle comparisons use ORACLE_TOL, and nonnegativity assertions
get NONNEG_SLACK.  These values are echoed into every emitted certificate.
"""

from __future__ import annotations

import os

IDENTITY_TOL = 1e-9
ORACLE_TOL = 1e-12
NONNEG_SLACK = 1e-9
# Masses below this after arithmetic are clamped to zero before entropy
# evaluation (prevents log-of-garbage from floating-point dust).
MASS_EPS = 1e-15

# Hard cap on element bit width; independent of the dense-table cap.
MAX_ELEMENT_N = 20
# Exhaustive subspace enumeration guard (Gaussian-binomial blowup).
MAX_ENUM_N = 6

_DEFAULT_DENSE_N = 12
_ENV_VAR = "ENTROPIC_DOUBLING_MAX_N"


def max_dense_n() -> int:
    """Dense-distribution cap; overridable via ENTROPIC_DOUBLING_MAX_N."""
    raw = os.environ.get(_ENV_VAR)
    if raw is None:
        return _DEFAULT_DENSE_N
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{_ENV_VAR} must be an integer, got {raw!r}") from exc
    return min(max(value, 1), MAX_ELEMENT_N)


def max_joint_bits() -> int:
    """Total bit budget for joint tables (k <= 4 blocks)."""
    return 2 * max_dense_n()


def tolerances_dict() -> dict[str, float]:
    """The tolerance block recorded in certificates."""
    return {
        "identity": IDENTITY_TOL,
        "oracle": ORACLE_TOL,
        "nonneg_slack": NONNEG_SLACK,
        "mass_eps": MASS_EPS,
    }
