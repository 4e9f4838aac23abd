"""Process-wide defaults and the precision ceiling."""

from __future__ import annotations

import os

DEFAULT_PRECISION_BITS = 128
MIN_PRECISION_BITS = 8
DEFAULT_MAX_PRECISION_BITS = 1_048_576
DEFAULT_ENUMERATION_CAP = 30
MAX_DP_LENGTH = 1_000_000
GUARD_BITS = 32

PRECISION_ENV_VAR = "GFIB_MAX_PRECISION_BITS"


def max_precision_bits() -> int:
    """Return the precision ceiling, honouring ``GFIB_MAX_PRECISION_BITS``."""
    raw = os.environ.get(PRECISION_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_PRECISION_BITS
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{PRECISION_ENV_VAR} must be an integer, got {raw!r}") from None
    if value < MIN_PRECISION_BITS:
        raise ValueError(f"{PRECISION_ENV_VAR} must be >= {MIN_PRECISION_BITS}")
    return value
