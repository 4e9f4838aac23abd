from __future__ import annotations


class GFibError(Exception):
    """Base class for all library errors."""


class InvalidOrderError(GFibError, ValueError):
    """The order d is not an integer >= 2."""


class PrecisionCeilingError(GFibError):
    """A computation needed more bits than the configured ceiling allows."""

    def __init__(self, requested: int, ceiling: int, what: str = "computation"):
        super().__init__(
            f"{what} needs {requested} bits, above the ceiling of {ceiling} bits "
            "(raise GFIB_MAX_PRECISION_BITS to allow it)"
        )
        self.requested = requested
        self.ceiling = ceiling


class PrecisionRefinementRequired(GFibError):
    """An interval result is too wide to be meaningful at this precision."""


class EnumerationCapError(GFibError, ValueError):
    """Composition enumeration was asked for n beyond the cap."""


class CertificationError(GFibError):
    """Rounding could not be certified even though precision was sufficient."""


def check_order(d: int) -> int:
    if isinstance(d, bool) or not isinstance(d, int):
        raise InvalidOrderError(f"order d must be an integer, got {d!r}")
    if d < 2:
        raise InvalidOrderError(f"order d must be >= 2, got {d}")
    return d
