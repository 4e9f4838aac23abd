"""Compositions of n with parts in {1, ..., d}: brute-force enumeration and counting.

The number of such compositions of ``n - 1`` is ``F_n``, which gives an
oracle for the exact module that shares no code with it.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import config
from .errors import EnumerationCapError, check_order
from .interval import CertifiedReal
from .roots import RootEnclosure


@dataclass(frozen=True)
class CompositionSet:
    d: int
    n: int
    compositions: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.compositions)

    def __iter__(self):
        return iter(self.compositions)


def enumerate_compositions(d: int, n: int, cap: int = config.DEFAULT_ENUMERATION_CAP) -> CompositionSet:
    """All compositions of ``n`` into parts ``1..d``, in lexicographic order.

    >>> enumerate_compositions(2, 3).compositions
    ((1, 1, 1), (1, 2), (2, 1))
    """
    check_order(d)
    if n > cap:
        raise EnumerationCapError(f"n={n} exceeds the enumeration cap of {cap}")
    if n < 0:
        return CompositionSet(d, n, ())

    out: list[tuple[int, ...]] = []
    prefix: list[int] = []

    def dfs(remaining: int) -> None:
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for part in range(1, min(d, remaining) + 1):
            prefix.append(part)
            dfs(remaining - part)
            prefix.pop()

    dfs(n)
    return CompositionSet(d, n, tuple(out))


def count_compositions(d: int, n: int) -> int:
    """Number of compositions of ``n`` into parts ``1..d``, by conditioning on the last part."""
    check_order(d)
    if n < 0:
        return 0
    counts = [1]  # the empty composition of 0
    for m in range(1, n + 1):
        counts.append(sum(counts[m - k] for k in range(1, min(d, m) + 1)))
    return counts[n]


def composition_log_probability(
    d: int, composition: tuple[int, ...], enclosure: RootEnclosure, prec: int | None = None
) -> CertifiedReal:
    """Enclosure of ``log P(X_1 = x_1, ..., X_m = x_m) = (x_1 + ... + x_m) log q``."""
    check_order(d)
    if enclosure.d != d:
        raise ValueError(f"enclosure is for d={enclosure.d}, not d={d}")
    for part in composition:
        if isinstance(part, bool) or not isinstance(part, int) or not 1 <= part <= d:
            raise ValueError(f"part {part!r} is outside 1..{d}")
    prec = prec or enclosure.precision_bits
    total = sum(composition)
    if total == 0:
        return CertifiedReal.exact(0, prec)
    return total * enclosure.interval(prec).log()
