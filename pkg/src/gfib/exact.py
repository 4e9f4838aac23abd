"""Exact values of the d-generalized Fibonacci numbers.

``F_n = 0`` for ``n <= 0``, ``F_1 = 1`` and ``F_n = F_{n-1} + ... + F_{n-d}``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import check_order


@dataclass(frozen=True)
class BigIntegerSequence:
    d: int
    values: tuple[int, ...]

    def __getitem__(self, n: int) -> int:
        if n <= 0:
            return 0
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)

    @property
    def n_max(self) -> int:
        return len(self.values) - 1


def fib_sequence(d: int, n_max: int) -> BigIntegerSequence:
    """``F_0 .. F_{n_max}`` by a sliding window of the last ``d`` terms."""
    check_order(d)
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    out = [0]
    if n_max >= 1:
        out.append(1)
    window = deque([0] * (d - 1) + [1], maxlen=d)
    total = 1
    for _ in range(2, n_max + 1):
        oldest = window[0]
        window.append(total)
        # running sum of the window: add the new term, drop the one that fell out
        total += total - oldest
        out.append(window[-1])
    return BigIntegerSequence(d, tuple(out))


def _matmul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def companion_matrix(d: int) -> list[list[int]]:
    m = [[0] * d for _ in range(d)]
    m[0] = [1] * d
    for i in range(1, d):
        m[i][i - 1] = 1
    return m


def fib_at(d: int, n: int) -> int:
    """Single term ``F_n`` via binary powering of the companion matrix.

    The state vector ``(F_k, F_{k-1}, ..., F_{k-d+1})`` starts at ``k = 1`` as
    ``(1, 0, ..., 0)``, so ``F_n`` is the top-left entry of ``M**(n-1)``.
    """
    check_order(d)
    if n <= 0:
        return 0
    e = n - 1
    result = None
    base = companion_matrix(d)
    while e:
        if e & 1:
            result = base if result is None else _matmul(result, base)
        e >>= 1
        if e:
            base = _matmul(base, base)
    return 1 if result is None else result[0][0]
