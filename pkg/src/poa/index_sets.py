"""Index sets of the PoA programs.

I   = {(a, x, b) ∈ ℕ³ : 1 ≤ a+x+b ≤ n}
I_R = {(a, x, b) ∈ I : a·x·b = 0 or a+x+b = n}

Both are enumerated lexicographically (a, then x, then b).
"""

from __future__ import annotations

from typing import NamedTuple

from src.errors import StructuralError


class IndexTriple(NamedTuple):
    a: int
    x: int
    b: int

    @property
    def total(self) -> int:
        return self.a + self.x + self.b


def _check_n(n: int) -> None:
    if n < 1:
        raise StructuralError(f"n must be >= 1, got {n}")


def index_set_i(n: int) -> list[IndexTriple]:
    _check_n(n)
    return [
        IndexTriple(a, x, b)
        for a in range(n + 1)
        for x in range(n + 1 - a)
        for b in range(n + 1 - a - x)
        if a + x + b >= 1
    ]


def index_set_ir(n: int) -> list[IndexTriple]:
    return [t for t in index_set_i(n) if t.a * t.x * t.b == 0 or t.total == n]


def size_i(n: int) -> int:
    """|I| = ½ Σ_{j=0}^{n} (j+2)(j+1) − 1 = (n+1)(n+2)(n+3)/6 − 1."""
    return (n + 1) * (n + 2) * (n + 3) // 6 - 1


def size_ir(n: int) -> int:
    return 2 * (n * n + 1) - 1
