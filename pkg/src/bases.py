"""Welfare basis constructors."""

from __future__ import annotations

from src.errors import StructuralError
from src.models import WelfareBasis


def _check_n(n: int) -> None:
    if n < 1:
        raise StructuralError(f"n must be >= 1, got {n}")


def covering(n: int) -> WelfareBasis:
    """w ≡ 1 on [1, n] (maximum coverage)."""
    _check_n(n)
    return WelfareBasis.from_inner([1.0] * n, name="covering")


def power(n: int, d: float) -> WelfareBasis:
    """w(j) = j^d; concave for d ≤ 1, convex for d ≥ 1."""
    _check_n(n)
    if d < 0:
        raise StructuralError(f"exponent must be >= 0, got {d}")
    return WelfareBasis.from_inner([float(j) ** d for j in range(1, n + 1)], name=f"power:{d:g}")


def vehicle_target(n: int, p: float) -> WelfareBasis:
    """w(j) = (1 − (1−p)^j) / p: detection probability of j vehicles, normalized to w(1)=1."""
    _check_n(n)
    if not 0.0 < p <= 1.0:
        raise StructuralError(f"detection probability must lie in (0, 1], got {p}")
    q = 1.0 - p
    return WelfareBasis.from_inner(
        [(1.0 - q**j) / p for j in range(1, n + 1)], name=f"vehicle:{p:g}"
    )


def normalize(w: WelfareBasis) -> WelfareBasis:
    """Divide by w(1)."""
    if w(1) <= 0.0:
        raise StructuralError("cannot normalize a basis with w(1) <= 0")
    return WelfareBasis.from_inner([v / w(1) for v in w.inner], name=w.name)
