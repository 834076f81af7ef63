"""Small numerical helpers shared across modules."""

from __future__ import annotations

import math
from typing import Callable, Sequence

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-8, max_iter: int = 500
) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on [lo, hi]; returns (argmax, interval width)."""
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
    return 0.5 * (a + b), b - a


def difference_signs(values: Sequence[float], zero_tol: float = 1e-12) -> list[int]:
    """Signs of successive differences; |diff| <= zero_tol counts as 0."""
    out = []
    for prev, cur in zip(values, values[1:]):
        d = cur - prev
        out.append(0 if abs(d) <= zero_tol else (1 if d > 0 else -1))
    return out


def sign_changes(values: Sequence[float], zero_tol: float = 1e-12) -> list[tuple[int, int]]:
    """Transitions between nonzero difference signs, e.g. [(1, -1)] for a single peak."""
    nonzero = [s for s in difference_signs(values, zero_tol) if s != 0]
    return [(s, t) for s, t in zip(nonzero, nonzero[1:]) if s != t]


def is_unimodal(values: Sequence[float], zero_tol: float = 1e-12) -> bool:
    """True when the sequence never rises again after falling."""
    return all(change == (1, -1) for change in sign_changes(values, zero_tol))
