"""Exponential discounting with indicator payoffs and a symmetric threshold."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .errors import DomainError, ValidationError
from .stats import StopStats


@dataclass(frozen=True)
class DiscountedProblem:
    r: float
    k: float

    def __post_init__(self):
        for name in ("r", "k"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(f"{name} must be finite and positive, got {v!r}")

    @classmethod
    def from_signal(cls, r: float, mu: float, sigma: float) -> DiscountedProblem:
        return cls(r=r, k=mu / sigma)

    @property
    def kappa_disc(self) -> float:
        return math.sqrt(2.0 * self.r / self.k**2 + 1.0)


def disc_value(ell: float, dp: DiscountedProblem) -> float:
    """1/2 e^(l/2) sech(l kappa/2): discounted value of stopping at +/- ell."""
    if ell < 0:
        raise DomainError("threshold must be nonnegative")
    if isinstance(ell, mpmath.mpf):
        # extended precision lets an argmax search resolve the flat maximum
        kap = mpmath.sqrt(2 * mpmath.mpf(dp.r) / mpmath.mpf(dp.k) ** 2 + 1)
        return mpmath.exp(ell * (1 - kap) / 2) / (1 + mpmath.exp(-ell * kap))
    kap = dp.kappa_disc
    return math.exp(0.5 * ell * (1.0 - kap)) / (1.0 + math.exp(-ell * kap))


def disc_boundary(dp: DiscountedProblem) -> float:
    kap = dp.kappa_disc
    return 2.0 * math.atanh(1.0 / kap) / kap


def disc_expected_time(ell: float, k: float) -> float:
    """Mean exit time of the symmetric band (-ell, ell) from 0."""
    return ell * math.tanh(0.5 * ell) / (2.0 * k * k)


def disc_stats(dp: DiscountedProblem) -> StopStats:
    ell = disc_boundary(dp)
    return StopStats(
        accuracy=1.0 / (1.0 + math.exp(-ell)),
        expected_time=disc_expected_time(ell, dp.k),
        prob_choose_a=0.5,
    )
