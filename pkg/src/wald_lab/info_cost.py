"""Posterior-separable information costs on the symmetric binary problem.

The decision-maker picks a symmetric pair of posteriors (p, 1 - p) with
p in [1/2, 1], earning 2(p - 1/2) - kappa c(p). Expected time is taken to be
kappa c(p*).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq
from scipy.special import xlogy

from ._numerics import is_unimodal
from .errors import ValidationError


@dataclass(frozen=True)
class PosteriorCost:
    """c and c' on [1/2, 1]; ``c`` is extended to [0, 1/2) by symmetry.

    Both callables must accept numpy arrays. ``validate=False`` skips the
    convexity/normalization checks (for synthetic test costs).
    """

    c_half: Callable
    dc_half: Callable
    name: str = "custom"
    validate: bool = True

    def __post_init__(self):
        if not self.validate:
            return
        if abs(float(self.c_half(0.5))) > 1e-12:
            raise ValidationError(f"cost {self.name!r} must vanish at p = 1/2")
        grid = np.linspace(0.5, 1.0, 203)[1:-1]
        d = np.asarray(self.dc_half(grid), dtype=float)
        if not np.all(d > 0) or not np.all(np.diff(d) > 0):
            raise ValidationError(f"cost {self.name!r} must have c' > 0 and c'' > 0 on (1/2, 1)")

    def c(self, p):
        p = np.asarray(p, dtype=float)
        out = self.c_half(np.where(p < 0.5, 1.0 - p, p))
        return float(out) if out.ndim == 0 else out

    def dc(self, p):
        p = np.asarray(p, dtype=float)
        q = np.where(p < 0.5, 1.0 - p, p)
        out = np.where(p < 0.5, -1.0, 1.0) * self.dc_half(q)
        return float(out) if out.ndim == 0 else out


def _entropy_c(p):
    p = np.asarray(p, dtype=float)
    return xlogy(p, p) + xlogy(1.0 - p, 1.0 - p) + math.log(2.0)


def _entropy_dc(p):
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(p) - np.log1p(-p)


def entropy() -> PosteriorCost:
    return PosteriorCost(_entropy_c, _entropy_dc, name="entropy")


def quadratic() -> PosteriorCost:
    return PosteriorCost(lambda p: (np.asarray(p) - 0.5) ** 2, lambda p: 2.0 * (np.asarray(p) - 0.5),
                         name="quadratic")


def tabulated(p: Sequence[float], c: Sequence[float], dc: Sequence[float], name="tabulated") -> PosteriorCost:
    """Piecewise-cubic Hermite cost through (p, c, c') samples covering [1/2, 1]."""
    p, c, dc = (np.asarray(v, dtype=float) for v in (p, c, dc))
    if p.ndim != 1 or p.size < 2 or not (p.shape == c.shape == dc.shape):
        raise ValidationError("tabulated cost needs matching 1-d columns with at least 2 rows")
    if np.any(np.diff(p) <= 0) or p[0] > 0.5 or p[-1] < 1.0:
        raise ValidationError("tabulated p must be ascending and cover [1/2, 1]")
    spline = CubicHermiteSpline(p, c, dc)
    deriv = spline.derivative()
    return PosteriorCost(lambda x: spline(x), lambda x: deriv(x), name=name)


def read_tabulated(path) -> PosteriorCost:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    try:
        cols = list(zip(*((float(v) for v in r[:3]) for r in rows)))
    except ValueError:
        raise ValidationError(f"non-numeric entry in tabulated cost {path}") from None
    if len(cols) != 3:
        raise ValidationError(f"tabulated cost {path} needs three columns p,c,dc")
    return tabulated(*cols, name=f"tabulated:{path}")


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def named_cost(text: str) -> PosteriorCost:
    if text == "entropy":
        return entropy()
    if text == "quadratic":
        return quadratic()
    if text.startswith("tabulated:"):
        return read_tabulated(text.partition(":")[2])
    raise ValidationError(f"unknown posterior cost {text!r}")


@dataclass(frozen=True)
class KappaCurvePoint:
    kappa: float
    p_star: float
    c_star: float
    t_star: float


def optimal_posterior(kappa: float, cost: PosteriorCost) -> float:
    """Solve 2 = kappa c'(p) on (1/2, 1); corner at p = 1 when information is cheap."""
    if kappa < 0:
        raise ValidationError("kappa must be nonnegative")
    if kappa == 0:
        return 1.0
    top = math.nextafter(1.0, 0.0)
    if kappa * cost.dc(top) <= 2.0:
        return 1.0
    return brentq(lambda p: kappa * cost.dc(p) - 2.0, 0.5, top, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def expected_time_curve(kappa_grid: Sequence[float], cost: PosteriorCost) -> list[KappaCurvePoint]:
    ks = list(kappa_grid)
    if any(k < 0 for k in ks) or any(b < a for a, b in zip(ks, ks[1:])):
        raise ValidationError("kappa grid must be nonnegative and ascending")
    out = []
    for kappa in ks:
        p = optimal_posterior(kappa, cost)
        c_star = cost.c(p)
        out.append(KappaCurvePoint(kappa, p, c_star, kappa * c_star))
    return out


def single_peaked_iff(cost: PosteriorCost, grid: Sequence[float], zero_tol: float = 1e-12) -> bool:
    """Quasiconcavity of c/c' over the grid (at most one rise-to-fall change)."""
    g = np.asarray(grid, dtype=float)
    if np.any(g <= 0.5) or np.any(g >= 1.0):
        raise ValidationError("grid must lie inside (1/2, 1)")
    ratio = np.asarray(cost.c(g)) / np.asarray(cost.dc(g))
    return is_unimodal(list(ratio), zero_tol)


def brute_force_posterior(kappa: float, cost: PosteriorCost, resolution: int = 100_000) -> float:
    """Grid argmax of 2(p - 1/2) - kappa c(p) over [1/2, 1]."""
    if resolution < 1000:
        raise ValidationError("resolution must be at least 1000")
    p = np.linspace(0.5, 1.0, resolution + 1)
    return float(p[np.argmax(2.0 * (p - 0.5) - kappa * np.asarray(cost.c(p)))])
