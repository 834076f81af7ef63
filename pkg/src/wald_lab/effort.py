"""Endogenous effort: optimal constant effort, effective problems, ability thresholds."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

from scipy.optimize import brentq

from .core import Problem, canonicalize
from .errors import ConvergenceFailure, NoInteriorOptimum, ValidationError
from .stats import find_peak_complexity

_FD_POINTS = (0.25, 0.5, 1.0, 2.0, 4.0)


@dataclass(frozen=True)
class CostSpec:
    """A convex flow cost of effort with its first two derivatives.

    Derivatives are cross-checked against central differences when the cost
    is constructed.
    """

    c: Callable[[float], float]
    dc: Callable[[float], float]
    d2c: Callable[[float], float]
    lower: float = 0.0
    name: str = "custom"

    def __post_init__(self):
        if not (math.isfinite(self.lower) and self.lower >= 0):
            raise ValidationError("cost domain must start at a finite nonnegative bound")
        for x in (self.lower + t for t in _FD_POINTS):
            h = 1e-5 * max(1.0, x)
            vals = (self.c(x), self.dc(x), self.d2c(x))
            if not all(math.isfinite(v) for v in vals):
                raise ValidationError(f"cost {self.name!r} not finite at {x}")
            if not (vals[1] > 0 and vals[2] > 0):
                raise ValidationError(f"cost {self.name!r} must have c' > 0 and c'' > 0 (at {x})")
            fd1 = (self.c(x + h) - self.c(x - h)) / (2 * h)
            fd2 = (self.dc(x + h) - self.dc(x - h)) / (2 * h)
            for exact, approx, label in ((vals[1], fd1, "c'"), (vals[2], fd2, "c''")):
                if abs(exact - approx) > 1e-6 * max(1.0, abs(exact)):
                    raise ValidationError(f"{label} of cost {self.name!r} inconsistent at {x}")


def quadratic_fixed(a: float, b: float) -> CostSpec:
    """c(e) = a + b e^2."""
    if not b > 0:
        raise ValidationError("quadratic_fixed needs b > 0")
    return CostSpec(
        c=lambda e: a + b * e * e,
        dc=lambda e: 2.0 * b * e,
        d2c=lambda e: 2.0 * b,
        name=f"quadratic_fixed:{a!r},{b!r}",
    )


def parse_cost(text: str) -> CostSpec:
    name, _, args = text.partition(":")
    if name == "quadratic_fixed":
        try:
            a, b = (float(v) for v in args.split(","))
        except ValueError:
            raise ValidationError(f"expected quadratic_fixed:a,b, got {text!r}") from None
        return quadratic_fixed(a, b)
    raise ValidationError(f"unknown effort cost {text!r}")


@dataclass(frozen=True)
class AbilityProfile:
    lam: float

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ValidationError(f"ability must be positive, got {self.lam!r}")


def solve_effort(cost: CostSpec) -> float:
    """Unique e* > 0 with e* c'(e*) = c(e*)."""
    if not cost.c(cost.lower) > 0:
        raise NoInteriorOptimum(
            f"cost {cost.name!r} has no fixed component at {cost.lower}; "
            "e c'(e) > c(e) for every e above it"
        )

    def gap(e):
        return e * cost.dc(e) - cost.c(e)

    hi = max(1.0, 2.0 * cost.lower)
    while gap(hi) <= 0:
        hi *= 2.0
        if hi > 1e300:
            raise ConvergenceFailure(f"no tangency point found for cost {cost.name!r}")
    return brentq(gap, cost.lower, hi, xtol=1e-300, rtol=1e-15)


def effective_problem(problem: Problem, ability: AbilityProfile | float, cost: CostSpec) -> Problem:
    """The fixed-effort problem: drift sqrt(lambda e*) mu, flow cost c(e*)."""
    lam = ability.lam if isinstance(ability, AbilityProfile) else AbilityProfile(ability).lam
    e_star = solve_effort(cost)
    return replace(problem, mu=math.sqrt(lam * e_star) * problem.mu, c=cost.c(e_star))


def ability_thresholds(
    problem: Problem,
    lambda_lo: float,
    lambda_hi: float,
    cost: CostSpec,
    bracket: tuple[float, float] | None = None,
) -> tuple[float, float]:
    """(k_under, k_over): below k_under the abler type is slower, above k_over faster."""
    if not lambda_hi >= lambda_lo > 0:
        raise ValidationError("need lambda_hi >= lambda_lo > 0")
    e_star = solve_effort(cost)
    cp = canonicalize(replace(problem, c=cost.c(e_star)))
    k_star = find_peak_complexity(cp, bracket)
    return k_star / math.sqrt(lambda_hi * e_star), k_star / math.sqrt(lambda_lo * e_star)
