"""Problem primitives: payoffs, stakes normalization and log-odds transforms."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

from .errors import DomainError, InvalidPayoffs, ValidationError

Alternative = Literal["a", "b"]


def log_odds(p: float) -> float:
    """ln(p / (1 - p)) for p in (0, 1)."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"belief must lie in (0, 1), got {p!r}")
    return math.log(p) - math.log1p(-p)


def belief_from_log_odds(ell: float) -> float:
    """Logistic map, evaluated without overflow for large |ell|."""
    if ell >= 0:
        return 1.0 / (1.0 + math.exp(-ell))
    e = math.exp(ell)
    return e / (1.0 + e)


@dataclass(frozen=True)
class PayoffMatrix:
    """u(alpha, theta); ``u_ab`` is the payoff of choosing a in state b."""

    u_aa: float
    u_ab: float
    u_ba: float
    u_bb: float

    def __post_init__(self):
        vals = (self.u_aa, self.u_ab, self.u_ba, self.u_bb)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidPayoffs(f"payoffs must be finite, got {vals}")
        if not (self.u_aa > self.u_ba and self.u_bb > self.u_ab):
            raise InvalidPayoffs(
                "each state must favour its own alternative "
                f"(u_aa > u_ba and u_bb > u_ab), got {vals}"
            )

    @classmethod
    def identity(cls) -> PayoffMatrix:
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_stakes(cls, delta: float, p_tilde: float) -> PayoffMatrix:
        """A payoff matrix with the given stakes and indifference belief."""
        if not delta > 0:
            raise InvalidPayoffs(f"stakes must be positive, got {delta!r}")
        if not 0.0 < p_tilde < 1.0:
            raise InvalidPayoffs(f"indifference belief must lie in (0, 1), got {p_tilde!r}")
        return cls(u_aa=(1.0 - p_tilde) * delta, u_ab=0.0, u_ba=0.0, u_bb=p_tilde * delta)

    @property
    def delta(self) -> float:
        return (self.u_aa - self.u_ba) + (self.u_bb - self.u_ab)

    def expected(self, alternative: Alternative, p: float) -> float:
        """u(alternative, p) where p is the probability of state a."""
        if alternative == "a":
            return p * self.u_aa + (1.0 - p) * self.u_ab
        return p * self.u_ba + (1.0 - p) * self.u_bb

    def best_value(self, p: float) -> float:
        return max(self.expected("a", p), self.expected("b", p))


@dataclass(frozen=True)
class Problem:
    payoffs: PayoffMatrix
    mu: float
    sigma: float
    c: float
    p0: float = 0.5

    def __post_init__(self):
        for name in ("mu", "sigma", "c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(f"{name} must be finite and positive, got {v!r}")
        if self.p0 != 0.5:
            raise DomainError("only the uniform prior p0 = 1/2 is supported")

    @property
    def k(self) -> float:
        return self.mu / self.sigma


@dataclass(frozen=True)
class CanonicalProblem:
    """Everything the boundary solver needs: k = mu/sigma, c/(2 delta), logit(p~)."""

    k: float
    c_tilde: float
    ell_tilde: float

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0):
            raise ValidationError(f"k must be finite and positive, got {self.k!r}")
        if not (math.isfinite(self.c_tilde) and self.c_tilde > 0):
            raise ValidationError(f"c_tilde must be finite and positive, got {self.c_tilde!r}")
        if not math.isfinite(self.ell_tilde):
            raise ValidationError(f"ell_tilde must be finite, got {self.ell_tilde!r}")

    @property
    def p_tilde(self) -> float:
        return belief_from_log_odds(self.ell_tilde)

    def with_k(self, k: float) -> CanonicalProblem:
        return replace(self, k=k)

    def with_p_tilde(self, p_tilde: float) -> CanonicalProblem:
        return replace(self, ell_tilde=log_odds(p_tilde))


def indifference_point(payoffs: PayoffMatrix) -> float:
    """Belief p~ at which u(a, p~) = u(b, p~)."""
    return (payoffs.u_bb - payoffs.u_ab) / payoffs.delta


def canonicalize(problem: Problem) -> CanonicalProblem:
    pay = problem.payoffs
    return CanonicalProblem(
        k=problem.mu / problem.sigma,
        c_tilde=problem.c / (2.0 * pay.delta),
        ell_tilde=log_odds(indifference_point(pay)),
    )


def apply_bonus(problem: Problem, alternative: Alternative, eps: float) -> Problem:
    """Add ``eps`` to both payoffs of ``alternative``; stakes are unchanged."""
    if eps < 0:
        raise ValidationError(f"bonus must be nonnegative, got {eps!r}")
    pay = problem.payoffs
    if alternative == "a":
        pay = replace(pay, u_aa=pay.u_aa + eps, u_ab=pay.u_ab + eps)
    elif alternative == "b":
        pay = replace(pay, u_ba=pay.u_ba + eps, u_bb=pay.u_bb + eps)
    else:
        raise ValidationError(f"unknown alternative {alternative!r}")
    return replace(problem, payoffs=pay)
