"""Complexity identification from the choice response to a small bonus."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .boundaries import Boundaries, solve_boundaries
from .core import CanonicalProblem, Problem, apply_bonus, canonicalize
from .errors import DegenerateShare, DomainError, InvalidShare, NumericalInstability, ValidationError
from .stats import stop_stats


def choice_share_b(cp: CanonicalProblem) -> float:
    """P(choose b) under the optimal thresholds."""
    b = solve_boundaries(cp)
    return 1.0 - stop_stats(b, cp.k).prob_choose_a


def choice_share_a(cp: CanonicalProblem) -> float:
    return stop_stats(solve_boundaries(cp), cp.k).prob_choose_a


class Derivative(NamedTuple):
    value: float
    discrepancy: float  # |D(h/2) - D(h)| before extrapolation


def _richardson(d_h: float, d_half: float, order: int = 2) -> Derivative:
    factor = 2**order
    value = (factor * d_half - d_h) / (factor - 1)
    change = abs(d_half - d_h)
    if change > 0.1 * abs(d_half):
        raise NumericalInstability(
            f"step halving moved the estimate from {d_h:.6g} to {d_half:.6g}"
        )
    return Derivative(value, change)


def share_slope(cp: CanonicalProblem, h_p: float = 1e-4) -> Derivative:
    """d P(choose b) / d p~ by central differences with Richardson extrapolation."""
    p0 = cp.p_tilde

    def d(h):
        return (choice_share_b(cp.with_p_tilde(p0 + h)) - choice_share_b(cp.with_p_tilde(p0 - h))) / (2 * h)

    return _richardson(d(h_p), d(h_p / 2))


def cross_partial(cp: CanonicalProblem, h_p: float = 1e-4, h_k: float | None = None) -> Derivative:
    """d^2 P(choose b) / (d p~ d k) from a 4-point cross difference."""
    p0, k0 = cp.p_tilde, cp.k
    h_k = 1e-4 * k0 if h_k is None else h_k

    def share(dp, dk):
        return choice_share_b(CanonicalProblem(k0 + dk, cp.c_tilde, cp.with_p_tilde(p0 + dp).ell_tilde))

    def d(hp, hk):
        return (share(hp, hk) - share(hp, -hk) - share(-hp, hk) + share(-hp, -hk)) / (4 * hp * hk)

    return _richardson(d(h_p, h_k), d(h_p / 2, h_k / 2))


def q_sensitivity_closed_form(b: Boundaries) -> float:
    """d P(choose a) / d exp(l~) along the optimal thresholds, in closed form."""
    hi, lo = b.ell_hi, b.ell_lo
    if not hi > 0 > lo:
        raise DomainError("closed form requires ell_hi > 0 > ell_lo")
    span = hi - lo
    core = (math.exp(hi) - math.exp(lo) + math.exp(hi + lo) * span) ** 2
    denom = span + math.sinh(hi) - math.sinh(lo)
    csch = 1.0 / math.sinh(span / 2)
    first = (
        math.exp(-2.5 * hi - 2 * lo) * (1 + math.exp(hi)) * core * csch
        / math.cosh(lo / 2) * math.sinh(hi)
        / (16 * (1 - math.cosh(span)) * denom)
    )
    second = (
        math.exp(-2.5 * lo - 2 * hi) * (1 + math.exp(lo)) * core * csch**3
        / math.cosh(hi / 2) * math.sinh(lo)
        / (32 * denom)
    )
    return first + second


def q_sensitivity_numeric(cp: CanonicalProblem, rel_step: float = 1e-4) -> Derivative:
    """The same sensitivity through the solver, differencing in exp(l~)."""
    e0 = math.exp(cp.ell_tilde)
    h = rel_step * e0

    def share(e):
        return choice_share_a(CanonicalProblem(cp.k, cp.c_tilde, math.log(e)))

    def d(step):
        return (share(e0 + step) - share(e0 - step)) / (2 * step)

    return _richardson(d(h), d(h / 2))


@dataclass(frozen=True)
class RankRow:
    problem_id: str
    delta: float
    se: float
    rank: int


@dataclass(frozen=True)
class ComplexityRanking:
    """Rows ordered most complex first; ``separated[i]`` compares rows i and i+1."""

    rows: list[RankRow]
    separated: list[bool]

    @property
    def order(self) -> list[str]:
        return [r.problem_id for r in self.rows]

    @property
    def ties(self) -> list[tuple[str, str]]:
        return [
            (a.problem_id, b.problem_id)
            for a, b, sep in zip(self.rows, self.rows[1:], self.separated)
            if not sep
        ]


def _rank(ids, deltas, ses, separated_fn) -> ComplexityRanking:
    order = sorted(range(len(ids)), key=lambda i: -deltas[i])
    rows, separated = [], []
    rank = 1
    for pos, i in enumerate(order):
        if pos:
            j = order[pos - 1]
            sep = separated_fn(j, i)
            separated.append(sep)
            if sep:
                rank = pos + 1
        rows.append(RankRow(ids[i], deltas[i], ses[i], rank))
    return ComplexityRanking(rows, separated)


def rank_problems(
    problems: Sequence[Problem],
    eps: float | None = None,
    ids: Sequence[str] | None = None,
    rel_tol: float = 1e-9,
) -> ComplexityRanking:
    """Rank by the increase in P(choose b) after a bonus ``eps`` on b.

    ``eps`` defaults to 1% of each problem's stakes.
    """
    ids = [str(i) for i in ids] if ids is not None else [f"p{i}" for i in range(len(problems))]
    if len(ids) != len(problems):
        raise ValidationError("ids and problems differ in length")
    deltas = []
    for pid, prob in zip(ids, problems):
        bonus = 1e-2 * prob.payoffs.delta if eps is None else eps
        base = choice_share_b(canonicalize(prob))
        if base <= 0.0 or base >= 1.0:
            raise DegenerateShare(f"problem {pid}: baseline share of b is {base}")
        shifted = choice_share_b(canonicalize(apply_bonus(prob, "b", bonus)))
        deltas.append(shifted - base)

    def separated(i, j):
        return abs(deltas[i] - deltas[j]) > rel_tol * max(abs(deltas[i]), abs(deltas[j]), 1e-300)

    return _rank(ids, deltas, [0.0] * len(ids), separated)


@dataclass(frozen=True)
class ShareObservation:
    problem_id: str
    baseline_share_b: float
    shifted_share_b: float
    n_obs: int


def rank_from_data(shares: Sequence[ShareObservation], z: float = 2.0) -> ComplexityRanking:
    """Rank observed share responses; adjacent rows are separated when their
    deltas differ by more than ``z`` combined binomial standard errors."""
    ids, deltas, ses = [], [], []
    for s in shares:
        for v in (s.baseline_share_b, s.shifted_share_b):
            if not 0.0 <= v <= 1.0:
                raise InvalidShare(f"problem {s.problem_id}: share {v} outside [0, 1]")
        if s.n_obs < 1:
            raise ValidationError(f"problem {s.problem_id}: n_obs must be at least 1")
        b0, b1 = s.baseline_share_b, s.shifted_share_b
        ids.append(s.problem_id)
        deltas.append(b1 - b0)
        ses.append(math.sqrt((b0 * (1 - b0) + b1 * (1 - b1)) / s.n_obs))

    def separated(i, j):
        combined = math.hypot(ses[i], ses[j])
        # n = 1 gives no usable variance estimate: never call a dominance significant
        if min(shares[i].n_obs, shares[j].n_obs) < 2:
            return False
        return abs(deltas[i] - deltas[j]) > z * combined

    return _rank(ids, deltas, ses, separated)


def share_at(cp: CanonicalProblem, p_tilde: float) -> float:
    return choice_share_b(CanonicalProblem(cp.k, cp.c_tilde, math.log(p_tilde / (1 - p_tilde))))


__all__ = [
    "ComplexityRanking",
    "Derivative",
    "RankRow",
    "ShareObservation",
    "choice_share_a",
    "choice_share_b",
    "cross_partial",
    "q_sensitivity_closed_form",
    "q_sensitivity_numeric",
    "rank_from_data",
    "rank_problems",
    "share_slope",
]
