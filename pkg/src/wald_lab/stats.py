"""Closed-form speed/accuracy statistics of threshold stopping from l = 0."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

from ._numerics import golden_section_max
from .boundaries import Boundaries, solve_boundaries
from .core import CanonicalProblem, Problem, canonicalize
from .errors import BracketError, ConvergenceFailure, DomainError, ValidationError

Source = Literal["closed_form", "monte_carlo"]


@dataclass(frozen=True)
class StopStats:
    accuracy: float
    expected_time: float
    prob_choose_a: float
    source: Source = "closed_form"
    std_err: dict[str, float] | None = None
    metadata: dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class SweepRow:
    k: float
    ell_lo: float
    ell_hi: float
    p_lo: float
    p_hi: float
    accuracy: float
    expected_time: float


def _check_start(b: Boundaries) -> tuple[float, float]:
    lo, hi = b.ell_lo, b.ell_hi
    if not lo <= 0.0 <= hi:
        raise DomainError(f"prior log-odds 0 lies outside [{lo}, {hi}]")
    return lo, hi


def accuracy(b: Boundaries) -> float:
    """P(choice = state) when sampling starts at l = 0."""
    lo, hi = _check_start(b)
    if lo == hi:
        return 0.5
    # numerator and denominator divided by e^hi
    num = -math.expm1(lo) - math.expm1(-hi)
    return 0.5 * num / -math.expm1(lo - hi)


def expected_stop_time(b: Boundaries, k: float) -> float:
    lo, hi = _check_start(b)
    if lo == hi:
        return 0.0
    frac = math.expm1(lo) * math.expm1(-hi) / -math.expm1(lo - hi)
    return frac * (hi - lo) / (4.0 * k * k)


def prob_choose_a(b: Boundaries) -> float:
    lo, hi = _check_start(b)
    if lo == hi:
        return 0.5
    return (1.0 + math.exp(-hi)) * -math.expm1(lo) / (-2.0 * math.expm1(lo - hi))


def stop_stats(b: Boundaries, k: float) -> StopStats:
    """All three statistics, with the immediate-stop corner handled.

    When the prior lies outside the continuation region the decision-maker
    stops at once and takes whichever alternative is best at the prior.
    """
    if b.ell_lo > 0.0:
        return StopStats(0.5, 0.0, 0.0)
    if b.ell_hi < 0.0:
        return StopStats(0.5, 0.0, 1.0)
    return StopStats(accuracy(b), expected_stop_time(b, k), prob_choose_a(b))


def _canonical(problem: Problem | CanonicalProblem) -> CanonicalProblem:
    return problem if isinstance(problem, CanonicalProblem) else canonicalize(problem)


def expected_time_at(cp: CanonicalProblem, k: float) -> float:
    return stop_stats(solve_boundaries(cp.with_k(k)), k).expected_time


def sweep(problem: Problem | CanonicalProblem, k_grid: Sequence[float]) -> list[SweepRow]:
    """Re-solve the thresholds along a grid of k with c~ and l~ held fixed."""
    ks = list(k_grid)
    if not ks:
        raise ValidationError("k grid is empty")
    if any(not k > 0 for k in ks) or any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValidationError("k grid must be positive and strictly ascending")
    cp = _canonical(problem)
    rows = []
    for k in ks:
        try:
            b = solve_boundaries(cp.with_k(k))
        except ConvergenceFailure as exc:
            raise ConvergenceFailure(f"k={k!r}: {exc}", exc.trace) from exc
        st = stop_stats(b, k)
        rows.append(SweepRow(k, b.ell_lo, b.ell_hi, b.p_lo, b.p_hi, st.accuracy, st.expected_time))
    return rows


def default_peak_bracket(cp: CanonicalProblem, lo: float = 1e-3, hi: float = 1e3, n: int = 61):
    """Neighbours of the best point of a coarse log scan."""
    ks = [lo * (hi / lo) ** (i / (n - 1)) for i in range(n)]
    ts = [expected_time_at(cp, k) for k in ks]
    i = max(range(n), key=ts.__getitem__)
    return ks[max(i - 1, 0)], ks[min(i + 1, n - 1)]


def find_peak_complexity(
    problem: Problem | CanonicalProblem,
    bracket: tuple[float, float] | None = None,
    tol: float = 1e-8,
) -> float:
    """The k maximizing expected stopping time (c~ and l~ fixed)."""
    cp = _canonical(problem)
    lo, hi = bracket if bracket is not None else default_peak_bracket(cp)
    if not 0 < lo < hi:
        raise ValidationError(f"invalid bracket ({lo}, {hi})")

    def f(k):
        return expected_time_at(cp, k)

    probe = lo + 0.5 * (hi - lo)
    f_probe = f(probe)
    if not (f_probe > f(lo) and f_probe > f(hi)):
        raise BracketError(f"no interior maximum of expected time detected in ({lo}, {hi})")
    k_star, width = golden_section_max(f, lo, hi, tol=tol)
    if width > tol:
        raise ConvergenceFailure(f"golden-section interval {width:.2e} above {tol:.1e}")
    return k_star
