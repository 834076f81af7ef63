"""Optimal log-odds stopping thresholds and the closed-form value function.

The thresholds (lo, hi) solve the smooth-pasting system

    k^2 / c~ = G(hi) - G(lo),           G(x) = e^x - e^-x + 2x,
    0        = h(hi) - h(lo),           h(x) = x + e^x - e^l~ (x - e^-x).

``h`` is strictly convex with its minimum at l~, so for every upper threshold
hi > l~ there is exactly one lo < l~ on the same level set of ``h``. Along that
branch the first residual is strictly increasing in hi, which turns the system
into a bracketed one-dimensional root search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .core import CanonicalProblem, belief_from_log_odds, log_odds
from .errors import ConvergenceFailure, DomainError

TOL = 1e-10
MAX_ITER = 200
HI_START = 50.0
HI_CAP = 700.0  # exp overflows beyond ~709
_RTOL = 4.0 * 2.220446049250313e-16


@dataclass(frozen=True)
class Boundaries:
    ell_lo: float
    ell_hi: float
    residual_1: float = math.nan
    residual_2: float = math.nan

    @property
    def immediate_stop(self) -> bool:
        return not (self.ell_lo < 0.0 < self.ell_hi)

    @property
    def p_lo(self) -> float:
        return belief_from_log_odds(self.ell_lo)

    @property
    def p_hi(self) -> float:
        return belief_from_log_odds(self.ell_hi)


@dataclass(frozen=True)
class ValueCoefficients:
    beta0: float
    beta1: float


def _expm1_minus_id(y: float) -> float:
    """e^y - 1 - y without cancellation near 0."""
    if abs(y) < 1e-2:
        term, total = y * y / 2.0, 0.0
        for n in range(3, 11):
            total += term
            term *= y / n
        return total
    return math.expm1(y) - y


def _level(y: float, e_tilde: float) -> float:
    # h(l~ + y) - h(l~)
    return e_tilde * _expm1_minus_id(y) + _expm1_minus_id(-y)


def _level_slope(y: float, e_tilde: float) -> float:
    return e_tilde * math.expm1(y) - math.expm1(-y)


def g_gap(hi: float, lo: float) -> float:
    """G(hi) - G(lo) in hyperbolic form."""
    return 4.0 * math.cosh(0.5 * (hi + lo)) * math.sinh(0.5 * (hi - lo)) + 2.0 * (hi - lo)


def residuals(b: Boundaries | tuple[float, float], cp: CanonicalProblem) -> tuple[float, float]:
    """Residuals of the two boundary equations at (lo, hi)."""
    lo, hi = (b.ell_lo, b.ell_hi) if isinstance(b, Boundaries) else b
    e_tilde = math.exp(cp.ell_tilde)
    r1 = g_gap(hi, lo) - cp.k**2 / cp.c_tilde
    r2 = _level(hi - cp.ell_tilde, e_tilde) - _level(lo - cp.ell_tilde, e_tilde)
    return r1, r2


def _lower_offset(y_hi: float, e_tilde: float) -> float:
    """The y < 0 on the level set of h through y_hi (offsets measured from l~)."""
    if y_hi == 0.0:
        return 0.0
    target = _level(y_hi, e_tilde)
    a = -y_hi
    while _level(a, e_tilde) < target:
        a *= 2.0
    return brentq(lambda y: _level(y, e_tilde) - target, a, 0.0, xtol=1e-300, rtol=_RTOL)


def _polish(lo: float, hi: float, cp: CanonicalProblem, steps: int = 4) -> tuple[float, float]:
    """A few guarded Newton steps on the 2x2 system."""
    e_tilde = math.exp(cp.ell_tilde)
    best = (lo, hi)
    best_err = max(map(abs, residuals(best, cp)))
    for _ in range(steps):
        if best_err == 0.0:
            break
        r1, r2 = residuals((lo, hi), cp)
        j11 = 2.0 * math.cosh(hi) + 2.0
        j12 = -(2.0 * math.cosh(lo) + 2.0)
        j21 = _level_slope(hi - cp.ell_tilde, e_tilde)
        j22 = -_level_slope(lo - cp.ell_tilde, e_tilde)
        det = j11 * j22 - j12 * j21
        if det == 0.0 or not math.isfinite(det):
            break
        hi, lo = hi - (r1 * j22 - j12 * r2) / det, lo - (j11 * r2 - j21 * r1) / det
        err = max(map(abs, residuals((lo, hi), cp)))
        if not err < best_err:
            break
        best, best_err = (lo, hi), err
    return best


def solve_boundaries(
    cp: CanonicalProblem, tol: float = TOL, max_iter: int = MAX_ITER
) -> Boundaries:
    """Optimal stopping thresholds in log-odds for the canonical problem.

    Raises ConvergenceFailure, carrying the outer iteration trace, when the
    residual target is not met.
    """
    try:
        big_k = cp.k**2 / cp.c_tilde
    except OverflowError:
        big_k = math.inf
    if not math.isfinite(big_k):
        raise ConvergenceFailure(f"k^2/c~ overflows float64 (k={cp.k!r}, c~={cp.c_tilde!r})", [])
    lt = cp.ell_tilde
    if big_k == 0.0:
        return Boundaries(lt, lt, 0.0, 0.0)
    e_tilde = math.exp(lt)
    trace: list[tuple[float, float]] = []

    def phi(y_hi: float) -> float:
        y_lo = _lower_offset(y_hi, e_tilde)
        val = g_gap(lt + y_hi, lt + y_lo) - big_k
        trace.append((lt + y_hi, val))
        return val

    upper = HI_START
    while phi(upper) <= 0.0:
        upper *= 2.0
        if upper + lt > HI_CAP:
            raise ConvergenceFailure("could not bracket the upper threshold", trace)

    try:
        y_hi = brentq(phi, 0.0, upper, xtol=1e-300, rtol=_RTOL, maxiter=max_iter)
    except RuntimeError as exc:
        raise ConvergenceFailure(str(exc), trace) from exc
    lo, hi = lt + _lower_offset(y_hi, e_tilde), lt + y_hi
    lo, hi = _polish(lo, hi, cp)
    r1, r2 = residuals((lo, hi), cp)
    # the equations carry terms of size ~ k^2/c~ + e^|l|; no float64 residual beats their ulp
    floor = 16.0 * 2.220446049250313e-16 * (big_k + math.exp(min(max(abs(lo), abs(hi)), HI_CAP)))
    tol = max(tol, floor)
    if not (abs(r1) < tol and abs(r2) < tol):
        raise ConvergenceFailure(
            f"residuals ({r1:.3e}, {r2:.3e}) exceed tolerance {tol:.1e}", trace
        )
    return Boundaries(lo, hi, r1, r2)


def canonical_for_boundaries(ell_lo: float, ell_hi: float, k: float = 1.0) -> CanonicalProblem:
    """The canonical problem whose optimal thresholds are (ell_lo, ell_hi)."""
    if not ell_lo < ell_hi:
        raise DomainError(f"need ell_lo < ell_hi, got ({ell_lo!r}, {ell_hi!r})")
    span = ell_hi - ell_lo
    e_gap = math.exp(ell_hi) - math.exp(ell_lo)
    e_tilde = (span + e_gap) / (span + e_gap * math.exp(-ell_hi - ell_lo))
    return CanonicalProblem(k=k, c_tilde=k**2 / g_gap(ell_hi, ell_lo), ell_tilde=math.log(e_tilde))


def value_coefficients(b: Boundaries, cp: CanonicalProblem) -> ValueCoefficients:
    scale = cp.c_tilde / cp.k**2
    lo = b.ell_lo
    beta1 = -scale * (2.0 * math.sinh(lo) + 2.0 * lo)
    beta0 = -scale * (-math.expm1(lo) - lo)
    return ValueCoefficients(beta0=beta0, beta1=beta1)


def value_a(p: float, b: Boundaries, cp: CanonicalProblem) -> float:
    """Normalized value V_a(p) of the auxiliary problem where a is the risky option."""
    ell = log_odds(p)
    if not b.ell_lo < ell < b.ell_hi:
        return max(p - cp.p_tilde, 0.0)
    coef = value_coefficients(b, cp)
    scale = cp.c_tilde / cp.k**2
    return scale * (2.0 * p - 1.0) * ell + p * coef.beta1 + coef.beta0
