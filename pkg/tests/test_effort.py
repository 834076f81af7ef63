import math

import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from wald_lab.boundaries import solve_boundaries, value_coefficients
from wald_lab.core import PayoffMatrix, Problem, canonicalize, log_odds
from wald_lab.effort import (
    AbilityProfile,
    CostSpec,
    ability_thresholds,
    effective_problem,
    parse_cost,
    quadratic_fixed,
    solve_effort,
)
from wald_lab.errors import NoInteriorOptimum, ValidationError
from wald_lab.stats import find_peak_complexity, stop_stats


def base_problem(k=1.0):
    return Problem(PayoffMatrix.identity(), mu=k, sigma=1.0, c=0.3)


class TestEffortLevel:
    @given(st.floats(0.01, 100), st.floats(0.01, 100))
    def test_quadratic_fixed_closed_form(self, a, b):
        assert solve_effort(quadratic_fixed(a, b)) == pytest.approx(math.sqrt(a / b), rel=1e-12)

    def test_quartic_cost(self):
        cost = CostSpec(c=lambda e: 0.5 + e**4, dc=lambda e: 4 * e**3, d2c=lambda e: 12 * e**2, lower=0.0)
        # 4e^4 = 0.5 + e^4
        assert solve_effort(cost) == pytest.approx((1 / 6) ** 0.25, rel=1e-12)

    def test_no_fixed_cost(self):
        with pytest.raises(NoInteriorOptimum):
            solve_effort(quadratic_fixed(0.0, 1.0))

    def test_inconsistent_derivative_rejected(self):
        with pytest.raises(ValidationError):
            CostSpec(c=lambda e: 1 + e * e, dc=lambda e: 3 * e + 1, d2c=lambda e: 3.0)

    def test_concave_cost_rejected(self):
        with pytest.raises(ValidationError):
            CostSpec(c=lambda e: 1 + math.sqrt(e + 1), dc=lambda e: 0.5 / math.sqrt(e + 1),
                     d2c=lambda e: -0.25 * (e + 1) ** -1.5)

    def test_parse_cost(self):
        cost = parse_cost("quadratic_fixed:1,4")
        assert solve_effort(cost) == pytest.approx(0.5)
        for bad in ("quadratic_fixed:1", "cubic:1,2", "quadratic_fixed:1,0"):
            with pytest.raises(ValidationError):
                parse_cost(bad)

    def test_ability_must_be_positive(self):
        with pytest.raises(ValidationError):
            AbilityProfile(0.0)


class TestEffectiveProblem:
    def test_drift_and_cost(self):
        cost = quadratic_fixed(1.0, 1.0)
        eff = effective_problem(base_problem(0.8), 4.0, cost)
        assert eff.mu == pytest.approx(2 * 0.8)
        assert eff.c == pytest.approx(2.0)
        assert eff.sigma == 1.0

    @pytest.mark.parametrize("lam,cost", [(1.0, quadratic_fixed(1, 1)), (4.0, quadratic_fixed(2, 0.5)),
                                          (0.3, quadratic_fixed(0.2, 3))])
    def test_effort_optimality_in_continuation_region(self, lam, cost):
        """e* c'(e*) = c(e*) = lambda e* k^2 (p(1-p))^2 V'' 2 delta at interior beliefs."""
        prob = base_problem(0.9)
        e_star = solve_effort(cost)
        eff = effective_problem(prob, lam, cost)
        cp = canonicalize(eff)
        b = solve_boundaries(cp)
        coef = value_coefficients(b, cp)
        scale = cp.c_tilde / cp.k**2
        v = lambda q: scale * (2 * q - 1) * mp.log(q / (1 - q)) + q * coef.beta1 + coef.beta0
        delta = prob.payoffs.delta
        for frac in (0.25, 0.5, 0.75):
            p = 1 / (1 + math.exp(-(b.ell_lo + frac * (b.ell_hi - b.ell_lo))))
            with mp.workdps(30):
                v2 = float(mp.diff(v, mp.mpf(p), 2))
            rhs = lam * e_star * prob.k**2 * (p * (1 - p)) ** 2 * v2 * 2 * delta
            assert e_star * cost.dc(e_star) == pytest.approx(cost.c(e_star), rel=1e-12)
            assert rhs == pytest.approx(cost.c(e_star), rel=1e-8)


class TestThresholds:
    def test_thresholds_rescale_peak(self):
        cost = quadratic_fixed(1.0, 1.0)
        prob = base_problem()
        k_under, k_over = ability_thresholds(prob, 1.0, 4.0, cost)
        cp = canonicalize(Problem(prob.payoffs, 1.0, 1.0, cost.c(1.0)))
        k_star = find_peak_complexity(cp)
        assert k_under == pytest.approx(k_star / 2, rel=1e-9)
        assert k_over == pytest.approx(k_star, rel=1e-9)

    def test_equal_abilities_collapse(self):
        k_under, k_over = ability_thresholds(base_problem(), 2.0, 2.0, quadratic_fixed(1, 1))
        assert k_under == k_over

    def test_invalid_order(self):
        with pytest.raises(ValidationError):
            ability_thresholds(base_problem(), 4.0, 1.0, quadratic_fixed(1, 1))

    def test_abler_type_more_accurate(self):
        cost = quadratic_fixed(1.0, 1.0)
        for k in (0.1, 0.7, 3.0):
            acc = []
            for lam in (1.0, 4.0):
                cp = canonicalize(effective_problem(base_problem(k), lam, cost))
                acc.append(stop_stats(solve_boundaries(cp), cp.k).accuracy)
            assert acc[1] >= acc[0]
