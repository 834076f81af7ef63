"""Optimal sequential sampling between two alternatives.

A decision maker watches a Brownian signal whose drift reveals which of two
states holds, pays a flow cost while watching, and stops to choose. The
package solves for the optimal log-odds stopping thresholds and derives
accuracy, expected stopping time, Monte Carlo checks, effort and
information-cost extensions, a discounting variant and a complexity probe.
"""

from .boundaries import Boundaries, canonical_for_boundaries, solve_boundaries, value_a
from .core import CanonicalProblem, PayoffMatrix, Problem, apply_bonus, canonicalize, log_odds
from .errors import ConvergenceFailure, ValidationError, WaldLabError
from .stats import StopStats, find_peak_complexity, stop_stats, sweep

__all__ = [
    "Boundaries",
    "CanonicalProblem",
    "ConvergenceFailure",
    "PayoffMatrix",
    "Problem",
    "StopStats",
    "ValidationError",
    "WaldLabError",
    "apply_bonus",
    "canonical_for_boundaries",
    "canonicalize",
    "find_peak_complexity",
    "log_odds",
    "solve_boundaries",
    "stop_stats",
    "sweep",
    "value_a",
]
