"""Euler-Maruyama simulation of the signal process stopped at log-odds thresholds.

Paths are grouped into fixed-size blocks. Block ``j`` draws from
``PCG64DXSM(SeedSequence(seed, spawn_key=(j,)))``, so a path's random stream
depends only on (seed, path index) and never on how blocks are spread over
workers. Aggregates use ``math.fsum`` (exactly rounded, order-independent).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .boundaries import Boundaries
from .core import Problem, belief_from_log_odds
from .errors import ResourceError, ValidationError
from .stats import StopStats

GENERATOR_ID = "numpy-PCG64DXSM/SeedSequence(seed,spawn_key=(block,))/block=1024"
BLOCK_SIZE = 1024
DEFAULT_CAP = 10**9
THREADS_ENV = "WALD_LAB_THREADS"


@dataclass(frozen=True)
class SimConfig:
    n_paths: int = 100_000
    dt: float = 1e-4
    seed: int = 0
    workers: int = 1
    max_steps: int = 10**8
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValidationError("n_paths must be at least 1")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValidationError("dt must be positive")
        if self.workers < 1:
            raise ValidationError("workers must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class PathOutcome:
    chose_a: bool
    stop_time: float
    state_was_a: bool


@dataclass(frozen=True)
class PathBatch:
    """Per-path results, in path-index order."""

    chose_a: np.ndarray
    steps: np.ndarray
    state_a: np.ndarray
    ell_final: np.ndarray
    dt: float

    @property
    def stop_time(self) -> np.ndarray:
        return self.steps * self.dt

    def outcomes(self) -> list[PathOutcome]:
        return [
            PathOutcome(bool(a), float(n) * self.dt, bool(s))
            for a, n, s in zip(self.chose_a, self.steps, self.state_a)
        ]


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64DXSM(np.random.SeedSequence(seed, spawn_key=(block,))))


@numba.njit(nogil=True, cache=True)
def _block_kernel(rng, n, mu, sigma, dt, lo, hi, max_steps):
    chose_a = np.zeros(n, np.bool_)
    steps = np.zeros(n, np.int64)
    state_a = np.zeros(n, np.bool_)
    ell_final = np.zeros(n)
    vol = sigma * math.sqrt(dt)
    to_ell = 2.0 * mu / sigma**2
    for i in range(n):
        is_a = rng.random() < 0.5
        drift = (mu if is_a else -mu) * dt
        x = 0.0
        ell = 0.0
        m = 0
        while m < max_steps:
            x += drift + vol * rng.standard_normal()
            m += 1
            ell = to_ell * x
            if ell >= hi or ell <= lo:
                break
        if not (ell >= hi or ell <= lo):
            return chose_a, steps, state_a, ell_final, i
        chose_a[i] = ell >= hi
        steps[i] = m
        state_a[i] = is_a
        ell_final[i] = ell
    return chose_a, steps, state_a, ell_final, -1


def _simulate_block(block, n, problem, b, cfg):
    rng = _block_rng(cfg.seed, block)
    *cols, stuck = _block_kernel(
        rng, n, problem.mu, problem.sigma, cfg.dt, b.ell_lo, b.ell_hi, cfg.max_steps
    )
    if stuck >= 0:
        raise ResourceError(f"path {block * BLOCK_SIZE + stuck} still running after {cfg.max_steps} steps")
    return cols


def _workers(cfg: SimConfig) -> int:
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            return max(1, min(cfg.workers, int(cap)))
        except ValueError:
            raise ValidationError(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
    return cfg.workers


def simulate_paths(problem: Problem, b: Boundaries, cfg: SimConfig) -> PathBatch:
    if cfg.n_paths * cfg.workers > cfg.cap:
        raise ResourceError(f"n_paths*workers={cfg.n_paths * cfg.workers} exceeds cap {cfg.cap}")
    n = cfg.n_paths
    if b.immediate_stop:
        state_a = _block_rng(cfg.seed, 0).random(n) < 0.5 if n else np.zeros(0, bool)
        choose = b.ell_hi <= 0.0 and not b.ell_lo == b.ell_hi == 0.0
        return PathBatch(np.full(n, choose), np.zeros(n, np.int64), state_a, np.zeros(n), cfg.dt)

    sizes = [min(BLOCK_SIZE, n - start) for start in range(0, n, BLOCK_SIZE)]

    def run(j):
        return _simulate_block(j, sizes[j], problem, b, cfg)

    workers = _workers(cfg)
    if workers == 1:
        parts = [run(j) for j in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    return PathBatch(*(np.concatenate(col) for col in zip(*parts)), dt=cfg.dt)


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    n = x.size
    mean = math.fsum(x) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2) / (n - 1)
    return mean, math.sqrt(var / n)


def metadata(cfg: SimConfig) -> dict[str, object]:
    return {"seed": cfg.seed, "dt": cfg.dt, "n_paths": cfg.n_paths, "generator": GENERATOR_ID}


def summarize(batch: PathBatch, cfg: SimConfig, sample_size: int = 0) -> StopStats:
    correct = (batch.chose_a == batch.state_a).astype(float)
    acc, acc_se = _mean_se(correct)
    t, t_se = _mean_se(batch.stop_time)
    pa, pa_se = _mean_se(batch.chose_a.astype(float))
    meta = metadata(cfg)
    if sample_size:
        meta["stop_time_sample"] = batch.stop_time[: min(sample_size, 1000)].tolist()
    return StopStats(
        accuracy=acc,
        expected_time=t,
        prob_choose_a=pa,
        source="monte_carlo",
        std_err={"accuracy": acc_se, "expected_time": t_se, "prob_choose_a": pa_se},
        metadata=meta,
    )


def simulate(problem: Problem, b: Boundaries, cfg: SimConfig) -> StopStats:
    """Monte Carlo estimates of accuracy, mean stopping time and P(choose a)."""
    if b.ell_lo == b.ell_hi == 0.0:
        # sampling never starts; the tie is split evenly by convention
        return StopStats(0.5, 0.0, 0.5, "monte_carlo",
                         {"accuracy": 0.0, "expected_time": 0.0, "prob_choose_a": 0.0},
                         metadata(cfg))
    return summarize(simulate_paths(problem, b, cfg), cfg)


def policy_payoffs(problem: Problem, b: Boundaries, cfg: SimConfig) -> np.ndarray:
    """Realized v(p_tau) - c*tau for every simulated path."""
    pay = problem.payoffs
    if b.immediate_stop:
        return np.full(cfg.n_paths, pay.best_value(0.5))
    batch = simulate_paths(problem, b, cfg)
    p = np.array([belief_from_log_odds(e) for e in batch.ell_final])
    v = np.maximum(p * pay.u_aa + (1 - p) * pay.u_ab, p * pay.u_ba + (1 - p) * pay.u_bb)
    return v - problem.c * batch.stop_time


def estimate_policy_value(problem: Problem, b: Boundaries, cfg: SimConfig) -> tuple[float, float]:
    """Monte Carlo value of the threshold policy ``b`` and its standard error."""
    return _mean_se(policy_payoffs(problem, b, cfg))
