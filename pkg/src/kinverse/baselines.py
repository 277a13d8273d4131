"""Comparison optimizers sharing the discipline-model and trace interfaces.

Stand-ins for commercial optimizers used in convergence comparisons: a
projected finite-difference gradient descent, uniform random search, and a
(mu/mu, lambda) evolution strategy. Every discipline call, including
finite-difference probes and line-search trials, lands in the trace so
evaluation counts are comparable with the BO solver.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .gp import DomainBounds
from .model import DisciplineModel
from .sampling import derive_seed, latin_hypercube
from .solver import TargetSpec, TerminationReason, _Run


class BaselineKind(str, Enum):
    FINITE_DIFFERENCE_GRADIENT = "fd_gradient"
    RANDOM_SEARCH = "random_search"
    EVOLUTION_STRATEGY = "evolution_strategy"


@dataclass(frozen=True)
class BaselineConfig:
    """Baseline choice plus method-specific parameters.

    All distances are in normalized (unit-box) coordinates: `fd_step` is the
    central-difference probe, `initial_step` the starting line-search step,
    `sigma0` the ES mutation scale.
    """

    kind: BaselineKind
    max_evaluations: int = 300
    seed: int = 0
    n_init: int = 10
    fd_step: float = 1e-4
    armijo_c: float = 1e-4
    initial_step: float = 0.25
    backtrack: float = 0.5
    population: int = 8
    parents: int = 4
    sigma0: float = 0.2

    def __post_init__(self):
        object.__setattr__(self, "kind", BaselineKind(self.kind))
        if self.max_evaluations <= 0:
            raise ValueError("max_evaluations must be positive")
        if self.fd_step <= 0:
            raise ValueError("fd_step must be positive")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtrack factor must lie in (0, 1)")
        if self.population < 4:
            raise ValueError("population size must be at least 4")
        if not 1 <= self.parents <= self.population:
            raise ValueError("parents must lie in [1, population]")
        if self.n_init < 2:
            raise ValueError("n_init must be at least 2")


def run_baseline(
    model: DisciplineModel,
    target: TargetSpec,
    config: BaselineConfig,
    bounds: DomainBounds | None = None,
    norm_epsilon: float | None = None,
):
    """Run a baseline optimizer and return an OptimizationTrace.

    When `norm_epsilon` is given the run stops early with TargetMet once the
    residual falls below it; otherwise it spends the whole budget. The trace
    reason is BudgetExhausted for any other stop (including stalls).
    """
    target.validate_against(model.output_names)
    bounds = model.bounds if bounds is None else bounds
    stop_early = norm_epsilon is not None
    run = _Run(
        model,
        target,
        norm_epsilon if stop_early else -1.0,
        config.max_evaluations,
        config.kind.value,
        config.seed,
    )
    started = time.perf_counter()

    def evaluate_unit(u, run=run, bounds=bounds):
        """Returns (value or None for failures, target_met)."""
        met = run.evaluate(bounds.from_unit(np.clip(u, 0.0, 1.0)))
        return run.trace.records[-1].norm_sq, met

    dispatch = {
        BaselineKind.FINITE_DIFFERENCE_GRADIENT: _fd_gradient,
        BaselineKind.RANDOM_SEARCH: _random_search,
        BaselineKind.EVOLUTION_STRATEGY: _evolution_strategy,
    }
    reason = dispatch[config.kind](run, config, bounds, evaluate_unit)
    trace = run.finish(reason)
    trace.wall_seconds = time.perf_counter() - started
    return trace


def _initial_best(run, config, bounds, evaluate_unit):
    """Shared LHS initialization; returns (best_u, best_f) or termination."""
    rng = np.random.default_rng(config.seed)
    n_init = min(config.n_init, config.max_evaluations)
    best_u, best_f = None, np.inf
    for u in latin_hypercube(n_init, bounds.dim, rng):
        value, met = evaluate_unit(u)
        if value is not None and value < best_f:
            best_u, best_f = u, value
        if met:
            return best_u, best_f, TerminationReason.TARGET_MET
        if run.n_evals >= config.max_evaluations:
            return best_u, best_f, TerminationReason.BUDGET_EXHAUSTED
    return best_u, best_f, None


def _fd_gradient(run, config, bounds, evaluate_unit):
    """Projected gradient descent with central differences and Armijo search."""
    m = bounds.dim
    x, fx, early = _initial_best(run, config, bounds, evaluate_unit)
    if early is not None:
        return early
    if x is None:
        return TerminationReason.BUDGET_EXHAUSTED

    step = config.initial_step
    while run.n_evals + 2 * m < config.max_evaluations:
        grad = np.zeros(m)
        for d in range(m):
            up = x.copy()
            dn = x.copy()
            up[d] = min(x[d] + config.fd_step, 1.0)
            dn[d] = max(x[d] - config.fd_step, 0.0)
            f_up, met = evaluate_unit(up)
            if met:
                return TerminationReason.TARGET_MET
            f_dn, met = evaluate_unit(dn)
            if met:
                return TerminationReason.TARGET_MET
            if f_up is None or f_dn is None or up[d] == dn[d]:
                grad[d] = 0.0
            else:
                grad[d] = (f_up - f_dn) / (up[d] - dn[d])
        norm = float(np.linalg.norm(grad))
        if norm < 1e-14:
            break

        t = step
        accepted = False
        while run.n_evals < config.max_evaluations:
            candidate = np.clip(x - t * grad, 0.0, 1.0)
            fc, met = evaluate_unit(candidate)
            if met:
                return TerminationReason.TARGET_MET
            direction = x - candidate
            if fc is not None and fc <= fx - config.armijo_c * float(grad @ direction):
                x, fx = candidate, fc
                step = min(t * 2.0, 1.0)
                accepted = True
                break
            t *= config.backtrack
            if t < 1e-12:
                break
        if not accepted:
            break
    return TerminationReason.BUDGET_EXHAUSTED


def _random_search(run, config, bounds, evaluate_unit):
    rng = np.random.default_rng(config.seed)
    while run.n_evals < config.max_evaluations:
        _, met = evaluate_unit(rng.uniform(size=bounds.dim))
        if met:
            return TerminationReason.TARGET_MET
    return TerminationReason.BUDGET_EXHAUSTED


def _evolution_strategy(run, config, bounds, evaluate_unit):
    """(mu/mu, lambda) ES with box clipping and a 1/5-style step rule."""
    rng = np.random.default_rng(derive_seed(config.seed, 11))
    mean, best_f, early = _initial_best(run, config, bounds, evaluate_unit)
    if early is not None:
        return early
    if mean is None:
        return TerminationReason.BUDGET_EXHAUSTED

    sigma = config.sigma0
    m = bounds.dim
    while run.n_evals < config.max_evaluations:
        size = min(config.population, config.max_evaluations - run.n_evals)
        offspring = np.clip(
            mean + sigma * rng.standard_normal((size, m)), 0.0, 1.0
        )
        scores = []
        for child in offspring:
            value, met = evaluate_unit(child)
            if met:
                return TerminationReason.TARGET_MET
            scores.append(np.inf if value is None else value)
        scores = np.asarray(scores)
        order = np.argsort(scores, kind="stable")
        top = order[: min(config.parents, size)]
        if not np.isfinite(scores[top]).any():
            continue
        mean = offspring[top].mean(axis=0)
        if scores[top[0]] < best_f:
            best_f = scores[top[0]]
            sigma = min(sigma * 1.15, 0.5)
        else:
            sigma = max(sigma * 0.82, 1e-6)
    return TerminationReason.BUDGET_EXHAUSTED
