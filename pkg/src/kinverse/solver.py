"""Generalized-inverse Bayesian optimization loop.

Minimizes f(y) = sum_j w_j ((g_j(y) - x_j) / s_j)^2 over the model's box
domain with a GP surrogate, stopping on either of two tiers: the residual
norm falling below `norm_epsilon` (the target is attainable) or the
acquisition maximum falling below `acquisition_epsilon` (no further
improvement is credible, the minimum-norm solution has been located).

Internally the loop works on the unit box with objective values
standardized to zero mean and unit variance; every reported quantity is in
raw coordinates except the acquisition maximum, which is in standardized
objective units (as are `xi` and `acquisition_epsilon`).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .acquisition import AcquisitionConfig, Incumbent, maximize_acquisition
from .errors import EvaluationBudgetError, EvaluationError
from .gp import (
    DomainBounds,
    KernelFamily,
    KernelSpec,
    TrainingSet,
    fit,
    median_heuristic_kernel,
    optimize_hyperparams,
)
from .model import DisciplineModel
from .sampling import derive_seed, latin_hypercube

ACQUISITION_WARMUP = 5  # acquisition tier active once n >= n_init + this


class TerminationReason(str, Enum):
    TARGET_MET = "target_met"
    ACQUISITION_CONVERGED = "acquisition_converged"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class TargetSpec:
    """Desired characteristic values with per-target weights and scales.

    The residual norm is sum of w_j * ((g_j(y) - x_j) / s_j)^2; scales make
    the norm meaningful across heterogeneous units (deg/m vs deg/deg).
    """

    values: dict
    weights: dict = field(default_factory=dict)
    scales: dict = field(default_factory=dict)

    def __post_init__(self):
        values = {str(k): float(v) for k, v in self.values.items()}
        if not values:
            raise ValueError("target must name at least one characteristic")
        weights = {str(k): float(v) for k, v in self.weights.items()}
        scales = {str(k): float(v) for k, v in self.scales.items()}
        for table, label, check in (
            (weights, "weight", lambda v: v > 0),
            (scales, "scale", lambda v: v > 0),
        ):
            for key, val in table.items():
                if key not in values:
                    raise ValueError(f"{label} for unknown target {key!r}")
                if not check(val):
                    raise ValueError(f"{label} for {key!r} must be positive")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "scales", scales)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.values)

    def validate_against(self, output_names) -> None:
        unknown = [n for n in self.names if n not in output_names]
        if unknown:
            raise ValueError(
                f"target names {unknown} not among model outputs {tuple(output_names)}"
            )

    def residual_norm_sq(self, outputs: dict) -> float:
        total = 0.0
        for name, target in self.values.items():
            if name not in outputs:
                raise EvaluationError(f"model output lacks target statistic {name!r}")
            scaled = (float(outputs[name]) - target) / self.scales.get(name, 1.0)
            total += self.weights.get(name, 1.0) * scaled * scaled
        return total


@dataclass(frozen=True)
class TerminationPolicy:
    """Two-tier stopping rule plus the evaluation budget."""

    norm_epsilon: float = 1e-3
    acquisition_epsilon: float = 1e-3
    max_evaluations: int = 300
    n_init: int = 10

    def __post_init__(self):
        if self.norm_epsilon <= 0 or self.acquisition_epsilon <= 0:
            raise ValueError("both epsilons must be positive")
        if self.n_init < 2:
            raise ValueError("n_init must be at least 2")
        if self.max_evaluations < self.n_init:
            raise ValueError("max_evaluations must be >= n_init")


@dataclass(frozen=True)
class SolverSettings:
    """Surrogate bookkeeping knobs (kernel family, refit cadence)."""

    kernel_family: KernelFamily = KernelFamily.MATERN52
    hyper_restarts: int = 5
    hyper_refit_every: int = 1   # re-optimize hyperparameters every k-th fit
    hyper_full_every: int = 10   # full multi-start cadence; warm start otherwise
    duplicate_tol: float = 1e-9  # normalized distance triggering the proposal guard

    def __post_init__(self):
        object.__setattr__(self, "kernel_family", KernelFamily(self.kernel_family))
        if self.hyper_restarts < 0:
            raise ValueError("hyper_restarts must be non-negative")
        if self.hyper_refit_every < 1 or self.hyper_full_every < 1:
            raise ValueError("refit cadences must be positive")


@dataclass(frozen=True)
class EvaluationRecord:
    """One discipline evaluation inside a trace."""

    index: int
    point: np.ndarray
    outputs: dict | None
    norm_sq: float | None
    incumbent_value: float | None
    acquisition_max: float | None
    seconds: float
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class OptimizationTrace:
    """Complete record of one optimization run."""

    variable_names: tuple
    output_names: tuple
    method: str
    seed: int
    records: list = field(default_factory=list)
    reason: TerminationReason | None = None
    incumbent_point: np.ndarray | None = None
    incumbent_value: float | None = None
    incumbent_outputs: dict | None = None
    last_acquisition_max: float | None = None
    wall_seconds: float = 0.0

    @property
    def n_evaluations(self) -> int:
        return len(self.records)

    @property
    def n_failures(self) -> int:
        return sum(1 for r in self.records if r.failed)

    def best_norm_series(self) -> np.ndarray:
        """Best residual norm after each evaluation (failures carry forward)."""
        best = np.inf
        out = np.empty(len(self.records))
        for i, record in enumerate(self.records):
            if record.norm_sq is not None:
                best = min(best, record.norm_sq)
            out[i] = best
        return out

    def evaluations_to_threshold(self, epsilon: float) -> int | None:
        """Evaluation count at which the residual first fell below epsilon."""
        for i, record in enumerate(self.records):
            if record.norm_sq is not None and record.norm_sq < epsilon:
                return i + 1
        return None


def residual_objective(model: DisciplineModel, target: TargetSpec, point):
    """Weighted squared residual and raw outputs at one design point."""
    y = np.asarray(point, dtype=float)
    if not model.bounds.contains(y, atol=1e-9):
        raise ValueError(f"point {y} lies outside the model domain")
    outputs = model.evaluate(y)
    return target.residual_norm_sq(outputs), outputs


def initial_design(bounds: DomainBounds, n_init: int, seed: int) -> np.ndarray:
    """Latin-hypercube initial design, deterministic given the seed."""
    if n_init < 2:
        raise ValueError("n_init must be at least 2")
    rng = np.random.default_rng(seed)
    return bounds.from_unit(latin_hypercube(n_init, bounds.dim, rng))


class _Run:
    """Mutable state of one optimization run: dataset, incumbent, trace."""

    def __init__(self, model, target, norm_epsilon, max_evaluations, method, seed):
        self.model = model
        self.target = target
        self.norm_epsilon = norm_epsilon
        self.max_evaluations = max_evaluations
        self.trace = OptimizationTrace(
            variable_names=tuple(model.variable_names),
            output_names=tuple(model.output_names),
            method=method,
            seed=seed,
        )
        self.points: list[np.ndarray] = []
        self.values: list[float] = []
        self.incumbent_point = None
        self.incumbent_value = np.inf
        self.incumbent_outputs = None
        self.max_failures = max(1, int(0.2 * max_evaluations))

    @property
    def n_evals(self) -> int:
        return len(self.trace.records)

    def evaluate(self, point, acquisition_max=None) -> bool:
        """Evaluate the model, record, update incumbent; True when target met."""
        start = time.perf_counter()
        try:
            norm_sq, outputs = residual_objective(self.model, self.target, point)
            error = None
        except EvaluationError as exc:
            norm_sq, outputs, error = None, None, str(exc)
        seconds = time.perf_counter() - start

        if error is None:
            self.points.append(np.asarray(point, dtype=float))
            self.values.append(norm_sq)
            if norm_sq < self.incumbent_value:
                self.incumbent_point = np.asarray(point, dtype=float)
                self.incumbent_value = norm_sq
                self.incumbent_outputs = outputs
        incumbent = None if self.incumbent_outputs is None else self.incumbent_value
        self.trace.records.append(
            EvaluationRecord(
                index=self.n_evals,
                point=np.asarray(point, dtype=float),
                outputs=outputs,
                norm_sq=norm_sq,
                incumbent_value=incumbent,
                acquisition_max=acquisition_max,
                seconds=seconds,
                error=error,
            )
        )
        if self.trace.n_failures > self.max_failures:
            self.finish(None)
            raise EvaluationBudgetError(
                f"{self.trace.n_failures} failed evaluations exceed 20% of the "
                f"budget ({self.max_evaluations})",
                trace=self.trace,
            )
        return error is None and norm_sq < self.norm_epsilon

    def finish(self, reason, last_acquisition_max=None) -> OptimizationTrace:
        self.trace.reason = reason
        self.trace.incumbent_point = self.incumbent_point
        self.trace.incumbent_value = (
            None if self.incumbent_outputs is None else self.incumbent_value
        )
        self.trace.incumbent_outputs = self.incumbent_outputs
        if last_acquisition_max is not None:
            self.trace.last_acquisition_max = last_acquisition_max
        return self.trace


def solve(
    model: DisciplineModel,
    target: TargetSpec,
    policy: TerminationPolicy,
    acq: AcquisitionConfig,
    seed: int = 0,
    settings: SolverSettings = SolverSettings(),
) -> OptimizationTrace:
    """Run the BO loop until a termination tier fires or the budget runs out.

    The target-norm tier is checked after every evaluation (including the
    initial design); the acquisition tier after each acquisition
    maximization, once the dataset has n_init + ACQUISITION_WARMUP points.
    Deterministic for identical arguments and seed.
    """
    target.validate_against(model.output_names)
    bounds = model.bounds
    unit = DomainBounds.unit(bounds.dim)
    run = _Run(model, target, policy.norm_epsilon, policy.max_evaluations,
               f"bo:{acq.kind.value}", seed)
    started = time.perf_counter()

    def done(reason, acq_max=None):
        trace = run.finish(reason, acq_max)
        trace.wall_seconds = time.perf_counter() - started
        return trace

    for point in initial_design(bounds, policy.n_init, seed):
        if run.evaluate(point):
            return done(TerminationReason.TARGET_MET)
        if run.n_evals >= policy.max_evaluations:
            return done(TerminationReason.BUDGET_EXHAUSTED)

    kernel: KernelSpec | None = None
    fit_count = 0
    rng = np.random.default_rng(derive_seed(seed, 3))
    acq_max = None

    while run.n_evals < policy.max_evaluations:
        if not run.points:
            # every evaluation so far failed; probe fresh random points
            if run.evaluate(bounds.from_unit(rng.uniform(size=bounds.dim))):
                return done(TerminationReason.TARGET_MET)
            continue
        unit_points = bounds.to_unit(np.asarray(run.points))
        raw_values = np.asarray(run.values)
        v_mean = float(raw_values.mean())
        v_std = float(raw_values.std())
        if v_std < 1e-12:
            v_std = 1.0
        std_values = (raw_values - v_mean) / v_std
        training = TrainingSet(unit_points, std_values)

        if training.n < 2:
            kernel = median_heuristic_kernel(training, settings.kernel_family)
        elif kernel is None or fit_count % settings.hyper_refit_every == 0:
            full = kernel is None or fit_count % settings.hyper_full_every == 0
            kernel = optimize_hyperparams(
                training,
                settings.kernel_family,
                restarts=settings.hyper_restarts if full else 0,
                seed=derive_seed(seed, 1, fit_count),
                initial=kernel,
            )
        fit_count += 1
        posterior = fit(kernel, training)

        incumbent = Incumbent(
            bounds.to_unit(run.incumbent_point),
            (run.incumbent_value - v_mean) / v_std,
        )
        step_acq = replace(acq, seed=derive_seed(acq.seed, 2, run.n_evals))
        result = maximize_acquisition(posterior, step_acq, incumbent, unit)
        acq_max = result.value

        if (
            run.n_evals >= policy.n_init + ACQUISITION_WARMUP
            and acq_max <= policy.acquisition_epsilon
        ):
            return done(TerminationReason.ACQUISITION_CONVERGED, acq_max)

        proposal = result.point
        distances = np.linalg.norm(unit_points - proposal, axis=1)
        if distances.min() < settings.duplicate_tol:
            screen_dist = np.min(
                np.linalg.norm(
                    result.screen_points[:, None, :] - unit_points[None, :, :], axis=2
                ),
                axis=1,
            )
            fresh = screen_dist >= settings.duplicate_tol
            if np.any(fresh):
                candidates = np.where(fresh)[0]
                proposal = result.screen_points[
                    candidates[np.argmax(result.screen_values[candidates])]
                ]
            else:
                proposal = rng.uniform(size=bounds.dim)

        if run.evaluate(bounds.from_unit(proposal), acquisition_max=acq_max):
            return done(TerminationReason.TARGET_MET, acq_max)

    return done(TerminationReason.BUDGET_EXHAUSTED, acq_max)
