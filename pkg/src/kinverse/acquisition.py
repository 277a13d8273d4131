"""Acquisition functions (EI, MPI) and their maximization over a box domain.

All values follow the minimization convention: improvement means falling
below the incumbent (best observed) objective value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import minimize
from scipy.special import ndtr

from .gp import DomainBounds, GPPosterior, TrainingSet
from .sampling import latin_hypercube

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

PRESCREEN_SIZE = 1000
FD_STEP_RELATIVE = 1e-6  # central-difference step, relative to the bounds span


class AcquisitionKind(str, Enum):
    EXPECTED_IMPROVEMENT = "expected_improvement"
    MAX_PROBABILITY_OF_IMPROVEMENT = "max_probability_of_improvement"


@dataclass(frozen=True)
class AcquisitionConfig:
    """Which acquisition to use and how to maximize it."""

    kind: AcquisitionKind = AcquisitionKind.EXPECTED_IMPROVEMENT
    xi: float = 0.01
    restarts: int = 10
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", AcquisitionKind(self.kind))
        if self.xi < 0:
            raise ValueError("xi must be non-negative")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")


@dataclass(frozen=True)
class Incumbent:
    """Best observed point and objective value so far."""

    point: np.ndarray
    value: float

    @classmethod
    def from_training(cls, training: TrainingSet) -> "Incumbent":
        if training.n < 1:
            raise ValueError("incumbent requires at least one observation")
        idx = int(np.argmin(training.values))
        return cls(training.points[idx].copy(), float(training.values[idx]))


def std_normal_cdf(z):
    """Standard normal CDF (scalar or array)."""
    out = ndtr(np.asarray(z, dtype=float))
    return float(out) if out.ndim == 0 else out


def std_normal_pdf(z):
    """Standard normal PDF (scalar or array)."""
    zz = np.asarray(z, dtype=float)
    out = _INV_SQRT_2PI * np.exp(-0.5 * zz * zz)
    return float(out) if out.ndim == 0 else out


def ei_value(mean, stddev, incumbent_value, xi=0.0):
    """Expected improvement below the incumbent, with exploration offset xi.

    Closed form of E[max(0, incumbent + xi - f)] for f ~ N(mean, stddev^2);
    reduces to max(0, incumbent + xi - mean) in the stddev -> 0 limit.
    """
    mu = np.asarray(mean, dtype=float)
    sigma = np.asarray(stddev, dtype=float)
    imp = incumbent_value + xi - mu
    positive = sigma > 0
    safe = np.where(positive, sigma, 1.0)
    z = imp / safe
    value = np.where(
        positive,
        imp * ndtr(z) + sigma * (_INV_SQRT_2PI * np.exp(-0.5 * z * z)),
        np.maximum(imp, 0.0),
    )
    out = np.maximum(value, 0.0)
    return float(out) if out.ndim == 0 else out


def mpi_value(mean, stddev, incumbent_value, xi=0.0):
    """Probability of improving on the incumbent by at least xi.

    Phi((incumbent - xi - mean) / stddev); a step function at stddev = 0.
    """
    mu = np.asarray(mean, dtype=float)
    sigma = np.asarray(stddev, dtype=float)
    imp = incumbent_value - xi - mu
    positive = sigma > 0
    safe = np.where(positive, sigma, 1.0)
    step = np.where(imp > 0, 1.0, np.where(imp < 0, 0.0, 0.5))
    out = np.where(positive, ndtr(imp / safe), step)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class AcquisitionResult:
    """Best point found plus the random pre-screen cloud (for fallbacks)."""

    point: np.ndarray
    value: float
    screen_points: np.ndarray
    screen_values: np.ndarray


def _acquisition_fn(config: AcquisitionConfig, incumbent_value: float):
    if config.kind is AcquisitionKind.EXPECTED_IMPROVEMENT:
        return lambda mu, sd: ei_value(mu, sd, incumbent_value, config.xi)
    return lambda mu, sd: mpi_value(mu, sd, incumbent_value, config.xi)


def maximize_acquisition(
    posterior: GPPosterior,
    config: AcquisitionConfig,
    incumbent: Incumbent,
    bounds: DomainBounds,
) -> AcquisitionResult:
    """Maximize the acquisition over the box domain.

    A dense uniform pre-screen of PRESCREEN_SIZE candidates is combined with
    `restarts` runs of bounded L-BFGS-B started from Latin-hypercube points
    plus one run from the incumbent (whose acquisition value floors the
    maximum), gradients taken by central finite differences (step
    FD_STEP_RELATIVE of the span per dimension). Deterministic given the
    config seed; ties among restarts go to the lowest restart index, and a
    restart must strictly beat the best pre-screen candidate to replace it.
    """
    m = bounds.dim
    rng = np.random.default_rng(config.seed)
    acq = _acquisition_fn(config, incumbent.value)

    screen = bounds.from_unit(rng.uniform(size=(PRESCREEN_SIZE, m)))
    mu, sd = posterior.predict_batch(screen)
    screen_values = np.asarray(acq(mu, sd))
    best_idx = int(np.argmax(screen_values))
    best_point = screen[best_idx].copy()
    best_value = float(screen_values[best_idx])

    step = FD_STEP_RELATIVE * bounds.span

    def value_at(x: np.ndarray) -> float:
        mean, std = posterior.predict(x)
        return float(acq(mean, std))

    def neg(x: np.ndarray) -> float:
        return -value_at(x)

    def neg_grad(x: np.ndarray) -> np.ndarray:
        probes = np.repeat(x[None, :], 2 * m, axis=0)
        for d in range(m):
            probes[2 * d, d] += step[d]
            probes[2 * d + 1, d] -= step[d]
        mean, std = posterior.predict_batch(probes)
        vals = np.asarray(acq(mean, std))
        return -(vals[0::2] - vals[1::2]) / (2.0 * step)

    starts = list(bounds.from_unit(latin_hypercube(config.restarts, m, rng)))
    if bounds.contains(incumbent.point, atol=1e-12):
        starts.append(bounds.clip(incumbent.point))
    box = list(zip(bounds.lower, bounds.upper))
    for start in starts:
        result = minimize(neg, start, jac=neg_grad, method="L-BFGS-B",
                          bounds=box, options={"maxiter": 50})
        candidate = bounds.clip(result.x)
        candidate_value = value_at(candidate)
        if candidate_value > best_value:
            best_point, best_value = candidate, candidate_value

    return AcquisitionResult(best_point, best_value, screen, screen_values)
