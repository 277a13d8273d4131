"""Exact Gaussian-process regression over a bounded box domain.

Kernel evaluation, Gram matrices, Cholesky-based fitting with jitter
escalation, predictive mean/stddev, and marginal-likelihood hyperparameter
selection. All operations here work on the coordinates they are given;
callers that want normalized inputs (the BO solver maps the domain to the
unit box and standardizes objective values) do so before fitting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.linalg import LinAlgError
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize
from scipy.spatial.distance import cdist

from .errors import SingularModelError
from .sampling import latin_hypercube

_SQRT5 = math.sqrt(5.0)
_LOG_2PI = math.log(2.0 * math.pi)

# Jitter escalation: start at JITTER_START * signal_variance, multiply by
# JITTER_GROWTH until the Cholesky succeeds, give up past JITTER_CAP.
JITTER_START = 1e-10
JITTER_GROWTH = 10.0
JITTER_CAP = 1e-4


class KernelFamily(str, Enum):
    SQUARED_EXPONENTIAL = "squared_exponential"
    MATERN52 = "matern52"


@dataclass(frozen=True)
class DomainBounds:
    """Axis-aligned box domain."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("lower and upper must be 1-D vectors of equal length")
        if lower.size < 1:
            raise ValueError("domain must have at least one dimension")
        if not np.all(np.isfinite(lower)) or not np.all(np.isfinite(upper)):
            raise ValueError("bounds must be finite")
        bad = np.where(lower >= upper)[0]
        if bad.size:
            d = int(bad[0])
            raise ValueError(
                f"lower bound must be < upper bound (dimension {d}: "
                f"{lower[d]} >= {upper[d]})"
            )
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def span(self) -> np.ndarray:
        return self.upper - self.lower

    @classmethod
    def unit(cls, dim: int) -> "DomainBounds":
        return cls(np.zeros(dim), np.ones(dim))

    def contains(self, point: np.ndarray, atol: float = 0.0) -> bool:
        p = np.asarray(point, dtype=float)
        return bool(np.all(p >= self.lower - atol) and np.all(p <= self.upper + atol))

    def clip(self, point: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(point, dtype=float), self.lower, self.upper)

    def to_unit(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points, dtype=float) - self.lower) / self.span

    def from_unit(self, unit_points: np.ndarray) -> np.ndarray:
        return self.lower + np.asarray(unit_points, dtype=float) * self.span


@dataclass(frozen=True)
class KernelSpec:
    """Stationary kernel with per-dimension (ARD) lengthscales."""

    family: KernelFamily
    lengthscales: np.ndarray
    signal_variance: float
    noise_variance: float = 0.0

    def __post_init__(self):
        ls = np.atleast_1d(np.asarray(self.lengthscales, dtype=float))
        if ls.ndim != 1 or ls.size < 1:
            raise ValueError("lengthscales must be a non-empty 1-D vector")
        if not np.all(ls > 0):
            raise ValueError("all lengthscales must be positive")
        if not self.signal_variance > 0:
            raise ValueError("signal_variance must be positive")
        if self.noise_variance < 0:
            raise ValueError("noise_variance must be non-negative")
        object.__setattr__(self, "lengthscales", ls)
        object.__setattr__(self, "family", KernelFamily(self.family))
        object.__setattr__(self, "signal_variance", float(self.signal_variance))
        object.__setattr__(self, "noise_variance", float(self.noise_variance))

    @property
    def dim(self) -> int:
        return self.lengthscales.size


@dataclass(frozen=True)
class TrainingSet:
    """Observed (point, objective value) pairs driving the GP posterior."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        vals = np.atleast_1d(np.asarray(self.values, dtype=float))
        if pts.ndim != 2:
            raise ValueError("points must be a (n, m) array")
        if pts.shape[0] != vals.shape[0]:
            raise ValueError(
                f"points and values must have equal length "
                f"({pts.shape[0]} != {vals.shape[0]})"
            )
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def with_observation(self, point: np.ndarray, value: float) -> "TrainingSet":
        pt = np.asarray(point, dtype=float).reshape(1, -1)
        if self.n and pt.shape[1] != self.dim:
            raise ValueError("new point dimension does not match training set")
        return TrainingSet(np.vstack([self.points, pt]) if self.n else pt,
                           np.append(self.values, float(value)))


def _as_matrix(points, dim: int) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1) if dim == 1 else pts.reshape(1, -1)
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise ValueError(f"points must have dimension {dim}, got shape {pts.shape}")
    return pts


def _cross_gram(kernel: KernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kernel matrix k(a_i, b_j) for row-stacked point sets."""
    sa = a / kernel.lengthscales
    sb = b / kernel.lengthscales
    d2 = cdist(sa, sb, "sqeuclidean")
    if kernel.family is KernelFamily.SQUARED_EXPONENTIAL:
        return kernel.signal_variance * np.exp(-0.5 * d2)
    r = np.sqrt(d2)
    return (
        kernel.signal_variance
        * (1.0 + _SQRT5 * r + (5.0 / 3.0) * d2)
        * np.exp(-_SQRT5 * r)
    )


def kernel_eval(kernel: KernelSpec, a, b) -> float:
    """Evaluate k(a, b). Symmetric; equals signal_variance at a == b."""
    av = np.atleast_1d(np.asarray(a, dtype=float))
    bv = np.atleast_1d(np.asarray(b, dtype=float))
    if av.shape != (kernel.dim,) or bv.shape != (kernel.dim,):
        raise ValueError(
            f"inputs must be vectors of dimension {kernel.dim}, "
            f"got {av.shape} and {bv.shape}"
        )
    diff = (av - bv) / kernel.lengthscales
    d2 = float(diff @ diff)
    if kernel.family is KernelFamily.SQUARED_EXPONENTIAL:
        return float(kernel.signal_variance * math.exp(-0.5 * d2))
    r = math.sqrt(d2)
    return float(
        kernel.signal_variance
        * (1.0 + _SQRT5 * r + (5.0 / 3.0) * d2)
        * math.exp(-_SQRT5 * r)
    )


def build_gram(kernel: KernelSpec, points) -> np.ndarray:
    """Symmetric n x n kernel matrix over a point set."""
    pts = _as_matrix(points, kernel.dim)
    return _cross_gram(kernel, pts, pts)


def _cholesky_with_jitter(gram: np.ndarray, kernel: KernelSpec):
    """Lower Cholesky of gram + noise*I + jitter*I, escalating jitter.

    A plain factorization (jitter 0) is attempted first so that exact
    noise-free interpolation survives; on failure the jitter ladder starts
    at JITTER_START * signal_variance.
    """
    n = gram.shape[0]
    eye = np.eye(n)
    base = gram + kernel.noise_variance * eye
    jitter = 0.0
    cap = JITTER_CAP * kernel.signal_variance
    while True:
        try:
            chol = cholesky(base + jitter * eye, lower=True)
            return chol, jitter
        except LinAlgError:
            jitter = (
                JITTER_START * kernel.signal_variance
                if jitter == 0.0
                else jitter * JITTER_GROWTH
            )
            if jitter > cap * (1.0 + 1e-12):
                raise SingularModelError(
                    f"Gram matrix not positive definite even with jitter "
                    f"{cap:.3e} (n={n})"
                ) from None


@dataclass(frozen=True)
class GPPosterior:
    """Fitted GP with cached Cholesky factor and weight vector.

    Immutable after `fit`; predictions may run concurrently. The predictive
    stddev refers to the latent function (observation noise excluded).
    """

    kernel: KernelSpec
    training: TrainingSet
    chol_factor: np.ndarray
    weight_vector: np.ndarray
    jitter: float

    def predict(self, query) -> tuple[float, float]:
        """Posterior predictive (mean, stddev) at a single query point."""
        mean, std = self.predict_batch(np.asarray(query, dtype=float).reshape(1, -1))
        return float(mean[0]), float(std[0])

    def predict_batch(self, queries) -> tuple[np.ndarray, np.ndarray]:
        """Posterior predictive (means, stddevs) at row-stacked query points."""
        q = _as_matrix(queries, self.kernel.dim)
        k_star = _cross_gram(self.kernel, self.training.points, q)
        mean = k_star.T @ self.weight_vector
        v = solve_triangular(self.chol_factor, k_star, lower=True)
        var = self.kernel.signal_variance - np.einsum("ij,ij->j", v, v)
        # cancellation noise below ~1e-14 * signal is numerically zero
        var[var < 1e-14 * self.kernel.signal_variance] = 0.0
        return mean, np.sqrt(var)


def fit(kernel: KernelSpec, training: TrainingSet) -> GPPosterior:
    """Fit an exact zero-mean GP to the training set.

    Raises SingularModelError if the Gram matrix stays non-positive-definite
    after the maximum jitter escalation.
    """
    if training.n < 1:
        raise ValueError("fit requires at least one training point")
    if training.dim != kernel.dim:
        raise ValueError(
            f"training dimension {training.dim} does not match kernel "
            f"dimension {kernel.dim}"
        )
    gram = build_gram(kernel, training.points)
    chol, jitter = _cholesky_with_jitter(gram, kernel)
    alpha = cho_solve((chol, True), training.values)
    return GPPosterior(kernel, training, chol, alpha, jitter)


def predict(posterior: GPPosterior, query) -> tuple[float, float]:
    """Functional alias for GPPosterior.predict."""
    return posterior.predict(query)


def log_marginal_likelihood(kernel: KernelSpec, training: TrainingSet) -> float:
    """log p(values | points, kernel) under the zero-mean GP marginal."""
    if training.n < 1:
        raise ValueError("log marginal likelihood requires at least one point")
    gram = build_gram(kernel, training.points)
    chol, _ = _cholesky_with_jitter(gram, kernel)
    alpha = cho_solve((chol, True), training.values)
    return float(
        -0.5 * float(training.values @ alpha)
        - float(np.sum(np.log(np.diag(chol))))
        - 0.5 * training.n * _LOG_2PI
    )


def median_heuristic_kernel(
    training: TrainingSet, family: KernelFamily = KernelFamily.MATERN52
) -> KernelSpec:
    """Median-pairwise-distance lengthscales; the documented fallback."""
    pts = training.points
    span = np.ptp(pts, axis=0)
    span = np.where(span > 0, span, 1.0)
    scales = np.empty(training.dim)
    for d in range(training.dim):
        diffs = np.abs(pts[:, d, None] - pts[None, :, d])
        diffs = diffs[np.triu_indices(training.n, k=1)]
        positive = diffs[diffs > 0]
        scales[d] = np.median(positive) if positive.size else 0.5 * span[d]
    value_var = float(np.var(training.values))
    if value_var <= 0:
        value_var = 1.0
    return KernelSpec(family, scales, value_var, 1e-6 * value_var)


def optimize_hyperparams(
    training: TrainingSet,
    family: KernelFamily = KernelFamily.MATERN52,
    restarts: int = 5,
    seed: int = 0,
    initial: KernelSpec | None = None,
) -> KernelSpec:
    """Select kernel hyperparameters by maximizing the log marginal likelihood.

    Multi-start bounded L-BFGS-B over log-lengthscales, log-signal-variance
    and log-noise-variance. Starts are a median-distance heuristic, the
    optional `initial` spec (warm start), and `restarts` Latin-hypercube draws
    over the log box. Falls back to the median-distance heuristic when every
    start fails.

    Lengthscale and signal-variance boxes are [1e-3, 1e3] relative to the
    data span / value variance; the noise box is [1e-10, 1] relative, so a
    deterministic objective may drive noise to effectively zero.
    """
    if training.n < 2:
        raise ValueError("hyperparameter optimization requires n >= 2")
    m = training.dim
    span = np.ptp(training.points, axis=0)
    span = np.where(span > 0, span, 1.0)
    value_var = float(np.var(training.values))
    if value_var <= 0:
        value_var = 1.0

    log_lo = np.concatenate([np.log(1e-3 * span), [math.log(1e-3 * value_var),
                                                   math.log(1e-10 * value_var)]])
    log_hi = np.concatenate([np.log(1e3 * span), [math.log(1e3 * value_var),
                                                  math.log(1.0 * value_var)]])
    box = list(zip(log_lo, log_hi))

    def pack(spec: KernelSpec) -> np.ndarray:
        raw = np.concatenate(
            [np.log(spec.lengthscales),
             [math.log(spec.signal_variance),
              math.log(max(spec.noise_variance, 1e-12 * value_var))]]
        )
        return np.clip(raw, log_lo, log_hi)

    def unpack(logp: np.ndarray) -> KernelSpec:
        return KernelSpec(family, np.exp(logp[:m]),
                          math.exp(logp[m]), math.exp(logp[m + 1]))

    def objective(logp: np.ndarray) -> float:
        try:
            value = -log_marginal_likelihood(unpack(logp), training)
        except SingularModelError:
            return 1e25
        return value if math.isfinite(value) else 1e25

    heuristic = median_heuristic_kernel(training, family)
    starts = [pack(heuristic)]
    if initial is not None:
        starts.append(pack(initial))
    if restarts > 0:
        rng = np.random.default_rng(seed)
        unit = latin_hypercube(restarts, m + 2, rng)
        starts.extend(log_lo + unit * (log_hi - log_lo))

    best_x, best_f = None, math.inf
    for start in starts:
        result = minimize(objective, start, method="L-BFGS-B", bounds=box,
                          options={"maxiter": 60})
        if math.isfinite(result.fun) and result.fun < best_f and result.fun < 1e24:
            best_x, best_f = result.x, float(result.fun)
    if best_x is None:
        return heuristic
    return unpack(best_x)
