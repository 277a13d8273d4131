import math

import numpy as np
import pytest

import kinverse as kv


def mc_expected_improvement(mean, stddev, incumbent, xi, n_samples, seed):
    """Monte-Carlo oracle: E[max(0, incumbent + xi - f)], f ~ N(mean, stddev^2)."""
    rng = np.random.default_rng(seed)
    draws = mean + stddev * rng.standard_normal(n_samples)
    return float(np.maximum(incumbent + xi - draws, 0.0).mean())


# ---------------------------------------------------------------- normal helpers

def test_cdf_at_zero_is_half():
    assert kv.std_normal_cdf(0.0) == pytest.approx(0.5, abs=1e-15)


def test_pdf_at_zero_closed_form():
    assert kv.std_normal_pdf(0.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi),
                                                   abs=1e-15)


def test_cdf_against_quadrature_oracle():
    from scipy.integrate import quad

    # tail mass below -12 is ~1e-33, negligible against the 1e-6 tolerance
    value, err = quad(kv.std_normal_pdf, -12.0, 1.96)
    assert err < 1e-9
    assert kv.std_normal_cdf(1.96) == pytest.approx(value, abs=1e-6)
    assert kv.std_normal_cdf(1.96) == pytest.approx(0.97500, abs=1e-5)


def test_cdf_monotone_and_bounded():
    zs = np.linspace(-6, 6, 201)
    cs = kv.std_normal_cdf(zs)
    assert np.all(np.diff(cs) >= 0)
    assert np.all((cs >= 0) & (cs <= 1))
    ps = kv.std_normal_pdf(zs)
    assert np.all(ps >= 0)
    assert np.allclose(ps, kv.std_normal_pdf(-zs))


# ---------------------------------------------------------------- EI

def test_ei_zero_when_no_uncertainty_and_no_improvement():
    assert kv.ei_value(mean=1.0, stddev=0.0, incumbent_value=0.0, xi=0.0) == 0.0


def test_ei_at_incumbent_mean_equals_pdf_at_zero():
    expected = kv.std_normal_pdf(0.0)
    assert kv.ei_value(0.0, 1.0, 0.0, 0.0) == pytest.approx(expected, abs=1e-12)
    mc = mc_expected_improvement(0.0, 1.0, 0.0, 0.0, 10**7, seed=0)
    assert kv.ei_value(0.0, 1.0, 0.0, 0.0) == pytest.approx(mc, abs=1e-3)


def test_ei_near_deterministic_improvement():
    value = kv.ei_value(mean=-10.0, stddev=0.01, incumbent_value=0.0, xi=0.0)
    assert value == pytest.approx(10.0, abs=1e-6)
    mc = mc_expected_improvement(-10.0, 0.01, 0.0, 0.0, 10**7, seed=1)
    assert value == pytest.approx(mc, abs=1e-3)


def test_ei_degenerate_limit_with_xi():
    assert kv.ei_value(0.5, 0.0, 0.0, xi=0.8) == pytest.approx(0.3, abs=1e-15)


def test_ei_nonnegative_everywhere():
    rng = np.random.default_rng(2)
    mu = rng.normal(scale=3.0, size=10_000)
    sd = np.abs(rng.normal(scale=2.0, size=10_000))
    sd[::7] = 0.0
    inc = rng.normal(size=10_000)
    xi = np.abs(rng.normal(scale=0.1, size=10_000))
    values = np.array([kv.ei_value(m, s, i, x)
                       for m, s, i, x in zip(mu, sd, inc, xi)])
    assert np.all(values >= 0.0)


def test_ei_monotone_in_mean_and_stddev():
    sds = 0.7
    means = np.linspace(-2, 2, 101)
    ei_by_mean = np.array([kv.ei_value(m, sds, 0.0, 0.01) for m in means])
    assert np.all(np.diff(ei_by_mean) <= 1e-12)

    # non-decreasing in stddev when mean >= incumbent + xi
    stds = np.linspace(0.0, 3.0, 121)
    ei_by_std = np.array([kv.ei_value(0.5, s, 0.0, 0.01) for s in stds])
    assert np.all(np.diff(ei_by_std) >= -1e-12)


# ---------------------------------------------------------------- MPI

def test_mpi_half_at_shifted_incumbent_mean():
    for sd in (0.1, 1.0, 5.0):
        assert kv.mpi_value(mean=0.9, stddev=sd, incumbent_value=1.0,
                            xi=0.1) == pytest.approx(0.5, abs=1e-12)


def test_mpi_step_function_at_zero_stddev():
    assert kv.mpi_value(0.0, 0.0, 1.0, xi=0.5) == 1.0
    assert kv.mpi_value(1.0, 0.0, 1.0, xi=0.5) == 0.0
    assert kv.mpi_value(0.5, 0.0, 1.0, xi=0.5) == 0.5


def test_mpi_matches_cdf_oracle():
    expected = kv.std_normal_cdf(-1.0)
    assert kv.mpi_value(1.0, 0.1, 1.0, xi=0.1) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.15866, abs=1e-5)


def test_mpi_bounded_on_random_tuples():
    rng = np.random.default_rng(3)
    for _ in range(10_000):
        v = kv.mpi_value(rng.normal(scale=3), abs(rng.normal()),
                         rng.normal(), abs(rng.normal(scale=0.1)))
        assert 0.0 <= v <= 1.0


# ---------------------------------------------------------------- maximization

def fit_1d(points, values, lengthscale=0.25, noise=0.0):
    kernel = kv.KernelSpec(kv.KernelFamily.MATERN52, [lengthscale], 1.0, noise)
    return kv.fit(kernel, kv.TrainingSet(points, values))


def test_maximize_beats_random_probes():
    post = fit_1d([[0.5]], [0.0])
    bounds = kv.DomainBounds([0.0], [1.0])
    config = kv.AcquisitionConfig(restarts=5, seed=0)
    incumbent = kv.Incumbent(np.array([0.5]), 0.0)
    result = kv.maximize_acquisition(post, config, incumbent, bounds)
    assert bounds.contains(result.point)
    rng = np.random.default_rng(4)
    probes = rng.uniform(size=(100, 1))
    mu, sd = post.predict_batch(probes)
    assert result.value >= np.max(kv.ei_value(mu, sd, 0.0, config.xi)) - 1e-12


def test_maximize_symmetric_two_observations():
    post = fit_1d([[0.0], [1.0]], [1.0, 1.0])
    bounds = kv.DomainBounds([0.0], [1.0])
    config = kv.AcquisitionConfig(restarts=10, seed=1, xi=0.0)
    incumbent = kv.Incumbent(np.array([0.0]), 1.0)
    result = kv.maximize_acquisition(post, config, incumbent, bounds)
    assert abs(result.point[0] - 0.5) < 0.1

    grid = np.linspace(0.0, 1.0, 10_001).reshape(-1, 1)
    mu, sd = post.predict_batch(grid)
    grid_best = np.max(kv.ei_value(mu, sd, 1.0, 0.0))
    assert result.value >= grid_best - 1e-9


def test_maximize_deterministic_given_seed():
    rng = np.random.default_rng(5)
    post = fit_1d(rng.uniform(size=(5, 1)), rng.normal(size=5), noise=1e-8)
    bounds = kv.DomainBounds([0.0], [1.0])
    incumbent = kv.Incumbent(np.array([0.2]), -1.0)
    config = kv.AcquisitionConfig(restarts=4, seed=9)
    a = kv.maximize_acquisition(post, config, incumbent, bounds)
    b = kv.maximize_acquisition(post, config, incumbent, bounds)
    assert np.array_equal(a.point, b.point)
    assert a.value == b.value


def test_maximize_stays_in_bounds_random_cases():
    rng = np.random.default_rng(6)
    for trial in range(5):
        m = rng.integers(1, 4)
        kernel = kv.KernelSpec(kv.KernelFamily.MATERN52,
                               rng.uniform(0.1, 0.5, size=m), 1.0, 1e-8)
        pts = rng.uniform(size=(6, m))
        post = kv.fit(kernel, kv.TrainingSet(pts, rng.normal(size=6)))
        bounds = kv.DomainBounds(np.zeros(m), np.ones(m))
        incumbent = kv.Incumbent.from_training(post.training)
        kind = (kv.AcquisitionKind.EXPECTED_IMPROVEMENT if trial % 2 == 0
                else kv.AcquisitionKind.MAX_PROBABILITY_OF_IMPROVEMENT)
        result = kv.maximize_acquisition(
            post, kv.AcquisitionConfig(kind=kind, restarts=3, seed=trial),
            incumbent, bounds)
        assert bounds.contains(result.point)


def test_acquisition_config_validation():
    with pytest.raises(ValueError):
        kv.AcquisitionConfig(xi=-0.1)
    with pytest.raises(ValueError):
        kv.AcquisitionConfig(restarts=0)


def test_incumbent_from_training():
    training = kv.TrainingSet([[0.0], [1.0], [2.0]], [3.0, -1.0, 0.5])
    inc = kv.Incumbent.from_training(training)
    assert inc.value == -1.0
    assert np.array_equal(inc.point, [1.0])
