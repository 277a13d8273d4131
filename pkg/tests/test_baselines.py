import numpy as np
import pytest

import kinverse as kv
from conftest import toy_linear_model


class CountingModel:
    """Wraps a model and counts discipline calls for accounting checks."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = 0
        self.name = inner.name
        self.is_pure = inner.is_pure
        self.output_names = inner.output_names

    @property
    def bounds(self):
        return self.inner.bounds

    @property
    def variable_names(self):
        return self.inner.variable_names

    def evaluate(self, point):
        self.calls += 1
        return self.inner.evaluate(point)


def quadratic_target():
    model = toy_linear_model(2, ("a", "b"))
    return model, kv.TargetSpec({"a": 0.4, "b": 0.6})


def test_fd_gradient_converges_on_convex_problem():
    model, target = quadratic_target()
    config = kv.BaselineConfig(kind=kv.BaselineKind.FINITE_DIFFERENCE_GRADIENT,
                               max_evaluations=200, seed=0)
    trace = kv.run_baseline(model, target, config)
    assert trace.incumbent_value < 1e-6
    assert trace.reason is kv.TerminationReason.BUDGET_EXHAUSTED


def test_fd_gradient_early_stop_with_norm_epsilon():
    model, target = quadratic_target()
    config = kv.BaselineConfig(kind="fd_gradient", max_evaluations=200, seed=0)
    trace = kv.run_baseline(model, target, config, norm_epsilon=1e-4)
    assert trace.reason is kv.TerminationReason.TARGET_MET
    assert trace.records[-1].norm_sq < 1e-4


def test_random_search_deterministic_trace():
    model, target = quadratic_target()
    config = kv.BaselineConfig(kind="random_search", max_evaluations=40, seed=3)
    a = kv.run_baseline(model, target, config)
    b = kv.run_baseline(model, target, config)
    assert a.n_evaluations == b.n_evaluations == 40
    for ra, rb in zip(a.records, b.records):
        assert np.array_equal(ra.point, rb.point)
        assert ra.norm_sq == rb.norm_sq


def test_evolution_strategy_improves_and_respects_bounds():
    model, target = quadratic_target()
    config = kv.BaselineConfig(kind="evolution_strategy", max_evaluations=120,
                               seed=1)
    trace = kv.run_baseline(model, target, config)
    assert trace.incumbent_value < 1e-3
    for record in trace.records:
        assert model.bounds.contains(record.point, atol=1e-12)


def test_every_discipline_call_is_recorded():
    for kind in ("fd_gradient", "random_search", "evolution_strategy"):
        inner, target = quadratic_target()
        model = CountingModel(inner)
        config = kv.BaselineConfig(kind=kind, max_evaluations=60, seed=2)
        trace = kv.run_baseline(model, target, config)
        assert trace.n_evaluations == model.calls
        assert trace.n_evaluations <= config.max_evaluations


def test_baseline_trace_schema_matches_solver():
    model, target = quadratic_target()
    config = kv.BaselineConfig(kind="random_search", max_evaluations=15, seed=0)
    trace = kv.run_baseline(model, target, config)
    assert trace.variable_names == model.variable_names
    assert trace.output_names == model.output_names
    record = trace.records[0]
    assert record.acquisition_max is None
    assert record.outputs is not None
    incumbents = [r.incumbent_value for r in trace.records]
    assert all(x >= y - 1e-15 for x, y in zip(incumbents, incumbents[1:]))


def test_baseline_config_validation():
    with pytest.raises(ValueError):
        kv.BaselineConfig(kind="fd_gradient", max_evaluations=0)
    with pytest.raises(ValueError):
        kv.BaselineConfig(kind="fd_gradient", fd_step=0.0)
    with pytest.raises(ValueError):
        kv.BaselineConfig(kind="evolution_strategy", population=2)
    with pytest.raises(ValueError):
        kv.BaselineConfig(kind="not_a_method")


def test_baseline_handles_failures_like_solver():
    bounds = kv.DomainBounds([0.0], [1.0])

    def flaky(y):
        if y[0] > 0.9:
            raise kv.EvaluationError("bad region")
        return {"a": float(y[0])}

    model = kv.CallableModel(flaky, bounds, ("a",))
    target = kv.TargetSpec({"a": 0.2})
    config = kv.BaselineConfig(kind="random_search", max_evaluations=50, seed=5)
    trace = kv.run_baseline(model, target, config)
    assert any(r.failed for r in trace.records)
    assert trace.incumbent_value is not None
