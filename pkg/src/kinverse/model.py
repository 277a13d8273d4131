"""Discipline-model interface shared by the solver, baselines and harness."""

from __future__ import annotations

from typing import Protocol, runtime_checkable

import numpy as np

from .gp import DomainBounds


@runtime_checkable
class DisciplineModel(Protocol):
    """The black box g mapping design coordinates to named characteristics."""

    name: str
    is_pure: bool
    output_names: tuple[str, ...]

    @property
    def bounds(self) -> DomainBounds: ...

    @property
    def variable_names(self) -> tuple[str, ...]: ...

    def evaluate(self, point: np.ndarray) -> dict[str, float]: ...


class CallableModel:
    """Wrap a plain function as a discipline model (tests, synthetic cases)."""

    is_pure = True

    def __init__(self, fn, bounds: DomainBounds, output_names,
                 variable_names=None, name: str = "callable"):
        self.fn = fn
        self._bounds = bounds
        self.output_names = tuple(output_names)
        self._variable_names = (
            tuple(variable_names)
            if variable_names is not None
            else tuple(f"y{i}" for i in range(bounds.dim))
        )
        if len(self._variable_names) != bounds.dim:
            raise ValueError("variable_names must match the bounds dimension")
        self.name = name

    @property
    def bounds(self) -> DomainBounds:
        return self._bounds

    @property
    def variable_names(self) -> tuple[str, ...]:
        return self._variable_names

    def evaluate(self, point: np.ndarray) -> dict[str, float]:
        out = self.fn(np.asarray(point, dtype=float))
        if isinstance(out, dict):
            return {k: float(v) for k, v in out.items()}
        values = np.atleast_1d(np.asarray(out, dtype=float))
        if values.size != len(self.output_names):
            raise ValueError(
                f"function returned {values.size} values for "
                f"{len(self.output_names)} outputs"
            )
        return dict(zip(self.output_names, map(float, values)))
