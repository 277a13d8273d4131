import numpy as np
import pytest

import kinverse as kv
from kinverse.sampling import derive_seed

TARGET_SCALES = {"bump_steer": 10.0, "roll_steer": 0.15}


@pytest.fixture(scope="session")
def nominal_hardpoints():
    return kv.load_hardpoints("builtin")


@pytest.fixture(scope="session")
def one_hp_model(nominal_hardpoints):
    """Outer tie rod free in x, y, z with +/-25 mm bounds."""
    design = kv.DesignVariables.around(
        nominal_hardpoints,
        [("outer_tie_rod", "x"), ("outer_tie_rod", "y"), ("outer_tie_rod", "z")],
        half_range=0.025,
    )
    return kv.SuspensionModel(nominal_hardpoints, design)


def make_self_inverse_target(model, seed, scales=TARGET_SCALES,
                             names=("bump_steer", "roll_steer")):
    """Draw an interior point, evaluate it, use its outputs as the target."""
    rng = np.random.default_rng(derive_seed(seed, 7))
    unit = 0.1 + 0.8 * rng.uniform(size=model.bounds.dim)
    y_star = model.bounds.from_unit(unit)
    outputs = model.evaluate(y_star)
    values = {name: outputs[name] for name in names}
    return kv.TargetSpec(values, scales={k: scales[k] for k in names}), y_star


def toy_linear_model(dim=2, names=None):
    """g(y) = y on the unit box: the simplest invertible discipline model."""
    names = names or tuple(f"c{i}" for i in range(dim))
    bounds = kv.DomainBounds(np.zeros(dim), np.ones(dim))
    return kv.CallableModel(
        lambda y: dict(zip(names, map(float, y))), bounds, names
    )
