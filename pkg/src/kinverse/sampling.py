"""Space-filling sampling helpers."""

from __future__ import annotations

import numpy as np


def latin_hypercube(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Draw `n` Latin-hypercube samples in the unit box [0, 1)^dim.

    Each dimension is cut into `n` equal strata and every stratum receives
    exactly one point, uniformly placed within its cell.
    """
    if n < 1:
        raise ValueError(f"need at least one sample, got n={n}")
    if dim < 1:
        raise ValueError(f"need at least one dimension, got dim={dim}")
    out = np.empty((n, dim))
    for d in range(dim):
        out[:, d] = (rng.permutation(n) + rng.uniform(size=n)) / n
    return out


def derive_seed(*parts: int) -> int:
    """Deterministically mix integer parts into a single RNG seed."""
    state = np.random.SeedSequence([int(p) & 0xFFFFFFFF for p in parts])
    return int(state.generate_state(1)[0])
