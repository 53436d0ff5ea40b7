import math

import numpy as np
import pytest

from needleperc.formulas import MarkLaw, ThreeStateParams


def rng_of(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, 0]))


def random_three_state(rng: np.random.Generator) -> ThreeStateParams:
    alpha = float(rng.uniform(0.25, 1.3))
    beta = float(rng.uniform(alpha + 0.25, 2.85))
    radii = rng.uniform(0.2, 1.6, 3)
    probs = rng.dirichlet([1.0, 1.0, 1.0])
    return ThreeStateParams(alpha, beta, *map(float, radii), *map(float, probs))


@pytest.fixture
def cross_marks() -> MarkLaw:
    """Two perpendicular unit-length orientations with equal weight."""
    return MarkLaw((0.0, math.pi / 2), (0.5, 0.5), (0.5, 0.5))
