import numpy as np
import pytest

from eulerpoincare import harmonic as hm


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def small_solution():
    """A converged 6x6 SO(3) harmonic map."""
    problem = hm.preset_problem("random-smooth", 3, 6, 6, seed=3)
    return hm.solve(problem, tol=1e-12)


@pytest.fixture(scope="session")
def so2_solution():
    return hm.solve(hm.preset_problem("twist", 2, 7, 6), tol=1e-12)
