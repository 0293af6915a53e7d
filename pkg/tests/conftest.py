"""Shared fixtures: cached solves reused across test modules."""
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the quadrature oracle

from londebye.debye_core import LondonConfig, solve_scattering
from londebye.fields import ReferenceSources, boundary_data_from_reference
from londebye.sphgrid import SphereGrid
from londebye.verify import current_free_solution


@pytest.fixture(scope="session")
def src40():
    return ReferenceSources.default(1.0)


@pytest.fixture(scope="session")
def sol40(src40):
    """Benchmark two-point-source solve at lambda=1, n_max=40."""
    cfg = LondonConfig(lambda_L=1.0, n_max=40)
    grid = SphereGrid(40)
    B_in, J_in_n = boundary_data_from_reference(src40, grid)
    return solve_scattering(cfg, grid, B_in, J_in_n)


@pytest.fixture(scope="session")
def grid40():
    return SphereGrid(40)


@pytest.fixture(scope="session")
def driven_sol24():
    """Externally driven current-free solve (J- . n = 0 on the boundary)."""
    return current_free_solution(1.0, 24)


@pytest.fixture(scope="session")
def zero_sol24():
    cfg = LondonConfig(lambda_L=1.0, n_max=24)
    grid = SphereGrid(24)
    return solve_scattering(
        cfg,
        grid,
        np.zeros((grid.n_theta, grid.n_phi, 3)),
        np.zeros((grid.n_theta, grid.n_phi)),
    )
