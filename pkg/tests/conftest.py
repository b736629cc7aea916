import numpy as np
import pytest

from wignerstrip import Grid1D, PhaseGrid, box_eigenstate, hermite_state

HBAR = 1.0
BOX_L = 2.0


@pytest.fixture(scope="session")
def grid():
    """Library-grade grid; box walls at 0 and 2 land on nodes."""
    return Grid1D(-8.0, 8.0, 1024, HBAR)


@pytest.fixture(scope="session")
def pg(grid):
    return PhaseGrid.from_position_grid(grid)


@pytest.fixture(scope="session")
def fine_grid():
    """Finer grid for interpolation-rung comparisons (walls at 0, 2 on nodes)."""
    return Grid1D(-4.0, 4.0, 1024, HBAR)


@pytest.fixture(scope="session")
def fine_pg(fine_grid):
    return PhaseGrid.from_position_grid(fine_grid)


@pytest.fixture(scope="session")
def state_library(grid):
    """Six reference states: harmonic n=0..2 and box n=1..3 on [0, 2]."""
    lib = {f"harmonic{n}": hermite_state(n, grid) for n in range(3)}
    lib.update({f"box{n}": box_eigenstate(n, BOX_L, grid).psi for n in (1, 2, 3)})
    return lib
