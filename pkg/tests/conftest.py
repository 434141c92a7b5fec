import numpy as np
import pytest

from magnls.axial import PotentialSpec, build_axial_grid
from magnls.field import field_from_modes
from magnls.hermite import build_hermite_basis, build_joint_eigenstructure


@pytest.fixture(scope="session")
def joint8():
    return build_joint_eigenstructure(build_hermite_basis(8, 18))


@pytest.fixture(scope="session")
def joint6():
    return build_joint_eigenstructure(build_hermite_basis(6, 14))


@pytest.fixture(scope="session")
def grid16():
    return build_axial_grid(16.0, 32)


@pytest.fixture(scope="session")
def grid_harmonic():
    return build_axial_grid(16.0, 64, PotentialSpec("harmonic", kappa=1.0))


def random_field(joint, grid, seed=0, decay_power=0.0, amplitude=1.0):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(joint.n_modes, grid.point_count)) + 1j * rng.normal(
        size=(joint.n_modes, grid.point_count)
    )
    if decay_power:
        c *= (1.0 + joint.level_index[:, None]) ** -decay_power
    c *= amplitude / np.sqrt((np.abs(c) ** 2).sum())
    return field_from_modes(joint, grid, c)
