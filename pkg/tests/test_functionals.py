import numpy as np
import pytest

from conftest import random_field
from magnls.axial import PotentialSpec, build_axial_grid
from magnls.field import apply_axial, apply_propagator, field_from_modes, mode_data, z_coeffs_from_values
from magnls.functionals import (
    ObservableSeries,
    a_functional,
    angular_momentum,
    e0_eps,
    energy_eps,
    energy_limit,
    mass,
    scale_field,
)
from magnls.hermite import build_hermite_basis, build_joint_eigenstructure
from magnls.initial_data import gaussian_data


def test_mass_examples(joint8, grid16):
    u = random_field(joint8, grid16, seed=50)
    assert abs(mass(u) - 1.0) < 1e-12
    assert abs(mass(u.with_data(2.0 * u.data)) - 4.0) < 1e-12
    for gen in ("H", "H0", "L"):
        assert abs(mass(apply_propagator(u, 0.9, gen)) - 1.0) < 1e-12
    assert abs(mass(apply_axial(u, 0.4)) - 1.0) < 1e-12


def test_angular_momentum_examples(joint8, grid16):
    ground = gaussian_data(joint8, grid16)
    assert abs(angular_momentum(ground)) < 1e-14
    # populate the single joint mode with angular eigenvalue +1/2 (degree 1)
    d1 = np.where(joint8.basis.degrees == 1)[0]
    col = d1[np.argmax(joint8.l_eigenvalues[d1])]
    prof = np.zeros(grid16.point_count, complex)
    prof[0] = 1.0
    cj = np.zeros((joint8.n_modes, grid16.point_count), complex)
    cj[col] = prof
    c = joint8.block_unitary @ cj
    u = field_from_modes(joint8, grid16, c / np.sqrt(mass(field_from_modes(joint8, grid16, c))))
    assert abs(angular_momentum(u) - 0.5) < 1e-12
    rotated = apply_propagator(u, 1.3, "H")
    assert abs(angular_momentum(rotated) - 0.5) < 1e-12


def test_a_functional_examples(joint8, grid_harmonic):
    ground = gaussian_data(joint8, grid_harmonic)
    assert abs(a_functional(ground) - 0.5) < 1e-12
    rot = apply_propagator(ground, 2.1, "H")
    assert abs(a_functional(rot) - 0.5) < 1e-12
    moved = apply_axial(ground, 0.7, 2)
    assert abs(a_functional(moved) - 0.5) < 1e-12


def test_energy_identity_e0_vs_energy_and_angular(joint8, grid_harmonic):
    u = random_field(joint8, grid_harmonic, seed=51, decay_power=1.0)
    eps, lam, sigma = 0.3, 1, 2
    lhs = e0_eps(u, eps, lam, sigma)
    rhs = 2.0 * energy_eps(u, eps, lam, sigma) - angular_momentum(u) / eps ** 2
    assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))


def test_zero_field_energies(joint8, grid_harmonic):
    zero = field_from_modes(
        joint8, grid_harmonic, np.zeros((joint8.n_modes, grid_harmonic.point_count), complex)
    )
    assert energy_eps(zero, 0.1, 1, 1) == 0.0
    assert e0_eps(zero, 0.1, 1, 1) == 0.0
    assert energy_limit(zero, 1, 1).total == 0.0


def test_energy_limit_parts(joint8, grid16, grid_harmonic):
    u = random_field(joint8, grid16, seed=52, decay_power=1.0)
    e = energy_limit(u, lam=1, sigma=1)
    assert e.b2 == 0.0  # V = 0
    linear_only = energy_limit(u, lam=0, sigma=1)
    assert abs(linear_only.total - (linear_only.b1 + linear_only.b2)) < 1e-14
    uh = random_field(joint8, grid_harmonic, seed=52, decay_power=1.0)
    eh = energy_limit(uh, lam=1, sigma=1)
    assert eh.b2 > 0.0


def test_scale_field_identity_and_validation(joint8):
    grid = build_axial_grid(32.0, 256)
    u = gaussian_data(joint8, grid)
    same = scale_field(u, 1.0)
    assert np.abs(mode_data(same) - mode_data(u)).max() < 1e-12
    with pytest.raises(ValueError, match="positive"):
        scale_field(u, -2.0)
    with pytest.raises(ValueError, match="power of two"):
        scale_field(u, 3.0)
    wide = scale_field(u, 2.0)  # fine: support shrinks
    assert mass(wide) > 0
    with pytest.raises(ValueError, match="support"):
        scale_field(u, 0.125)  # spreads the Gaussian to the domain edge


def test_scale_field_a_and_e_scalings(joint8):
    grid = build_axial_grid(32.0, 256)
    u = gaussian_data(joint8, grid, amplitude=0.8)
    a0 = a_functional(u)
    e0 = energy_limit(u, lam=1, sigma=4).total
    for mu in (2.0, 4.0):
        s = scale_field(u, mu)
        a1 = a_functional(s)
        e1 = energy_limit(s, lam=1, sigma=4).total
        assert abs(a1 - a0 * mu ** -0.5) < 1e-8 * abs(a0)
        assert abs(e1 - e0 * mu ** 1.5) < 1e-8 * abs(e0) * mu ** 1.5
        a3e0 = a0 ** 3 * e0
        a3e1 = a1 ** 3 * e1
        assert abs(a3e1 - a3e0) < 1e-8 * abs(a3e0)


def test_scale_field_arbitrary_mu_flag(joint8):
    grid = build_axial_grid(32.0, 256)
    u = gaussian_data(joint8, grid)
    s = scale_field(u, 1.5, allow_any_mu=True)
    assert abs(a_functional(s) - a_functional(u) * 1.5 ** -0.5) < 1e-8


def test_observable_series_validation():
    s = ObservableSeries(model="limit_nls", columns=("time", "mass"))
    s.append((0.0, 1.0))
    with pytest.raises(ValueError, match="strictly increasing"):
        s.append((0.0, 1.0))
    with pytest.raises(ValueError, match="width"):
        s.append((1.0,))
    with pytest.raises(ValueError, match="finite"):
        s.append((1.0, np.inf))
    s.append((1.0, 2.0))
    assert np.allclose(s.column("mass"), [1.0, 2.0])
