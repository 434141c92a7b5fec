import numpy as np
import pytest

from conftest import random_field
from magnls.averaging import (
    default_theta_count,
    eval_F,
    eval_Fav,
    eval_Fav_resonant,
    theta_count_threshold,
)
from magnls.axial import build_axial_grid
from magnls.field import analyze, field_from_modes, mode_data, nonlinear_phase, synthesize
from magnls.hermite import (
    apply_oscillator_propagator,
    build_hermite_basis,
    build_joint_eigenstructure,
    project_eigenlevel,
)


@pytest.fixture(scope="module")
def small_grid():
    return build_axial_grid(16.0, 8)


@pytest.fixture(scope="module")
def joint6n24():
    return build_joint_eigenstructure(build_hermite_basis(6, 24))


def test_theta_count_rules():
    assert theta_count_threshold(6, 1) == 19
    assert default_theta_count(6, 1) == 20
    assert default_theta_count(8, 1) == 26
    assert default_theta_count(0, 1) % 2 == 0


def test_f_at_theta_zero_is_projected_cubic(joint6n24, small_grid):
    u = random_field(joint6n24, small_grid, seed=20)
    direct = analyze(nonlinear_phase(synthesize(u), 1, 1, 0.0))  # layout helper only
    f0 = eval_F(u, 0.0, sigma=1)
    v = synthesize(u)
    cubic = v.with_data((np.abs(v.data) ** 2) * v.data, "grid")
    expected = analyze(cubic)
    assert np.abs(f0.data - expected.data).max() < 1e-14
    assert np.abs(direct.data - u.data).max() < 1e-14


def test_f_two_pi_periodic(joint6n24, small_grid):
    u = random_field(joint6n24, small_grid, seed=21)
    theta = 0.83
    a = eval_F(u, theta, sigma=1)
    b = eval_F(u, theta + 2.0 * np.pi, sigma=1)
    assert np.abs(a.data - b.data).max() < 1e-12


def test_f_gauge_covariance(joint6n24, small_grid):
    u = random_field(joint6n24, small_grid, seed=22)
    alpha = 1.17
    lhs = eval_F(u.with_data(np.exp(1j * alpha) * u.data), 0.6, sigma=2)
    rhs = eval_F(u, 0.6, sigma=2).data * np.exp(1j * alpha)
    assert np.abs(lhs.data - rhs).max() < 1e-12


def test_fav_zero_field(joint6n24, small_grid):
    zero = field_from_modes(
        joint6n24, small_grid, np.zeros((joint6n24.n_modes, 8), complex)
    )
    assert np.abs(eval_Fav(zero, sigma=1).data).max() == 0.0


def test_fav_theta_count_validation(joint6n24, small_grid):
    u = random_field(joint6n24, small_grid, seed=23)
    with pytest.raises(ValueError, match="threshold"):
        eval_Fav(u, sigma=1, n_theta=10)


def test_fav_doubling_invariance(joint6n24, small_grid):
    u = random_field(joint6n24, small_grid, seed=24)
    a = eval_Fav(u, sigma=1)
    b = eval_Fav(u, sigma=1, n_theta=2 * default_theta_count(6, 1))
    assert np.abs(a.data - b.data).max() < 1e-12


def test_fav_single_level_closure(joint6n24, small_grid):
    u = random_field(joint6n24, small_grid, seed=25)
    n = 3
    proj = u.with_data(project_eigenlevel(joint6n24, u.data, n))
    fav = eval_Fav(proj, sigma=1)
    expected = project_eigenlevel(joint6n24, eval_F(proj, 0.0, sigma=1).data, n)
    assert np.abs(fav.data - expected).max() < 1e-12


def test_fav_equivariance_under_h_flow(joint6n24, small_grid):
    u = random_field(joint6n24, small_grid, seed=26)
    tau = 2.41
    lhs = eval_Fav(
        u.with_data(apply_oscillator_propagator(joint6n24, u.data, tau, "H")), sigma=1
    )
    rhs = apply_oscillator_propagator(joint6n24, eval_Fav(u, sigma=1).data, tau, "H")
    assert np.abs(lhs.data - rhs).max() < 1e-12


def test_resonant_oracle_agreement(joint6n24, small_grid):
    worst = 0.0
    for seed in range(5):
        u = random_field(joint6n24, small_grid, seed=30 + seed)
        quad = eval_Fav(u, sigma=1)
        res = eval_Fav_resonant(u, sigma=1)
        worst = max(worst, np.abs(quad.data - res.data).max())
    assert worst < 1e-10


def test_resonant_oracle_zero_and_single_level(joint6n24, small_grid):
    zero = field_from_modes(joint6n24, small_grid, np.zeros((joint6n24.n_modes, 8), complex))
    assert np.abs(eval_Fav_resonant(zero, sigma=1).data).max() == 0.0
    u = random_field(joint6n24, small_grid, seed=40)
    n = 2
    proj = u.with_data(project_eigenlevel(joint6n24, u.data, n))
    res = eval_Fav_resonant(proj, sigma=1)
    # single-level support forces n1 = n2 = n3 = n4 = n
    v = synthesize(proj)
    cubic = analyze(v.with_data((np.abs(v.data) ** 2) * v.data, "grid"))
    expected = project_eigenlevel(joint6n24, cubic.data, n)
    assert np.abs(res.data - expected).max() < 1e-12


def test_resonant_oracle_rejections(joint6n24, small_grid):
    u = random_field(joint6n24, small_grid, seed=41)
    with pytest.raises(ValueError, match="sigma=1"):
        eval_Fav_resonant(u, sigma=2)
    big = build_joint_eigenstructure(build_hermite_basis(11, 13))
    ubig = random_field(big, small_grid, seed=42)
    with pytest.raises(ValueError, match="oracle bound"):
        eval_Fav_resonant(ubig, sigma=1)


def test_fav_mass_pairing_is_real(joint6n24, small_grid):
    u = random_field(joint6n24, small_grid, seed=43)
    fav = eval_Fav(u, sigma=1)
    assert abs(np.vdot(fav.data, u.data).imag) < 1e-12


def test_fav_oscillator_pairing_is_real(small_grid):
    # quadrature fine enough that the angular-term defect sits below 1e-10
    joint = build_joint_eigenstructure(build_hermite_basis(6, 40))
    u = random_field(joint, small_grid, seed=44, decay_power=3.0)
    fav = eval_Fav(u, sigma=1)
    h0u = joint.block_unitary @ (
        joint.h0_eigenvalues[:, None] * (joint.block_unitary.conj().T @ mode_data(u))
    )
    assert abs(np.vdot(h0u, fav.data).imag) < 1e-10


def test_cubic_angular_pairing_is_real(small_grid):
    joint = build_joint_eigenstructure(build_hermite_basis(6, 40))
    u = random_field(joint, small_grid, seed=45, decay_power=3.0)
    v = synthesize(u)
    cubic = analyze(v.with_data((np.abs(v.data) ** 2) * v.data, "grid"))
    lu = joint.block_unitary @ (
        joint.l_eigenvalues[:, None] * (joint.block_unitary.conj().T @ mode_data(u))
    )
    assert abs(np.vdot(lu, cubic.data).imag) < 1e-10
