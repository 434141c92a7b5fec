import numpy as np
import pytest

from conftest import random_field
from magnls.axial import PotentialSpec, build_axial_grid
from magnls.evolve import (
    BlowupError,
    SimConfig,
    _LimitStepper,
    evolve,
    filtered_gap,
    make_discretization,
    step_eps,
    step_limit,
)
from magnls.field import (
    apply_axial,
    apply_propagator,
    field_from_modes,
    mode_data,
    synthesize,
    z_coeffs_from_values,
    z_values_from_coeffs,
)
from magnls.functionals import mass
from magnls.hermite import build_hermite_basis, build_joint_eigenstructure, project_eigenlevel
from magnls.initial_data import gauss_zmod_data, gaussian_data


def test_config_validation():
    with pytest.raises(ValueError, match="epsilon"):
        SimConfig(model="eps_nls")
    with pytest.raises(ValueError, match="sigma"):
        SimConfig(sigma=5)
    with pytest.raises(ValueError, match="lambda"):
        SimConfig(lam=2)
    with pytest.raises(ValueError, match="exceeds"):
        SimConfig(dt=2.0, t_final=1.0)
    with pytest.raises(ValueError, match="model"):
        SimConfig(model="other")
    cfg = SimConfig(model="eps_nls", eps=0.1)
    assert cfg.dt == pytest.approx(5e-4)
    assert not cfg.stiff_warning
    warned = SimConfig(model="eps_nls", eps=0.1, dt=5e-3, t_final=1.0)
    assert warned.stiff_warning


def test_zero_field_fixed_points():
    cfg_e = SimConfig(
        model="eps_nls", eps=0.2, sigma=1, dt=1e-3, t_final=1.0,
        cutoff_degree=3, n_z=16, l_z=16.0,
    )
    joint, grid = make_discretization(cfg_e)
    zero = field_from_modes(joint, grid, np.zeros((joint.n_modes, 16), complex))
    out = step_eps(synthesize(zero), cfg_e)
    assert np.abs(out.data).max() == 0.0
    cfg_l = SimConfig(model="limit_nls", sigma=2, dt=1e-3, t_final=1.0,
                      cutoff_degree=3, n_z=16, l_z=16.0)
    out = step_limit(zero, cfg_l)
    assert np.abs(out.data).max() == 0.0


def test_linear_only_step_matches_exact_propagator():
    # V = 0 so the axial substep is exactly diagonal in Fourier space
    cfg = SimConfig(
        model="eps_nls", eps=0.15, sigma=1, dt=2e-3, t_final=1.0,
        cutoff_degree=4, n_z=32, l_z=16.0, nonlinearity_enabled=False,
    )
    joint, grid = make_discretization(cfg)
    u = random_field(joint, grid, seed=60, decay_power=1.0)
    stepped = step_eps(synthesize(u), cfg)
    exact = apply_axial(apply_propagator(u, cfg.dt / cfg.eps ** 2, "H"), cfg.dt)
    assert np.abs(mode_data(stepped) - mode_data(exact)).max() < 1e-12
    assert stepped.time == pytest.approx(cfg.dt)


def test_eps_grid_mass_conservation_short():
    cfg = SimConfig(
        model="eps_nls", eps=0.1, sigma=1, dt=5e-4, t_final=1.0,
        cutoff_degree=6, node_count=16, n_z=32, l_z=16.0,
        potential=PotentialSpec("harmonic", kappa=1.0),
        data_name="gauss_zmod", amplitude=1.0,
    )
    joint, grid = make_discretization(cfg)
    u0 = gauss_zmod_data(joint, grid, amplitude=1.0, zmod_k=2.0)
    from magnls.evolve import _EpsStepper

    stepper = _EpsStepper(joint, grid, cfg)
    v = synthesize(u0).data
    w = joint.basis.grid_weights
    m0 = (w[:, None] * np.abs(v) ** 2).sum() * grid.spacing
    v = stepper.run_segment(v, 200)
    m1 = (w[:, None] * np.abs(v) ** 2).sum() * grid.spacing
    assert abs(m1 - m0) / m0 < 1e-12


def test_limit_single_level_closure():
    cfg = SimConfig(
        model="limit_nls", sigma=1, dt=5e-3, t_final=1.0,
        cutoff_degree=4, node_count=12, n_z=16, l_z=16.0,
    )
    joint, grid = make_discretization(cfg)
    u = random_field(joint, grid, seed=61)
    n = 2
    data = project_eigenlevel(joint, u.data, n)
    data = data / np.sqrt((np.abs(data) ** 2).sum())
    state = field_from_modes(joint, grid, data)
    for _ in range(5):
        state = step_limit(state, cfg)
    spill = state.data - project_eigenlevel(joint, state.data, n)
    assert np.abs(spill).max() < 1e-12


def test_inner_rk4_self_convergence_order_four():
    cfg = SimConfig(model="limit_nls", sigma=1, dt=0.05, t_final=1.0,
                    cutoff_degree=4, node_count=12, n_z=8, l_z=16.0)
    joint, grid = make_discretization(cfg)
    u = random_field(joint, grid, seed=62, amplitude=1.5)
    cz0 = z_values_from_coeffs(grid, u.data)

    def integrate(dt, t_total=0.2):
        c = cz0.copy()
        run = SimConfig(model="limit_nls", sigma=1, dt=dt, t_final=1.0,
                        cutoff_degree=4, node_count=12, n_z=8, l_z=16.0)
        st = _LimitStepper(joint, grid, run)
        for i in range(int(round(t_total / dt))):
            c = st.nonlinear_rk4(c, i * dt)
        return c

    ref = integrate(0.2 / 64)
    errs = [np.abs(integrate(dt) - ref).max() for dt in (0.02, 0.01)]
    order = np.log2(errs[0] / errs[1])
    assert 3.5 <= order <= 4.5


def test_blowup_guard_trips_and_reports():
    cfg = SimConfig(
        model="limit_nls", sigma=1, lam=-1, dt=0.1, t_final=2.0,
        cutoff_degree=3, node_count=10, n_z=16, l_z=16.0,
        data_name="g1", amplitude=12.0,
    )
    res = evolve(cfg)
    assert res.aborted
    assert "guard" in res.abort_message
    assert len(res.series.rows) >= 1


def test_evolve_t_final_zero_returns_initial():
    cfg = SimConfig(model="limit_nls", sigma=1, dt=1e-3, t_final=0.0,
                    cutoff_degree=3, n_z=16, l_z=16.0)
    res = evolve(cfg)
    assert len(res.series.rows) == 1
    assert res.final.time == 0.0


def test_evolve_deterministic():
    cfg = SimConfig(model="limit_nls", sigma=2, dt=2e-2, t_final=0.2,
                    cutoff_degree=3, node_count=10, n_z=16, l_z=16.0,
                    data_name="g3", seed=5, amplitude=0.8)
    a = evolve(cfg)
    b = evolve(cfg)
    assert a.series.rows == b.series.rows
    assert np.array_equal(mode_data(a.final), mode_data(b.final))


def test_filtered_gap_examples():
    cfg = SimConfig(model="limit_nls", sigma=1, dt=1e-3, t_final=1.0,
                    cutoff_degree=4, n_z=16, l_z=16.0)
    joint, grid = make_discretization(cfg)
    u = random_field(joint, grid, seed=63)
    g2, gs = filtered_gap(u, u, eps=0.1)
    assert g2 == 0.0 and gs == 0.0
    t, eps = 0.37, 0.2
    phi = u.with_data(u.data.copy())
    phi = field_from_modes(joint, grid, u.data, time=t)
    psi = field_from_modes(
        joint, grid,
        apply_propagator(phi, t / eps ** 2, "H").data,
        time=t,
    )
    g2, gs = filtered_gap(psi, phi, eps)
    assert g2 < 1e-10 and gs < 1e-9


def test_filtered_gap_mismatch_errors():
    cfg = SimConfig(model="limit_nls", sigma=1, dt=1e-3, t_final=1.0,
                    cutoff_degree=4, n_z=16, l_z=16.0)
    joint, grid = make_discretization(cfg)
    other_grid = build_axial_grid(16.0, 32)
    u = random_field(joint, grid, seed=64)
    w = random_field(joint, other_grid, seed=64)
    with pytest.raises(ValueError, match="axial"):
        filtered_gap(u, w, 0.1)
    late = field_from_modes(joint, grid, u.data, time=1.0)
    with pytest.raises(ValueError, match="times"):
        filtered_gap(u, late, 0.1)
