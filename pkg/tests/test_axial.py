import numpy as np
import pytest

from magnls.axial import PotentialSpec, build_axial_grid, propagate_axial


def test_grid_validation():
    with pytest.raises(ValueError, match="power of two"):
        build_axial_grid(16.0, 48)
    with pytest.raises(ValueError, match="power of two"):
        build_axial_grid(16.0, 4)
    with pytest.raises(ValueError, match="positive"):
        build_axial_grid(-1.0, 64)


def test_tabulated_potential_validation():
    z = build_axial_grid(16.0, 64).points
    good = PotentialSpec("tabulated", samples=np.cos(z))
    grid = build_axial_grid(16.0, 64, good)
    assert np.abs(grid.potential_values - np.cos(z)).max() == 0.0
    with pytest.raises(ValueError, match="samples"):
        build_axial_grid(16.0, 64, PotentialSpec("tabulated", samples=np.ones(32)))
    bad = np.cos(z)
    bad[3] = np.inf
    with pytest.raises(ValueError, match="non-finite"):
        build_axial_grid(16.0, 64, PotentialSpec("tabulated", samples=bad))


def test_zero_potential_samples():
    grid = build_axial_grid(16.0, 64)
    assert np.all(grid.potential_values == 0.0)


def test_harmonic_potential_matches_closed_form():
    grid = build_axial_grid(16.0, 64, PotentialSpec("harmonic", kappa=1.0))
    assert np.abs(grid.potential_values - 0.5 * grid.points ** 2).max() < 1e-14


def test_cosine_potential_bounded():
    grid = build_axial_grid(16.0, 64, PotentialSpec("cosine", kappa=1.0, amplitude=1.0))
    assert grid.potential_values.max() <= 1.0 + 1e-14
    assert np.abs(grid.potential_values - np.cos(grid.points)).max() < 1e-14


def test_wavenumbers_symmetric():
    grid = build_axial_grid(16.0, 64)
    k = grid.wavenumbers
    nyquist = np.abs(k).max()
    others = k[np.abs(np.abs(k) - nyquist) > 1e-12]
    # every non-Nyquist wavenumber is paired with its negative
    assert np.abs(np.sort(others) + np.sort(others)[::-1]).max() < 1e-12
    # Nyquist is cosine-only: no first-derivative contribution
    assert grid.deriv_multipliers[32] == 0.0


def test_free_propagation_single_mode_exact_phase():
    grid = build_axial_grid(16.0, 64)
    k = grid.wavenumbers[5]
    v = np.exp(1j * k * grid.points)
    tau = 0.37
    for substeps in (1, 3):
        out = propagate_axial(grid, v, tau, substeps)
        expected = np.exp(-1j * tau * k ** 2 / 2.0) * v
        assert np.abs(out - expected).max() < 1e-12


def test_propagation_preserves_mass():
    grid = build_axial_grid(16.0, 64, PotentialSpec("cosine", kappa=2.0, amplitude=0.7))
    rng = np.random.default_rng(0)
    v = rng.normal(size=64) + 1j * rng.normal(size=64)
    out = propagate_axial(grid, v, 0.9, 4)
    assert abs(np.linalg.norm(out) - np.linalg.norm(v)) < 1e-14


def test_strang_self_convergence_order_two():
    grid = build_axial_grid(16.0, 64, PotentialSpec("harmonic", kappa=1.0))
    v = np.exp(-grid.points ** 2 / 2.0).astype(complex)
    tau = 0.1
    ref = propagate_axial(grid, v, tau, 256)
    errs = []
    for m in (4, 8):
        errs.append(np.linalg.norm(propagate_axial(grid, v, tau, m) - ref))
    order = np.log2(errs[0] / errs[1])
    assert 1.8 <= order <= 2.2


def test_time_reversibility():
    grid = build_axial_grid(16.0, 64, PotentialSpec("harmonic", kappa=1.0))
    rng = np.random.default_rng(1)
    v = (rng.normal(size=64) + 1j * rng.normal(size=64)) * np.exp(-grid.points ** 2 / 4)
    back = propagate_axial(grid, propagate_axial(grid, v, 0.31, 5), -0.31, 5)
    assert np.abs(back - v).max() < 1e-10


def test_substep_validation():
    grid = build_axial_grid(16.0, 64)
    with pytest.raises(ValueError, match="substeps"):
        propagate_axial(grid, np.zeros(64, complex), 0.1, 0)
