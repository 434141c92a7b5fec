"""Canned initial data for the experiment suite.

g1: Gaussian ground state in x times a unit-width z Gaussian (smooth limit).
g2: equal mix of the three lowest Cartesian modes in x, Gaussian in z.
g3: seeded random mode coefficients with (1+n)^-3 (1+|kz|)^-3 decay and a
    Gaussian z envelope, the rough initial-data regime.
gauss_zmod: mostly the x ground state with a small circular degree-1
    admixture and a cosine-modulated z profile; the angular content and the
    short z wavelength make the split-step conservation drifts visible.

All profiles are normalized to unit L2 mass and then scaled by `amplitude`;
construction rejects profiles that fail to decay at the z boundary.
"""

import numpy as np

from .field import SpectralField, edge_amplitude, field_from_modes, grid_data, z_coeffs_from_values

DATA_NAMES = ("g1", "g2", "g3", "gauss_zmod")
EDGE_DECAY_TOL = 1e-10


def _z_gaussian(grid, width=1.0):
    return np.exp(-grid.points ** 2 / (2.0 * width ** 2))


def _normalized(joint, grid, coeffs, amplitude, time=0.0):
    total = np.sqrt((np.abs(coeffs) ** 2).sum())
    if total == 0:
        raise ValueError("initial data is identically zero")
    fld = field_from_modes(joint, grid, coeffs * (amplitude / total), time=time)
    v = np.abs(grid_data(fld))
    peak = v.max()
    edge = edge_amplitude(fld)
    if peak > 0 and edge / peak > EDGE_DECAY_TOL:
        raise ValueError(
            f"initial data does not decay at the z boundary "
            f"(edge/peak = {edge / peak:.2e} > {EDGE_DECAY_TOL:.0e}); enlarge l_z"
        )
    return fld


def _mode_profile(joint, grid, weights, z_profile):
    """Coefficients from {(k1,k2): weight} and a z sample profile."""
    basis = joint.basis
    prof = z_coeffs_from_values(grid, np.asarray(z_profile, dtype=complex))
    c = np.zeros((joint.n_modes, grid.point_count), dtype=complex)
    for mode, w in weights.items():
        c[basis.mode_index[mode]] = w * prof
    return c


def gaussian_data(joint, grid, amplitude=1.0):
    c = _mode_profile(joint, grid, {(0, 0): 1.0}, _z_gaussian(grid))
    return _normalized(joint, grid, c, amplitude)


def mixed_level_data(joint, grid, amplitude=1.0):
    weights = {(0, 0): 1.0}
    if joint.basis.cutoff_degree >= 1:
        weights[(1, 0)] = 1.0
        weights[(0, 1)] = 1.0
    c = _mode_profile(joint, grid, weights, _z_gaussian(grid))
    return _normalized(joint, grid, c, amplitude)


def random_decay_data(joint, grid, amplitude=1.0, seed=1234):
    rng = np.random.default_rng(seed)
    n_modes = joint.n_modes
    nz = grid.point_count
    c = rng.normal(size=(n_modes, nz)) + 1j * rng.normal(size=(n_modes, nz))
    m = np.rint(np.fft.fftfreq(nz) * nz).astype(int)
    c *= (1.0 + joint.level_index[:, None]) ** -3.0
    c *= (1.0 + np.abs(m)[None, :]) ** -3.0
    # localize in z: envelope applied in collocation, then re-expanded
    from .field import z_values_from_coeffs

    vz = z_values_from_coeffs(grid, c) * _z_gaussian(grid)[None, :]
    c = z_coeffs_from_values(grid, vz)
    return _normalized(joint, grid, c, amplitude)


def gauss_zmod_data(joint, grid, amplitude=1.0, mix=0.25, zmod_k=5.5, zmod_wave=0.7):
    prof = _z_gaussian(grid) * (1.0 + zmod_wave * np.cos(zmod_k * grid.points))
    weights = {(0, 0): 1.0}
    if joint.basis.cutoff_degree >= 1 and mix != 0.0:
        weights[(1, 0)] = mix / np.sqrt(2.0)
        weights[(0, 1)] = 1j * mix / np.sqrt(2.0)
    c = _mode_profile(joint, grid, weights, prof)
    return _normalized(joint, grid, c, amplitude)


def build_initial_data(joint, grid, cfg):
    name = cfg.data_name
    params = dict(cfg.data_params)
    if name == "g1":
        return gaussian_data(joint, grid, cfg.amplitude)
    if name == "g2":
        return mixed_level_data(joint, grid, cfg.amplitude)
    if name == "g3":
        return random_decay_data(joint, grid, cfg.amplitude, seed=cfg.seed)
    if name == "gauss_zmod":
        return gauss_zmod_data(
            joint,
            grid,
            cfg.amplitude,
            mix=float(params.get("mix", 0.25)),
            zmod_k=float(params.get("zmod_k", 5.5)),
            zmod_wave=float(params.get("zmod_wave", 0.7)),
        )
    raise ValueError(f"unknown initial data {name!r}, expected one of {DATA_NAMES}")
