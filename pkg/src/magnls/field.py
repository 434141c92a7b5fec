"""Tensor-product spectral fields: (Hermite modes) x (axial Fourier grid).

A field lives either in mode space, indexed by (Cartesian Hermite mode,
Fourier wavenumber), or in collocation space, indexed by (flattened x-node,
z-node).  Both bases are orthonormal, so the squared L2 norm is the plain
coefficient sum in mode space and the weighted grid sum in collocation space,
and the two transforms are exactly inverse to each other.
"""

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .hermite import JointEigenStructure, apply_oscillator_propagator
from .axial import AxialGrid, propagate_axial

MODE_REP = "modes"
GRID_REP = "grid"

NORM_KINDS = ("L2", "Sigma1", "Sigma2", "Lx2Sigmaz1", "Lz2Sigmax1", "Sigma01")


@dataclass(frozen=True)
class SpectralField:
    """Immutable complex field with its discretization references.

    data has shape (n_modes, N_z) in mode space or (node_count**2, N_z) in
    collocation space.
    """

    joint: JointEigenStructure
    grid: AxialGrid
    data: np.ndarray
    rep: str = MODE_REP
    time: float = 0.0

    @property
    def basis(self):
        return self.joint.basis

    def with_data(self, data, rep=None):
        return replace(self, data=data, rep=self.rep if rep is None else rep)


def _fourier_signs(n):
    # exp(-i k_m L/2) = (-1)^m for integer wavenumber index m
    m = np.rint(np.fft.fftfreq(n) * n).astype(int)
    return np.where(m % 2 == 0, 1.0, -1.0)


def z_values_from_coeffs(grid, coeffs):
    """Inverse unitary transform: Fourier coefficients -> samples, last axis."""
    s = _fourier_signs(grid.point_count)
    scale = grid.point_count / np.sqrt(grid.domain_length)
    return np.fft.ifft(coeffs * s, axis=-1) * scale


def z_coeffs_from_values(grid, values):
    """Forward unitary transform: samples -> coefficients of e^{ikz}/sqrt(Lz)."""
    s = _fourier_signs(grid.point_count)
    scale = np.sqrt(grid.domain_length) / grid.point_count
    return np.fft.fft(values, axis=-1) * s * scale


def field_from_modes(joint, grid, coeffs, time=0.0):
    coeffs = np.ascontiguousarray(coeffs, dtype=complex)
    if coeffs.shape != (joint.n_modes, grid.point_count):
        raise ValueError(
            f"mode data shape {coeffs.shape} != {(joint.n_modes, grid.point_count)}"
        )
    return SpectralField(joint=joint, grid=grid, data=coeffs, rep=MODE_REP, time=time)


def field_from_values(joint, grid, values, time=0.0):
    values = np.ascontiguousarray(values, dtype=complex)
    expect = (joint.basis.n_grid, grid.point_count)
    if values.shape != expect:
        raise ValueError(f"grid data shape {values.shape} != {expect}")
    return SpectralField(joint=joint, grid=grid, data=values, rep=GRID_REP, time=time)


def synthesize(field):
    """Mode space -> collocation values."""
    if field.rep == GRID_REP:
        return field
    vals = field.basis.sample_matrix @ z_values_from_coeffs(field.grid, field.data)
    return field.with_data(vals, GRID_REP)


def analyze(field):
    """Collocation values -> mode space (quadrature projection onto the basis)."""
    if field.rep == MODE_REP:
        return field
    coeffs = z_coeffs_from_values(field.grid, field.basis.analysis_matrix @ field.data)
    return field.with_data(coeffs, MODE_REP)


def mode_data(field):
    return analyze(field).data


def grid_data(field):
    return synthesize(field).data


def l2_norm(field):
    if field.rep == MODE_REP:
        return float(np.sqrt((np.abs(field.data) ** 2).sum()))
    W = field.basis.grid_weights
    hz = field.grid.spacing
    return float(np.sqrt((W[:, None] * np.abs(field.data) ** 2).sum() * hz))


def apply_propagator(field, theta, generator="H"):
    """e^{-i theta G} for G in {H, H0, L}; mode-space diagonal in the joint frame."""
    c = mode_data(field)
    out = apply_oscillator_propagator(field.joint, c, theta, generator)
    return replace(field, data=out, rep=MODE_REP)


def apply_axial(field, tau, substeps=1):
    c = mode_data(field)
    vals = z_values_from_coeffs(field.grid, c)
    vals = propagate_axial(field.grid, vals, tau, substeps)
    return replace(field, data=z_coeffs_from_values(field.grid, vals), rep=MODE_REP)


def nonlinear_phase(field, lam, sigma, dt):
    """Exact pointwise flow of i u_t = lam |u|^{2 sigma} u over dt.

    Requires collocation representation; |u| is unchanged node by node.
    """
    if field.rep != GRID_REP:
        raise ValueError("nonlinear_phase requires the collocation representation")
    v = field.data
    out = v * np.exp(-1j * dt * lam * np.abs(v) ** (2 * sigma))
    return field.with_data(out, GRID_REP)


@lru_cache(maxsize=8)
def _x_derivative_maps(cutoff):
    """Matrices taking triangle-{<=cutoff} coefficients to the coefficients of
    d/dx1 and d/dx2 on the triangle {<=cutoff+1}; exact ladder relations."""
    modes = [(k1, d - k1) for d in range(cutoff + 1) for k1 in range(d + 1)]
    modes_up = [(k1, d - k1) for d in range(cutoff + 2) for k1 in range(d + 1)]
    index_up = {m: i for i, m in enumerate(modes_up)}
    D1 = np.zeros((len(modes_up), len(modes)))
    D2 = np.zeros((len(modes_up), len(modes)))
    for j, (k1, k2) in enumerate(modes):
        if k1 > 0:
            D1[index_up[(k1 - 1, k2)], j] += 0.5 * np.sqrt(k1)
        D1[index_up[(k1 + 1, k2)], j] -= 0.5 * np.sqrt(k1 + 1.0)
        if k2 > 0:
            D2[index_up[(k1, k2 - 1)], j] += 0.5 * np.sqrt(k2)
        D2[index_up[(k1, k2 + 1)], j] -= 0.5 * np.sqrt(k2 + 1.0)
    return D1, D2


def _x_gradient_sq(field):
    """||grad_x u||^2 via exact spectral ladder raising (includes overflow modes)."""
    c = mode_data(field)
    D1, D2 = _x_derivative_maps(field.basis.cutoff_degree)
    return float((np.abs(D1 @ c) ** 2).sum() + (np.abs(D2 @ c) ** 2).sum())


def _x_second_derivative_sq(field):
    c = mode_data(field)
    cut = field.basis.cutoff_degree
    D1, D2 = _x_derivative_maps(cut)
    E1, E2 = _x_derivative_maps(cut + 1)
    return (
        float((np.abs(E1 @ (D1 @ c)) ** 2).sum()),
        float((np.abs(E2 @ (D2 @ c)) ** 2).sum()),
    )


def _z_derivative_sq(field, order=1):
    c = mode_data(field)
    k = field.grid.wavenumbers
    if order == 1:
        mult = np.abs(field.grid.deriv_multipliers) ** 2
    else:
        mult = k ** 4
    return float(((np.abs(c) ** 2) * mult[None, :]).sum())


def _weight_moments(field, x_power=0, z_power=0):
    """int |x|^{2 x_power} z^{2 z_power} |u|^2 by collocation quadrature
    (sawtooth z), transforming only the axes that carry a weight."""
    basis = field.basis
    hz = field.grid.spacing
    if x_power and z_power:
        v = grid_data(field)
        wx = (basis.grid_x1 ** 2 + basis.grid_x2 ** 2) ** x_power
        wz = field.grid.points ** (2 * z_power)
        return float(
            ((basis.grid_weights * wx)[:, None] * (np.abs(v) ** 2) * wz[None, :]).sum() * hz
        )
    if x_power:
        c = mode_data(field)
        vx = basis.sample_matrix @ c      # x collocation, z Fourier: z axis unitary
        wx = (basis.grid_x1 ** 2 + basis.grid_x2 ** 2) ** x_power
        return float(((basis.grid_weights * wx)[:, None] * np.abs(vx) ** 2).sum())
    if z_power:
        c = mode_data(field)
        vz = z_values_from_coeffs(field.grid, c)  # x modes, z collocation
        wz = field.grid.points ** (2 * z_power)
        return float(((np.abs(vz) ** 2) * wz[None, :]).sum() * hz)
    return float(l2_norm(field) ** 2)


def norm(field, which="L2"):
    """Discrete analogue of the weighted Sobolev norms used by the models.

    Derivatives are evaluated spectrally (exact ladder in x, Fourier in z);
    coordinate weights by collocation quadrature.
    """
    if which == "L2":
        return l2_norm(field)
    if which == "Sigma1":
        sq = (
            _x_gradient_sq(field)
            + _z_derivative_sq(field)
            + _weight_moments(field, x_power=1)
            + _weight_moments(field, z_power=1)
        )
    elif which == "Sigma2":
        d11, d22 = _x_second_derivative_sq(field)
        sq = (
            d11
            + d22
            + _z_derivative_sq(field, order=2)
            + _weight_moments(field, x_power=2)
            + 2.0 * _weight_moments(field, x_power=1, z_power=1)
            + _weight_moments(field, z_power=2)
        )
    elif which == "Lx2Sigmaz1":
        sq = _z_derivative_sq(field) + _weight_moments(field, z_power=1)
    elif which == "Lz2Sigmax1":
        sq = _x_gradient_sq(field) + _weight_moments(field, x_power=1)
    elif which == "Sigma01":
        sq = (
            _x_gradient_sq(field)
            + _z_derivative_sq(field)
            + _weight_moments(field, x_power=1)
        )
    else:
        raise ValueError(f"unknown norm {which!r}, expected one of {NORM_KINDS}")
    return float(np.sqrt(sq))


def boundary_mass_fraction(field, edge_fraction=0.25):
    """Mass fraction carried by the outer `edge_fraction` of the z-domain."""
    c = mode_data(field)
    vz = z_values_from_coeffs(field.grid, c)
    z = field.grid.points
    hz = field.grid.spacing
    outer = np.abs(z) >= (0.5 - 0.5 * edge_fraction) * field.grid.domain_length
    total = (np.abs(vz) ** 2).sum() * hz
    if total == 0.0:
        return 0.0
    return float((np.abs(vz[:, outer]) ** 2).sum() * hz / total)


def edge_amplitude(field):
    """Largest |u| on the two outermost z-planes (domain-truncation check)."""
    v = grid_data(field)
    return float(max(np.abs(v[:, 0]).max(), np.abs(v[:, -1]).max()))
