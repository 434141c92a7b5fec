"""Conserved and monitored functionals of both models, and the z-scaling map.

The eps-model conserves mass, the angular pairing <L psi, psi> and the
Hamiltonian; their sign-controlled combination

    E0 = (1/eps^2)(||grad_x u||^2/2 + ||x u||^2/8) + ||d_z u||^2/2
         + int V |u|^2 + lam/(sigma+1) ||u||_{2s+2}^{2s+2}

equals 2 E - (1/eps^2) <L u, u> and is the quantity tracked here (the
defining display with a 1/2 prefactor is inconsistent with that expansion;
the expansion is what is conserved).  The limit model conserves mass, the
oscillator pairing A = <H0 u, u> and the averaged energy B1 + B2 + theta
average of the potential term.
"""

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .averaging import default_theta_count
from .field import (
    GRID_REP,
    _weight_moments,
    _x_gradient_sq,
    boundary_mass_fraction,
    field_from_modes,
    grid_data,
    mode_data,
    norm,
    z_coeffs_from_values,
)


def mass(field):
    """int |u|^2, by unitary coefficient norm."""
    c = mode_data(field)
    return float((np.abs(c) ** 2).sum())


def angular_momentum(field):
    """<L u, u> via joint-mode eigenvalues; real by construction."""
    joint = field.joint
    cj = joint.block_unitary.conj().T @ mode_data(field)
    return float(((np.abs(cj) ** 2) * joint.l_eigenvalues[:, None]).sum())


def a_functional(field):
    """<H0 u, u> = sum of (degree+1)/2 weighted coefficient masses."""
    c = mode_data(field)
    w = 0.5 * (field.basis.degrees + 1.0)
    return float(((np.abs(c) ** 2) * w[:, None]).sum())


def _axial_kinetic_sq(field):
    # quadratic form of the propagator's k^2 multiplier (Nyquist kept)
    c = mode_data(field)
    k2 = field.grid.wavenumbers ** 2
    return float(((np.abs(c) ** 2) * k2[None, :]).sum())


def _potential_term(field):
    joint = field.joint
    from .field import z_values_from_coeffs

    vz = z_values_from_coeffs(field.grid, mode_data(field))
    V = field.grid.potential_values
    return float(((np.abs(vz) ** 2) * V[None, :]).sum() * field.grid.spacing)


def _lebesgue_power(field, sigma):
    """||u||_{2 sigma + 2}^{2 sigma + 2} by full collocation quadrature."""
    v = grid_data(field)
    W = field.basis.grid_weights
    return float((W[:, None] * np.abs(v) ** (2 * sigma + 2)).sum() * field.grid.spacing)


def energy_eps(field, eps, lam, sigma):
    """Hamiltonian of the eps-model, term by term as displayed."""
    quad = (
        0.5 * _x_gradient_sq(field)
        + 0.125 * _weight_moments(field, x_power=1)
        + angular_momentum(field)
    )
    lin = quad / eps ** 2 + 0.5 * _axial_kinetic_sq(field) + _potential_term(field)
    return 0.5 * lin + lam / (2.0 * (sigma + 1)) * _lebesgue_power(field, sigma)


def e0_eps(field, eps, lam, sigma):
    """The conserved eps-model energy in expanded form (= 2 E - <L u,u>/eps^2)."""
    return (
        (0.5 * _x_gradient_sq(field) + 0.125 * _weight_moments(field, x_power=1)) / eps ** 2
        + 0.5 * _axial_kinetic_sq(field)
        + _potential_term(field)
        + lam / (sigma + 1.0) * _lebesgue_power(field, sigma)
    )


@dataclass(frozen=True)
class LimitEnergy:
    total: float
    b1: float
    b2: float
    nonlinear: float


def energy_limit(field, lam, sigma, n_theta=None):
    """B1 + B2 + theta-averaged nonlinear term, with the parts reported."""
    from .hermite import apply_oscillator_propagator

    joint = field.joint
    if n_theta is None:
        n_theta = default_theta_count(joint.basis.cutoff_degree, sigma)
    b1 = 0.5 * _axial_kinetic_sq(field)
    b2 = _potential_term(field)
    c = mode_data(field)
    acc = 0.0
    for j in range(n_theta):
        theta = 2.0 * np.pi * j / n_theta
        rotated = apply_oscillator_propagator(joint, c, theta, "H")
        acc += _lebesgue_power(field.with_data(rotated, rep="modes"), sigma)
    nl = lam / (sigma + 1.0) * (acc / n_theta)
    return LimitEnergy(total=b1 + b2 + nl, b1=b1, b2=b2, nonlinear=nl)


def scale_field(field, mu, allow_any_mu=False, boundary_tol=1e-8):
    """mu^{1/4} u(x, mu z) by exact Fourier resampling of the periodization.

    Powers of two keep the resampling loss-minimal (grid points map to grid
    points); other mu are allowed behind `allow_any_mu` and evaluate the
    band-limited interpolant off-grid.  Rejected when the scaled field does
    not decay inside the domain (boundary mass above `boundary_tol`).
    """
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if not allow_any_mu and not math.log2(mu).is_integer():
        raise ValueError(
            f"mu={mu} is not a power of two; pass allow_any_mu=True to accept "
            "band-limited interpolation at off-grid points"
        )
    grid = field.grid
    z = grid.points
    k = grid.wavenumbers
    c = mode_data(field)
    # band-limited interpolant evaluated at mu * z_j; points stretched past
    # the principal window sample the line field's (decayed) tail, not the
    # periodic wrap, so they are zeroed
    E = np.exp(1j * np.outer(mu * z, k)) / np.sqrt(grid.domain_length)
    vz = (mu ** 0.25) * (c @ E.T)
    outside = np.abs(mu * z) > 0.5 * grid.domain_length * (1.0 + 1e-12)
    vz[:, outside] = 0.0
    out = field.with_data(z_coeffs_from_values(grid, vz), rep="modes")
    frac = boundary_mass_fraction(out)
    if frac > boundary_tol:
        raise ValueError(
            f"scaled field keeps {frac:.2e} of its mass in the outer z-region "
            f"(tol {boundary_tol:.1e}); support does not fit the domain"
        )
    return out


EPS_COLUMNS = (
    "time",
    "mass",
    "angular_momentum",
    "energy_eps",
    "e0_eps",
    "sigma1_norm",
    "sigma2_norm",
    "lx2sigmaz1_norm",
    "boundary_mass",
)

LIMIT_COLUMNS = (
    "time",
    "mass",
    "a_functional",
    "energy_limit",
    "b1",
    "b2",
    "sigma1_norm",
    "sigma2_norm",
    "lx2sigmaz1_norm",
    "boundary_mass",
)


@dataclass
class ObservableSeries:
    """Time series of every tracked functional for one run."""

    model: str
    columns: tuple
    rows: list = dataclass_field(default_factory=list)

    def append(self, row):
        if len(row) != len(self.columns):
            raise ValueError(f"row width {len(row)} != {len(self.columns)}")
        if self.rows and not row[0] > self.rows[-1][0]:
            raise ValueError("time stamps must be strictly increasing")
        if not all(np.isfinite(v) for v in row):
            raise ValueError(f"non-finite observable at t={row[0]}")
        self.rows.append(tuple(float(v) for v in row))

    def column(self, name):
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    @property
    def times(self):
        return self.column("time")


def observable_row(field, model, eps, lam, sigma, n_theta=None):
    """One fully-evaluated observable row for the series."""
    common = (
        norm(field, "Sigma1"),
        norm(field, "Sigma2"),
        norm(field, "Lx2Sigmaz1"),
        boundary_mass_fraction(field),
    )
    if model == "eps_nls":
        return (
            field.time,
            mass(field),
            angular_momentum(field),
            energy_eps(field, eps, lam, sigma),
            e0_eps(field, eps, lam, sigma),
        ) + common
    e = energy_limit(field, lam, sigma, n_theta)
    return (
        field.time,
        mass(field),
        a_functional(field),
        e.total,
        e.b1,
        e.b2,
    ) + common
