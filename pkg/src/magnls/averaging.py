"""The conjugated nonlinearity F(theta, u) and its period average.

F(theta, u) = e^{i theta H} (|e^{-i theta H} u|^{2 sigma} e^{-i theta H} u) is
2 pi periodic in theta because e^{i theta (H - 1/2)} is, and the half-integer
phases cancel between the sigma+1 plain factors, the sigma conjugates and the
outer propagator.  On the truncated basis the integrand is a trigonometric
polynomial in theta with integer frequencies bounded by (sigma+2)*cutoff, so
an equispaced average with more nodes than that is exact and the limit
model's nonlinearity can be evaluated without quadrature error in theta.

The sigma=1 average also equals the resonant sum over eigenlevel quadruples
n1 + n2 = n3 + n4, which provides an independent oracle.
"""

import numpy as np

from .field import MODE_REP, field_from_modes, mode_data, z_coeffs_from_values, z_values_from_coeffs

RESONANT_MAX_CUTOFF = 10


def theta_count_threshold(cutoff_degree, sigma):
    """Smallest node count the exactness argument supports."""
    return (sigma + 2) * cutoff_degree + 1


def default_theta_count(cutoff_degree, sigma):
    """Threshold rounded up to the next even integer (symmetric node layout)."""
    n = theta_count_threshold(cutoff_degree, sigma)
    return n + (n % 2)


def _joint_transforms(joint):
    basis = joint.basis
    U = joint.block_unitary
    synth = basis.sample_matrix.astype(complex) @ U
    ana = synth.conj().T * basis.grid_weights[None, :]
    return synth, ana


def _f_kernel(joint, cz_joint, theta, sigma, synth, ana):
    """One theta evaluation on joint coefficients with z in collocation."""
    ph = np.exp(-1j * theta * joint.h_eigenvalues)
    v = synth @ (ph[:, None] * cz_joint)
    w = (np.abs(v) ** (2 * sigma)) * v
    return np.conj(ph)[:, None] * (ana @ w)


def _fav_kernel(joint, cz_joint, sigma, n_theta, synth, ana):
    """Equispaced theta average; theta nodes are folded into the column axis
    so both transforms run as single matrix products."""
    n_modes, nz = cz_joint.shape
    thetas = 2.0 * np.pi * np.arange(n_theta) / n_theta
    ph = np.exp(-1j * np.outer(joint.h_eigenvalues, thetas))      # (modes, nt)
    rot = (ph[:, :, None] * cz_joint[:, None, :]).reshape(n_modes, n_theta * nz)
    v = synth @ rot
    w = (np.abs(v) ** (2 * sigma)) * v
    back = (ana @ w).reshape(n_modes, n_theta, nz)
    return (np.conj(ph)[:, :, None] * back).mean(axis=1)


def eval_F(field, theta, sigma):
    """F(theta, u) for a mode-space field; Galerkin-truncated to the basis."""
    joint = field.joint
    c = mode_data(field)
    cz = z_values_from_coeffs(field.grid, joint.block_unitary.conj().T @ c)
    synth, ana = _joint_transforms(joint)
    out = _f_kernel(joint, cz, theta, sigma, synth, ana)
    out = joint.block_unitary @ z_coeffs_from_values(field.grid, out)
    return field.with_data(out, MODE_REP)


def eval_Fav(field, sigma, n_theta=None):
    """Averaged nonlinearity; n_theta below the exactness threshold is rejected."""
    joint = field.joint
    cutoff = joint.basis.cutoff_degree
    if n_theta is None:
        n_theta = default_theta_count(cutoff, sigma)
    threshold = theta_count_threshold(cutoff, sigma)
    if n_theta < threshold:
        raise ValueError(
            f"n_theta={n_theta} below exactness threshold {threshold} "
            f"for cutoff {cutoff}, sigma {sigma}"
        )
    c = mode_data(field)
    cz = z_values_from_coeffs(field.grid, joint.block_unitary.conj().T @ c)
    synth, ana = _joint_transforms(joint)
    out = _fav_kernel(joint, cz, sigma, n_theta, synth, ana)
    out = joint.block_unitary @ z_coeffs_from_values(field.grid, out)
    return field.with_data(out, MODE_REP)


def eval_Fav_resonant(field, sigma=1):
    """Brute-force resonant sum over level quadruples; sigma=1 oracle.

    Products are formed in collocation space and projected exactly like the
    quadrature path, so any difference from eval_Fav isolates theta
    integration error.
    """
    if sigma != 1:
        raise ValueError(f"resonant oracle implemented for sigma=1 only, got {sigma}")
    joint = field.joint
    cutoff = joint.basis.cutoff_degree
    if cutoff > RESONANT_MAX_CUTOFF:
        raise ValueError(
            f"cutoff {cutoff} exceeds oracle bound {RESONANT_MAX_CUTOFF} "
            "(quartic cost in level count)"
        )
    c = mode_data(field)
    cz = z_values_from_coeffs(field.grid, joint.block_unitary.conj().T @ c)
    synth, ana = _joint_transforms(joint)
    nmax = joint.max_level
    level_values = []
    for n in range(nmax + 1):
        mask = (joint.level_index == n).astype(float)
        level_values.append(synth @ (mask[:, None] * cz))
    out = np.zeros_like(cz)
    for n1 in range(nmax + 1):
        for n2 in range(nmax + 1):
            for n3 in range(nmax + 1):
                n4 = n1 + n2 - n3
                if n4 < 0 or n4 > nmax:
                    continue
                prod = level_values[n1] * level_values[n2] * np.conj(level_values[n3])
                proj = (joint.level_index == n4)[:, None] * (ana @ prod)
                out += proj
    out = joint.block_unitary @ z_coeffs_from_values(field.grid, out)
    return field.with_data(out, MODE_REP)
