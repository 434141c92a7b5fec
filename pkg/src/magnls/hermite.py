"""Truncated 2D Hermite eigenstructure of the magnetic oscillator.

The transverse operators are the isotropic oscillator Hosc = -1/2 Lap + |x|^2/8,
the angular term Lrot = -(i/2) x-perp . grad, and their sum Hmag = Hosc + Lrot.
The basis h_k1(x1) h_k2(x2) uses Gaussian weight exp(-|x|^2/4), so
Hosc h_k = (k1+k2+1)/2 h_k.  Lrot is not diagonal on these Cartesian products;
it mixes modes of equal total degree, so each degree block is diagonalized
numerically to obtain the joint eigenbasis.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.hermite import hermgauss

GENERATORS = ("H", "H0", "L")


class DegreeBlockError(RuntimeError):
    """A degree block of the angular-term matrix is not Hermitian to tolerance."""


def gauss_hermite_rule(node_count):
    """Nodes x_i and weights W_i with sum_i W_i f(x_i) = int f dx exact for
    f = p(x) exp(-x^2/2), deg p <= 2*node_count - 1."""
    y, w = hermgauss(node_count)
    x = y * np.sqrt(2.0)
    W = w * np.exp(y * y) * np.sqrt(2.0)
    return x, W


def hermite_function_values(x, kmax):
    """h_k(x) for k = 0..kmax, rows indexed by k.

    Stable three-term recurrence on the normalized oscillator functions;
    h_0(x) = (2pi)^{-1/4} exp(-x^2/4) and x h_k = sqrt(k) h_{k-1} + sqrt(k+1) h_{k+1}.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros((kmax + 1,) + x.shape)
    out[0] = (2.0 * np.pi) ** -0.25 * np.exp(-0.25 * x * x)
    if kmax >= 1:
        out[1] = x * out[0]
    for k in range(1, kmax):
        out[k + 1] = (x * out[k] - np.sqrt(k) * out[k - 1]) / np.sqrt(k + 1.0)
    return out


def hermite_function_derivatives(x, kmax):
    """h_k'(x) = (sqrt(k) h_{k-1} - sqrt(k+1) h_{k+1}) / 2."""
    vals = hermite_function_values(x, kmax + 1)
    out = np.zeros((kmax + 1,) + np.asarray(x).shape)
    for k in range(kmax + 1):
        lower = np.sqrt(k) * vals[k - 1] if k > 0 else 0.0
        out[k] = 0.5 * (lower - np.sqrt(k + 1.0) * vals[k + 1])
    return out


@dataclass(frozen=True)
class HermiteBasis:
    """Truncated tensor Hermite system on the Gauss-Hermite tensor grid.

    mode_list is ordered degree-major, then k1 ascending.  sample_matrix maps
    coefficients to values on the flattened (x1-major) tensor grid and
    analysis_matrix is its weighted adjoint; the pair is re-orthonormalized so
    analysis @ sample == identity to round-off.
    """

    cutoff_degree: int
    node_count: int
    mode_list: tuple
    degrees: np.ndarray
    nodes_1d: np.ndarray
    weights_1d: np.ndarray
    grid_weights: np.ndarray          # (node_count**2,)
    grid_x1: np.ndarray
    grid_x2: np.ndarray
    sample_matrix: np.ndarray         # (node_count**2, n_modes)
    analysis_matrix: np.ndarray       # (n_modes, node_count**2)
    sample_dx1: np.ndarray
    sample_dx2: np.ndarray
    mode_index: dict = field(repr=False, default=None)

    @property
    def n_modes(self):
        return len(self.mode_list)

    @property
    def n_grid(self):
        return self.node_count ** 2


def build_hermite_basis(cutoff_degree, node_count):
    """Build the truncated basis; node_count >= cutoff_degree + 1 is required
    for a full-rank discrete transform."""
    if cutoff_degree < 0:
        raise ValueError(f"cutoff_degree must be >= 0, got {cutoff_degree}")
    if node_count < cutoff_degree + 1:
        raise ValueError(
            f"node_count={node_count} < cutoff_degree+1={cutoff_degree + 1}: "
            "sampled synthesis matrix would be rank deficient"
        )
    modes = tuple(
        (k1, d - k1) for d in range(cutoff_degree + 1) for k1 in range(d + 1)
    )
    degrees = np.array([k1 + k2 for (k1, k2) in modes])
    x, W1 = gauss_hermite_rule(node_count)
    vals = hermite_function_values(x, cutoff_degree)
    ders = hermite_function_derivatives(x, cutoff_degree)

    n_modes = len(modes)
    A = np.empty((node_count * node_count, n_modes))
    D1 = np.empty_like(A)
    D2 = np.empty_like(A)
    for m, (k1, k2) in enumerate(modes):
        A[:, m] = np.outer(vals[k1], vals[k2]).ravel()
        D1[:, m] = np.outer(ders[k1], vals[k2]).ravel()
        D2[:, m] = np.outer(vals[k1], ders[k2]).ravel()
    W = np.outer(W1, W1).ravel()

    # Loewdin polish: G = I up to quadrature round-off, so this only removes
    # the last few ulps and makes analysis @ sample exactly the identity.
    G = (A * W[:, None]).T @ A
    ew, EV = np.linalg.eigh(G)
    G_inv_half = (EV / np.sqrt(ew)) @ EV.T
    A = A @ G_inv_half
    D1 = D1 @ G_inv_half
    D2 = D2 @ G_inv_half
    T = (A * W[:, None]).T

    X1, X2 = np.meshgrid(x, x, indexing="ij")
    return HermiteBasis(
        cutoff_degree=cutoff_degree,
        node_count=node_count,
        mode_list=modes,
        degrees=degrees,
        nodes_1d=x,
        weights_1d=W1,
        grid_weights=W,
        grid_x1=X1.ravel(),
        grid_x2=X2.ravel(),
        sample_matrix=A,
        analysis_matrix=T,
        sample_dx1=D1,
        sample_dx2=D2,
        mode_index={m: i for i, m in enumerate(modes)},
    )


@dataclass(frozen=True)
class JointEigenStructure:
    """Joint (Hosc, Lrot) eigenbasis obtained degree block by degree block.

    block_unitary maps joint coefficients to Cartesian coefficients; columns
    within each degree are ordered by ascending angular eigenvalue.
    """

    basis: HermiteBasis
    block_unitary: np.ndarray        # (n_modes, n_modes), complex
    l_eigenvalues: np.ndarray        # per joint mode, half-integers
    h_eigenvalues: np.ndarray        # per joint mode, n + 1/2
    h0_eigenvalues: np.ndarray       # per joint mode (= Cartesian), (d+1)/2
    level_index: np.ndarray          # integer n per joint mode

    @property
    def n_modes(self):
        return self.basis.n_modes

    @property
    def max_level(self):
        return int(self.level_index.max())


def build_joint_eigenstructure(basis, tol=1e-10):
    """Diagonalize the angular term on each oscillator degree block.

    Matrix elements come from quadrature of the analytic derivatives of the
    sampled modes; a non-Hermitian block beyond `tol` signals a
    misconfigured quadrature and raises DegreeBlockError.
    """
    Lop = -0.5j * (
        basis.grid_x1[:, None] * basis.sample_dx2
        - basis.grid_x2[:, None] * basis.sample_dx1
    )
    Lmat = basis.analysis_matrix @ Lop

    n = basis.n_modes
    U = np.zeros((n, n), dtype=complex)
    ell = np.zeros(n)
    for d in range(basis.cutoff_degree + 1):
        idx = np.where(basis.degrees == d)[0]
        block = Lmat[np.ix_(idx, idx)]
        dev = np.abs(block - block.conj().T).max()
        if dev > tol:
            raise DegreeBlockError(
                f"degree-{d} angular block departs from Hermitian by {dev:.3e} (tol {tol:.1e})"
            )
        ews, evs = np.linalg.eigh(block)   # ascending eigenvalue order
        U[np.ix_(idx, idx)] = evs
        ell[idx] = ews

    h0 = 0.5 * (basis.degrees + 1.0)
    h = h0 + ell
    level = np.rint(h - 0.5).astype(int)
    return JointEigenStructure(
        basis=basis,
        block_unitary=U,
        l_eigenvalues=ell,
        h_eigenvalues=h,
        h0_eigenvalues=h0,
        level_index=level,
    )


def _generator_eigenvalues(joint, generator):
    if generator == "H":
        return joint.h_eigenvalues
    if generator == "H0":
        return joint.h0_eigenvalues
    if generator == "L":
        return joint.l_eigenvalues
    raise ValueError(f"unknown generator {generator!r}, expected one of {GENERATORS}")


def apply_oscillator_propagator(joint, coeffs, theta, generator="H"):
    """Multiply each joint mode by exp(-i theta lambda_mode); exactly unitary.

    `coeffs` are Cartesian-mode coefficients of shape (n_modes, ...); the
    change of basis to the joint frame happens internally.
    """
    lam = _generator_eigenvalues(joint, generator)
    c = np.asarray(coeffs)
    if c.shape[0] != joint.n_modes:
        raise ValueError(f"leading axis {c.shape[0]} != mode count {joint.n_modes}")
    U = joint.block_unitary
    phases = np.exp(-1j * theta * lam)
    cj = U.conj().T @ c.reshape(joint.n_modes, -1)
    out = U @ (phases[:, None] * cj)
    return out.reshape(c.shape)


def project_eigenlevel(joint, coeffs, n):
    """Zero all joint modes with level index != n; idempotent orthogonal projection."""
    if n < 0:
        raise ValueError(f"eigenlevel must be >= 0, got {n}")
    c = np.asarray(coeffs)
    mask = (joint.level_index == n).astype(float)
    U = joint.block_unitary
    cj = U.conj().T @ c.reshape(joint.n_modes, -1)
    out = U @ (mask[:, None] * cj)
    return out.reshape(c.shape)
