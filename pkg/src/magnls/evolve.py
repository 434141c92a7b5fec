"""Time integrators for both models and the filtered-difference observable.

The eps-model stepper is a Strang composition of the exact oscillator/axial
phases with the exact pointwise nonlinear flow.  Its state is kept on the
collocation grid: the resolved component rotates under the oscillator phases
while the residual generated by the nonlinearity (outside the truncated
basis) is carried along unchanged, so every substep is unitary on the grid
and mass is conserved to round-off rather than to quadrature accuracy.

The limit-model stepper is Strang in the axial flow around a classical
4-stage Runge-Kutta solve of i phi_t = lam Fav(phi) in mode space.
"""

from dataclasses import dataclass, field as dataclass_field, replace

import numpy as np

from .averaging import _fav_kernel, _joint_transforms, default_theta_count
from .axial import AxialGrid, PotentialSpec, build_axial_grid
from .field import (
    GRID_REP,
    MODE_REP,
    SpectralField,
    analyze,
    field_from_modes,
    field_from_values,
    mode_data,
    norm,
    synthesize,
    z_coeffs_from_values,
    z_values_from_coeffs,
)
from .functionals import EPS_COLUMNS, LIMIT_COLUMNS, ObservableSeries, observable_row
from .hermite import apply_oscillator_propagator, build_hermite_basis, build_joint_eigenstructure

MODELS = ("eps_nls", "limit_nls")
SIGMAS = (1, 2, 3, 4)


class BlowupError(RuntimeError):
    """Inner-stage norm grew past the guard; carries the abort time."""

    def __init__(self, message, time):
        super().__init__(message)
        self.time = time


def default_node_count(cutoff_degree):
    """Oversampling >= 2x the cutoff keeps collocation products well resolved."""
    return max(2 * cutoff_degree, cutoff_degree + 2, 8)


@dataclass
class SimConfig:
    model: str = "limit_nls"
    eps: float = None
    sigma: int = 1
    lam: int = 1
    dt: float = None
    t_final: float = 1.0
    cutoff_degree: int = 8
    node_count: int = None
    n_z: int = 64
    l_z: float = 16.0
    potential: PotentialSpec = dataclass_field(default_factory=PotentialSpec)
    n_theta: int = None
    data_name: str = "g1"
    amplitude: float = 1.0
    seed: int = 1234
    data_params: dict = dataclass_field(default_factory=dict)
    sample_stride: int = None
    axial_substeps: int = 1
    nonlinearity_enabled: bool = True
    blowup_guard: float = 0.10
    experiment_options: dict = dataclass_field(default_factory=dict)
    stiff_warning: bool = dataclass_field(default=False, init=False)

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.sigma not in SIGMAS:
            raise ValueError(f"sigma must be in {SIGMAS}, got {self.sigma}")
        if self.lam not in (-1, 1):
            raise ValueError(f"lambda must be -1 or +1, got {self.lam}")
        if self.model == "eps_nls":
            if self.eps is None:
                raise ValueError("eps_nls model requires epsilon")
            if self.eps <= 0:
                raise ValueError(f"epsilon must be positive, got {self.eps}")
        if self.dt is None:
            self.dt = self.eps ** 2 / 20.0 if self.model == "eps_nls" else 1e-3
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_final < 0:
            raise ValueError(f"t_final must be >= 0, got {self.t_final}")
        if self.t_final > 0 and self.dt > self.t_final:
            raise ValueError(f"dt={self.dt} exceeds t_final={self.t_final}")
        if self.cutoff_degree < 0 or self.n_z < 8 or self.l_z <= 0:
            raise ValueError("grid sizes must be positive (n_z >= 8)")
        if self.node_count is None:
            self.node_count = default_node_count(self.cutoff_degree)
        if self.n_theta is None:
            self.n_theta = default_theta_count(self.cutoff_degree, self.sigma)
        if self.sample_stride is None:
            steps = self.step_count()
            self.sample_stride = max(1, steps // 50)
        if self.model == "eps_nls" and self.dt > self.eps ** 2 / 10.0:
            self.stiff_warning = True

    def step_count(self):
        if self.t_final == 0:
            return 0
        return int(round(self.t_final / self.dt))


def make_discretization(cfg):
    basis = build_hermite_basis(cfg.cutoff_degree, cfg.node_count)
    joint = build_joint_eigenstructure(basis)
    grid = build_axial_grid(cfg.l_z, cfg.n_z, cfg.potential)
    return joint, grid


# ---------------------------------------------------------------------------
# eps-model: grid-state Strang stepper


class _EpsStepper:
    def __init__(self, joint, grid, cfg):
        self.joint = joint
        self.grid = grid
        self.cfg = cfg
        basis = joint.basis
        self.A = basis.sample_matrix.astype(complex)
        self.T = basis.analysis_matrix.astype(complex)
        U = joint.block_unitary
        lam_h = joint.h_eigenvalues / cfg.eps ** 2

        def rotor(tau):
            return (U * np.exp(-1j * tau * lam_h)[None, :]) @ U.conj().T

        self.rot_half = rotor(cfg.dt / 2.0)
        self.rot_full = rotor(cfg.dt)
        m = cfg.axial_substeps
        h_half = (cfg.dt / 2.0) / m
        self.substeps = m
        self.phV_half = np.exp(-0.5j * h_half * grid.potential_values)
        self.phK_half = np.exp(-0.5j * h_half * grid.wavenumbers ** 2)

    def _axial_half(self, v):
        for _ in range(self.substeps):
            v = v * self.phV_half
            v = np.fft.ifft(np.fft.fft(v, axis=1) * self.phK_half, axis=1)
            v = v * self.phV_half
        return v

    def _oscillator(self, v, rot):
        vc = self.T @ v
        return v + self.A @ (rot @ vc - vc)

    def linear_half(self, v):
        return self._axial_half(self._oscillator(v, self.rot_half))

    def linear_full(self, v):
        return self._axial_half(self._axial_half(self._oscillator(v, self.rot_full)))

    def nonlinear(self, v):
        if not self.cfg.nonlinearity_enabled:
            return v
        cfg = self.cfg
        return v * np.exp(-1j * cfg.dt * cfg.lam * np.abs(v) ** (2 * cfg.sigma))

    def run_segment(self, v, n_steps):
        """n_steps Strang steps with interior linear halves fused pairwise."""
        if n_steps == 0:
            return v
        v = self.linear_half(v)
        for i in range(n_steps):
            v = self.nonlinear(v)
            v = self.linear_half(v) if i == n_steps - 1 else self.linear_full(v)
        return v


def step_eps(state, cfg, joint=None, grid=None):
    """One Strang step of the eps-model on a collocation-representation field.

    Chaining grid-representation fields preserves the unresolved residual
    between steps; analyzing a field projects it onto the basis.
    """
    if cfg.model != "eps_nls":
        raise ValueError("step_eps requires an eps_nls configuration")
    state = synthesize(state)
    stepper = _EpsStepper(state.joint, state.grid, cfg)
    v = stepper.run_segment(state.data, 1)
    return replace(state, data=v, rep=GRID_REP, time=state.time + cfg.dt)


# ---------------------------------------------------------------------------
# limit model: axial Strang around RK4 in mode space


class _LimitStepper:
    def __init__(self, joint, grid, cfg):
        self.joint = joint
        self.grid = grid
        self.cfg = cfg
        self.synth, self.ana = _joint_transforms(joint)
        self.U = joint.block_unitary
        m = cfg.axial_substeps
        h_half = (cfg.dt / 2.0) / m
        self.substeps = m
        self.phV_half = np.exp(-0.5j * h_half * grid.potential_values)
        self.phK_half = np.exp(-0.5j * h_half * grid.wavenumbers ** 2)
        self.guard = 1.0 + cfg.blowup_guard

    def _axial_half(self, c):
        for _ in range(self.substeps):
            c = c * self.phV_half
            c = np.fft.ifft(np.fft.fft(c, axis=1) * self.phK_half, axis=1)
            c = c * self.phV_half
        return c

    def _rhs(self, cj):
        if not self.cfg.nonlinearity_enabled:
            return np.zeros_like(cj)
        cfg = self.cfg
        fav = _fav_kernel(self.joint, cj, cfg.sigma, cfg.n_theta, self.synth, self.ana)
        return -1j * cfg.lam * fav

    def nonlinear_rk4(self, c, t):
        """Classical four-stage step of i c_t = lam Fav(c), z in collocation;
        aborts when any stage norm grows past the guard."""
        cfg = self.cfg
        dt = cfg.dt
        cj = self.U.conj().T @ c
        n0 = np.linalg.norm(cj)
        k1 = self._rhs(cj)
        s2 = cj + 0.5 * dt * k1
        k2 = self._rhs(s2)
        s3 = cj + 0.5 * dt * k2
        k3 = self._rhs(s3)
        s4 = cj + dt * k3
        k4 = self._rhs(s4)
        out = cj + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if n0 > 0:
            worst = max(
                np.linalg.norm(s2), np.linalg.norm(s3),
                np.linalg.norm(s4), np.linalg.norm(out),
            )
            if worst > self.guard * n0:
                raise BlowupError(
                    f"inner stage norm grew by {worst / n0 - 1.0:.1%} at t={t:.6g} "
                    f"(guard {self.cfg.blowup_guard:.0%})",
                    time=t,
                )
        return self.U @ out

    def run_segment(self, c, n_steps, t0):
        if n_steps == 0:
            return c
        c = self._axial_half(c)
        for i in range(n_steps):
            c = self.nonlinear_rk4(c, t0 + i * self.cfg.dt)
            if i == n_steps - 1:
                c = self._axial_half(c)
            else:
                c = self._axial_half(self._axial_half(c))
        return c


def step_limit(state, cfg, joint=None, grid=None):
    """One Strang step of the limit model on a mode-space field."""
    if cfg.model != "limit_nls":
        raise ValueError("step_limit requires a limit_nls configuration")
    c = mode_data(state)
    stepper = _LimitStepper(state.joint, state.grid, cfg)
    cz = z_values_from_coeffs(state.grid, c)
    cz = stepper.run_segment(cz, 1, state.time)
    out = z_coeffs_from_values(state.grid, cz)
    return replace(state, data=out, rep=MODE_REP, time=state.time + cfg.dt)


# ---------------------------------------------------------------------------
# full runs


@dataclass
class EvolveResult:
    final: SpectralField
    series: ObservableSeries
    snapshots: list
    aborted: bool = False
    abort_message: str = ""


def evolve(cfg, initial=None, joint=None, grid=None, keep_snapshots=False):
    """Iterate the configured stepper from t=0 to t_final, sampling every
    functional each stride.  Deterministic given cfg."""
    if joint is None or grid is None:
        joint, grid = make_discretization(cfg)
    if initial is None:
        from .initial_data import build_initial_data

        initial = build_initial_data(joint, grid, cfg)
    columns = EPS_COLUMNS if cfg.model == "eps_nls" else LIMIT_COLUMNS
    series = ObservableSeries(model=cfg.model, columns=columns)
    snapshots = []

    def sample(fld):
        series.append(
            observable_row(fld, cfg.model, cfg.eps, cfg.lam, cfg.sigma, cfg.n_theta)
        )
        if keep_snapshots:
            snapshots.append(analyze(fld))

    current = analyze(initial)
    sample(current)
    n_steps = cfg.step_count()
    if n_steps == 0:
        return EvolveResult(final=current, series=series, snapshots=snapshots)

    stride = cfg.sample_stride
    if cfg.model == "eps_nls":
        stepper = _EpsStepper(joint, grid, cfg)
        state = synthesize(initial).data
        advance = stepper.run_segment
    else:
        stepper = _LimitStepper(joint, grid, cfg)
        state = z_values_from_coeffs(grid, mode_data(initial))
        advance = stepper.run_segment

    done = 0
    aborted = False
    abort_message = ""
    while done < n_steps:
        todo = min(stride, n_steps - done)
        try:
            if cfg.model == "eps_nls":
                state = advance(state, todo)
            else:
                state = advance(state, todo, done * cfg.dt)
        except BlowupError as err:
            aborted = True
            abort_message = str(err)
            break
        done += todo
        t = done * cfg.dt
        if cfg.model == "eps_nls":
            current = field_from_values(joint, grid, state, time=t)
        else:
            current = field_from_modes(
                joint, grid, z_coeffs_from_values(grid, state), time=t
            )
        sample(current)

    final = analyze(current)
    return EvolveResult(
        final=final,
        series=series,
        snapshots=snapshots,
        aborted=aborted,
        abort_message=abort_message,
    )


def filtered_gap(psi_eps_state, phi_state, eps):
    """(L2, Sigma1) norms of e^{i t H / eps^2} psi_eps - phi at matched time."""
    if psi_eps_state.joint is not phi_state.joint and (
        psi_eps_state.basis.cutoff_degree != phi_state.basis.cutoff_degree
        or psi_eps_state.basis.node_count != phi_state.basis.node_count
    ):
        raise ValueError("fields live on different transverse discretizations")
    if psi_eps_state.grid.point_count != phi_state.grid.point_count or (
        psi_eps_state.grid.domain_length != phi_state.grid.domain_length
    ):
        raise ValueError("fields live on different axial grids")
    if abs(psi_eps_state.time - phi_state.time) > 1e-12:
        raise ValueError(
            f"fields are at different times: {psi_eps_state.time} vs {phi_state.time}"
        )
    t = psi_eps_state.time
    filtered = apply_oscillator_propagator(
        psi_eps_state.joint, mode_data(psi_eps_state), -t / eps ** 2, "H"
    )
    diff = filtered - mode_data(phi_state)
    diff_field = field_from_modes(phi_state.joint, phi_state.grid, diff, time=t)
    gap_l2 = float(np.sqrt((np.abs(diff) ** 2).sum()))
    return gap_l2, norm(diff_field, "Sigma1")
