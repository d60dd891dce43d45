"""Time evolution under the modulated Rabi Hamiltonian, unitary or dissipative.

The workhorse integrator ("cf4") is a fourth-order commutator-free Magnus
scheme specialized to the one-parameter Hamiltonian family

    H(t) = H_const + f(t) * sigma_z,      f(t) = (Omega(t) - omega0) / 2.

Each step applies two exponentials exp(-i (h/2) (H_const + f_eff sigma_z))
drawn from a precomputed eigendecomposition cache over a uniform f grid,
followed by an exact diagonal sigma_z rotation absorbing the off-grid
residual.  The step map is unitary to machine precision, so norm, trace and
purity are conserved over multi-million-step runs, and the accuracy in the
drive phase is fourth order, keeping first-law closure well below 1e-4.

A textbook fixed-step RK4 and an adaptive embedded RK (scipy) are provided
for cross-validation; they reproduce cf4 on short runs but drift in norm on
long ones and are not used for the bundled scenarios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import ConfigError, PhysicsAuditError, TruncationError
from .hilbert import JointSpace, QuantumState, SystemParams
from .modulation import ModulationSpec
from .thermo import RunAudit, Trajectory, WorkAccumulator

# Gauss nodes and weights of the two-exponential fourth-order scheme
_SQ3_6 = math.sqrt(3.0) / 6.0
_C1, _C2 = 0.5 - _SQ3_6, 0.5 + _SQ3_6
_A1, _A2 = 0.25 - _SQ3_6, 0.25 + _SQ3_6
# |f_eff| can exceed max|f| by 2*(|a1| + a2) = 2/sqrt(3)
_F_RANGE_FACTOR = 2.0 / math.sqrt(3.0) + 1e-12

DEFAULT_STEPS_PER_PERIOD = 50
MIN_STEPS_PER_PERIOD = 25


@dataclass(frozen=True)
class LindbladParams:
    """Damping rates and thermal occupancies of the cavity and atomic reservoirs."""

    kappa: float
    gamma: float
    n_c: float = 0.0
    n_a: float = 0.0
    k_b_t_r: Optional[float] = None

    def __post_init__(self):
        for name in ("kappa", "gamma", "n_c", "n_a"):
            if getattr(self, name) < 0:
                raise ConfigError(f"LindbladParams.{name} must be non-negative")

    @staticmethod
    def occupancy(frequency: float, k_b_t_r: float) -> float:
        if k_b_t_r <= 0:
            return 0.0
        return 1.0 / math.expm1(frequency / k_b_t_r)

    @classmethod
    def from_reservoir_temperature(
        cls, params: SystemParams, kappa: float, gamma: float, k_b_t_r: float
    ) -> "LindbladParams":
        return cls(
            kappa=kappa,
            gamma=gamma,
            n_c=cls.occupancy(params.omega, k_b_t_r),
            n_a=cls.occupancy(params.omega0, k_b_t_r),
            k_b_t_r=k_b_t_r,
        )

    @classmethod
    def from_cavity_occupancy(
        cls, params: SystemParams, kappa: float, gamma: float, n_c: float
    ) -> "LindbladParams":
        """Derive the common reservoir temperature from n_c, then n_a from it."""
        if n_c <= 0:
            return cls(kappa=kappa, gamma=gamma, n_c=0.0, n_a=0.0, k_b_t_r=0.0)
        k_b_t_r = params.omega / math.log1p(1.0 / n_c)
        return cls.from_reservoir_temperature(params, kappa, gamma, k_b_t_r)

    def check_consistency(self, params: SystemParams, tol: float = 1e-6) -> None:
        if self.k_b_t_r is None:
            return
        for value, freq, name in (
            (self.n_c, params.omega, "n_c"),
            (self.n_a, params.omega0, "n_a"),
        ):
            expected = self.occupancy(freq, self.k_b_t_r)
            if abs(value - expected) > tol * max(1.0, expected):
                raise ConfigError(
                    f"{name}={value} inconsistent with k_B T_r={self.k_b_t_r} "
                    f"(expected {expected})"
                )


@dataclass(frozen=True)
class ZoomWindow:
    """Dense-sampling window: n_periods drive periods from t_start."""

    name: str
    t_start: float
    n_periods: float = 10.0
    samples_per_period: int = 50


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "cf4"  # cf4 | rk4 | adaptive
    steps_per_drive_period: int = DEFAULT_STEPS_PER_PERIOD
    dt_max: Optional[float] = None
    rtol: float = 1e-10
    atol: float = 1e-12
    grid_size: int = 4096
    record_count: int = 2000
    record_states: bool = False
    check_positivity: bool = True
    zoom_windows: tuple = ()

    def __post_init__(self):
        if self.method not in ("cf4", "rk4", "adaptive"):
            raise ConfigError(f"unknown integrator method {self.method!r}")
        if self.steps_per_drive_period < MIN_STEPS_PER_PERIOD:
            raise ConfigError(
                f"steps_per_drive_period must be >= {MIN_STEPS_PER_PERIOD}"
            )
        if self.grid_size < 16:
            raise ConfigError("grid_size too small for the propagator cache")


def build_h_const(space: JointSpace, params: SystemParams) -> np.ndarray:
    """H_const = omega a^dag a + (omega0/2) sigma_z + g (a + a^dag)(sigma+ + sigma-)."""
    return (
        params.omega * space.num
        + 0.5 * params.omega0 * space.sz
        + params.g * (space.a + space.adag) @ (space.sp + space.sm)
    )


def hamiltonian_at(
    space: JointSpace, params: SystemParams, spec: ModulationSpec, t: float,
    h_const: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Full H(t); the drive only touches the sigma_z term."""
    if h_const is None:
        h_const = build_h_const(space, params)
    f = spec.drive_shift(t)
    if f == 0.0:
        return h_const.copy()
    return h_const + f * space.sz


def _select_step(spec: ModulationSpec, params: SystemParams, t_span, integ: IntegratorConfig):
    """Fixed step resolving both the fastest drive tone and the cavity scale."""
    eta_max = spec.max_drive_frequency(t_span)
    scale = max(eta_max, params.omega)
    h = 2.0 * math.pi / (integ.steps_per_drive_period * scale)
    if integ.dt_max is not None:
        if eta_max > 0 and integ.dt_max > 2.0 * math.pi / (MIN_STEPS_PER_PERIOD * eta_max):
            raise ConfigError(
                "dt_max exceeds 2*pi/(25*eta_max); the drive would be under-resolved"
            )
        h = min(h, integ.dt_max)
    duration = t_span[1] - t_span[0]
    if duration <= 0:
        raise ConfigError("t_span must have positive duration")
    n_steps = max(2, int(math.ceil(duration / h)))
    n_steps += n_steps % 2  # Simpson pairs
    return duration / n_steps, n_steps


class _PropagatorCache:
    """exp(-i (h/2) (H_const + f sigma_z)) on a uniform f grid."""

    def __init__(self, h_const, sz, f_bound, grid_size, half_step):
        self.half_step = half_step
        if f_bound == 0.0:
            grid_size = 1
        self.fgrid = np.linspace(-f_bound, f_bound, grid_size) if grid_size > 1 else np.zeros(1)
        self.df = self.fgrid[1] - self.fgrid[0] if grid_size > 1 else 1.0
        dim = h_const.shape[0]
        self.units = np.empty((grid_size, dim, dim), dtype=np.complex128)
        for j, f in enumerate(self.fgrid):
            evals, evecs = np.linalg.eigh(h_const + f * sz)
            self.units[j] = (evecs * np.exp(-1j * half_step * evals)) @ evecs.conj().T

    def lookup(self, f):
        if len(self.fgrid) == 1:
            return 0, f - self.fgrid[0]
        j = int(round((f - self.fgrid[0]) / self.df))
        j = min(max(j, 0), len(self.fgrid) - 1)
        return j, f - self.fgrid[j]


class _Dissipator:
    """Standard quantum-optics dissipator evaluated with O(dim^2) broadcasts."""

    def __init__(self, space: JointSpace, lb: LindbladParams):
        nf = space.n_fock
        self.nf = nf
        self.r_adown = lb.kappa * (1.0 + lb.n_c)
        self.r_aup = lb.kappa * lb.n_c
        self.r_sdown = lb.gamma * (1.0 + lb.n_a)
        self.r_sup = lb.gamma * lb.n_a
        # c^dag c diagonals of the *truncated* jump operators, so the
        # generator stays exactly trace-preserving on the finite space
        aad_diag = np.real(np.diag(space.a @ space.adag))
        dvec = (
            self.r_adown * space.num_diag
            + self.r_aup * aad_diag
            + self.r_sdown * space.pe_diag
            + self.r_sup * (1.0 - space.pe_diag)
        )
        self.decay = -0.5 * (dvec[:, None] + dvec[None, :])
        sq = np.sqrt(np.arange(1, nf, dtype=float))
        # shaped for the (atom, fock, atom, fock) view of rho
        self.sq_outer = np.outer(sq, sq).reshape(1, nf - 1, 1, nf - 1)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        nf = self.nf
        out = self.decay * rho
        r4 = rho.reshape(2, nf, 2, nf)
        o4 = out.reshape(2, nf, 2, nf)
        if self.r_adown:
            o4[:, : nf - 1, :, : nf - 1] += self.r_adown * self.sq_outer * r4[:, 1:, :, 1:]
        if self.r_aup:
            o4[:, 1:, :, 1:] += self.r_aup * self.sq_outer * r4[:, : nf - 1, :, : nf - 1]
        if self.r_sdown:
            o4[0, :, 0, :] += self.r_sdown * r4[1, :, 1, :]
        if self.r_sup:
            o4[1, :, 1, :] += self.r_sup * r4[0, :, 0, :]
        return out


def _record_plan(t0, h, n_steps, integ: IntegratorConfig, spec: ModulationSpec):
    import warnings as _warnings

    base = np.unique(
        (np.round(np.linspace(0, n_steps, integ.record_count + 1)) // 2 * 2).astype(np.int64)
    )
    zoom_slices = {}
    indices = base
    for win in integ.zoom_windows:
        eta = spec.max_drive_frequency((win.t_start, win.t_start)) or 1.0
        period = 2.0 * math.pi / eta
        start = int(round((win.t_start - t0) / h))
        span = int(math.ceil(win.n_periods * period / h))
        stride = max(1, int(round(period / h / win.samples_per_period)))
        idx = np.arange(max(0, start), min(n_steps, start + span) + 1, stride, dtype=np.int64)
        if idx.size == 0:
            _warnings.warn(f"zoom window {win.name!r} lies outside the run; skipped")
            continue
        zoom_slices[win.name] = idx
        indices = np.union1d(indices, idx)
    zoom_positions = {
        name: np.searchsorted(indices, idx) for name, idx in zoom_slices.items()
    }
    return indices, zoom_positions


class _Recorder:
    def __init__(self, space, params, spec, h_const, indices, h, t0, integ, mixed, unitary):
        self.space, self.params, self.spec = space, params, spec
        self.h_const = h_const
        self.indices = indices
        self.h, self.t0 = h, t0
        self.integ = integ
        self.mixed = mixed
        self.unitary = unitary
        n = len(indices)
        self.times = np.empty(n)
        self.u = np.empty(n)
        self.w = np.empty(n)
        self.n_exc = np.empty(n)
        self.p_e = np.empty(n)
        self.sigma_z = np.empty(n)
        self.top_fock = np.empty(n)
        self.purity = np.empty(n) if mixed else None
        self.states = [] if integ.record_states else None
        self.top_sel = space.top_fock_selector(2)
        self.min_eig = np.inf
        self.herm_drift = 0.0
        self.trace_drift = 0.0
        self._slot = 0

    def record(self, state_data, t, w_value):
        space = self.space
        i = self._slot
        self.times[i] = t
        self.w[i] = w_value
        if self.mixed:
            rho = state_data
            diag = np.real(np.diag(rho))
            tr = diag.sum()
            self.trace_drift = max(self.trace_drift, abs(tr - 1.0))
            self.herm_drift = max(self.herm_drift, float(np.max(np.abs(rho - rho.conj().T))))
            self.n_exc[i] = (space.num_diag + space.pe_diag) @ diag
            self.p_e[i] = space.pe_diag @ diag
            self.sigma_z[i] = space.sz_diag @ diag
            self.top_fock[i] = self.top_sel @ diag
            self.purity[i] = np.real(np.einsum("ij,ji->", rho, rho))
            h_t = self.h_const + self.spec.drive_shift(t) * space.sz
            self.u[i] = np.real(np.einsum("ij,ji->", rho, h_t))
            if self.integ.check_positivity:
                self.min_eig = min(self.min_eig, float(np.linalg.eigvalsh(rho)[0]))
            if self.states is not None:
                self.states.append(QuantumState("mixed", rho.copy()))
        else:
            psi = state_data
            p2 = psi.real**2 + psi.imag**2
            norm = p2.sum()
            self.trace_drift = max(self.trace_drift, abs(norm - 1.0))
            self.n_exc[i] = (space.num_diag + space.pe_diag) @ p2
            self.p_e[i] = space.pe_diag @ p2
            self.sigma_z[i] = space.sz_diag @ p2
            self.top_fock[i] = self.top_sel @ p2
            h_t = self.h_const + self.spec.drive_shift(t) * space.sz
            self.u[i] = np.real(np.vdot(psi, h_t @ psi))
            if self.states is not None:
                self.states.append(QuantumState("pure", psi.copy()))
        self._slot += 1

    def finish(self, zoom_positions, metadata) -> Trajectory:
        q = np.zeros_like(self.w)
        if not self.unitary:
            q = (self.u - self.u[0]) - self.w
        audit = RunAudit(
            max_top_fock=float(np.max(self.top_fock)),
            trace_drift=self.trace_drift,
            min_eigenvalue=0.0 if not self.mixed else
            (self.min_eig if np.isfinite(self.min_eig) else 0.0),
        )
        if self.mixed and self.herm_drift > 1e-12:
            audit.warnings.append(f"hermiticity drift {self.herm_drift:.2e}")
        if self.unitary:
            audit.first_law_max = float(
                np.max(np.abs((self.u - self.u[0]) - self.w))
            )
            if self.mixed:
                audit.purity_drift = float(np.max(np.abs(self.purity - self.purity[0])))
        traj = Trajectory(
            times=self.times,
            u=self.u,
            w=self.w,
            q=q,
            n_exc=self.n_exc,
            p_e=self.p_e,
            sigma_z=self.sigma_z,
            top_fock_pop=self.top_fock,
            purity=self.purity,
            states=self.states,
            zoom=zoom_positions,
            metadata=metadata,
            audit=audit,
        )
        return traj


def _sigma_z_fast(space, data, mixed):
    if mixed:
        return float(space.sz_diag @ np.real(np.diag(data)))
    return float(space.sz_diag @ (data.real**2 + data.imag**2))


_CHUNK = 8192


def _dissipator_stride(h: float, lindblad: Optional[LindbladParams]) -> int:
    """Apply the (tiny-rate) dissipator in lumps; pending flow is flushed at
    every record so sampled observables never lag."""
    if lindblad is None:
        return 1
    rate = lindblad.kappa * (1.0 + 2.0 * lindblad.n_c) + lindblad.gamma * (
        1.0 + 2.0 * lindblad.n_a
    )
    if rate <= 0:
        return 16
    return max(1, min(16, int(1e-4 / (h * rate))))


def _evolve_cf4(state, space, params, spec, t_span, integ, lindblad):
    mixed = state.kind == "mixed" or lindblad is not None
    h, n_steps = _select_step(spec, params, t_span, integ)
    t0 = t_span[0]
    h_const = build_h_const(space, params)
    f_bound = _F_RANGE_FACTOR * spec.shift_bound
    cache = _PropagatorCache(h_const, space.sz, f_bound, integ.grid_size, h / 2.0)
    units = cache.units
    half = cache.half_step
    dissipator = _Dissipator(space, lindblad) if lindblad is not None else None
    stride = _dissipator_stride(h, lindblad)

    indices, zoom_positions = _record_plan(t0, h, n_steps, integ, spec)
    rec = _Recorder(
        space, params, spec, h_const, indices, h, t0, integ, mixed, lindblad is None
    )

    nf = space.n_fock
    dim = space.dim
    gslice = slice(0, nf)
    eslice = slice(nf, None)

    # representations: pure vector | factored unitary mixture | full density
    factored = mixed and lindblad is None
    if factored:
        # rho = Psi Psi^dag with sqrt-weighted columns; exact for unitary runs
        evals, evecs = np.linalg.eigh(state.as_density())
        keep = evals > 1e-14
        data = np.ascontiguousarray(evecs[:, keep] * np.sqrt(evals[keep]))
    elif mixed:
        data = state.as_density().copy()
    else:
        data = state.data.copy()

    def current_density():
        if factored:
            return data @ data.conj().T
        return data

    def sigma_z_now():
        if factored:
            row = np.einsum("ij,ij->i", data.real, data.real)
            row += np.einsum("ij,ij->i", data.imag, data.imag)
            return float(space.sz_diag @ row)
        return _sigma_z_fast(space, data, mixed)

    carry = np.array([0.0, float(spec.omega_dot_at(t0)) * 0.5 * sigma_z_now(), 0.0, 0.0])
    next_rec = 0
    if indices[next_rec] == 0:
        rec.record(current_density() if mixed else data, t0, 0.0)
        next_rec += 1

    single = len(cache.fgrid) == 1
    fg0 = cache.fgrid[0]
    ngrid = len(cache.fgrid)
    density = mixed and not factored
    if not density:
        # column kernel also serves pure states (a single column)
        data = np.ascontiguousarray(data.reshape(dim, -1))

    def flush(rho, n_pending):
        tau_d = n_pending * h
        k1 = dissipator.apply(rho)
        rho = rho + tau_d * dissipator.apply(rho + (0.5 * tau_d) * k1)
        return 0.5 * (rho + rho.conj().T)

    for start in range(0, n_steps, _CHUNK):
        stop = min(start + _CHUNK, n_steps)
        ts = t0 + np.arange(start, stop) * h
        f1 = np.atleast_1d(spec.drive_shift(ts + _C1 * h))
        f2 = np.atleast_1d(spec.drive_shift(ts + _C2 * h))
        f_r = 2.0 * (_A2 * f1 + _A1 * f2)
        f_l = 2.0 * (_A1 * f1 + _A2 * f2)
        if single:
            j_r = np.zeros(stop - start, dtype=np.int64)
            j_l = j_r
        else:
            j_r = np.clip(np.rint((f_r - fg0) / cache.df).astype(np.int64), 0, ngrid - 1)
            j_l = np.clip(np.rint((f_l - fg0) / cache.df).astype(np.int64), 0, ngrid - 1)
        df_r = f_r - cache.fgrid[j_r]
        df_l = f_l - cache.fgrid[j_l]
        wdot = np.atleast_1d(spec.omega_dot_at(ts + h))

        # segment the chunk at record instants (and dissipator flushes)
        k = start
        while k < stop:
            seg_end = stop
            if next_rec < len(indices):
                seg_end = min(seg_end, int(indices[next_rec]))
            if density and dissipator is not None:
                seg_end = min(seg_end, k + stride)
            seg_end = max(seg_end, k + 1)
            lo, hi = k - start, seg_end - start
            if density:
                data = _kernels.advance_density(
                    units, j_r[lo:hi], j_l[lo:hi], df_r[lo:hi], df_l[lo:hi],
                    wdot[lo:hi], half, h, data, space.sz_diag, nf, carry,
                )
                if dissipator is not None:
                    data = flush(data, seg_end - k)
            else:
                data = _kernels.advance_columns(
                    units, j_r[lo:hi], j_l[lo:hi], df_r[lo:hi], df_l[lo:hi],
                    wdot[lo:hi], half, h, data, space.sz_diag, nf, carry,
                )
            k = seg_end
            if next_rec < len(indices) and indices[next_rec] == k:
                w_val = _kernels.carry_value(carry, h)
                if density:
                    rec.record(data, t0 + k * h, w_val)
                elif mixed:
                    rec.record(data @ data.conj().T, t0 + k * h, w_val)
                else:
                    rec.record(data[:, 0], t0 + k * h, w_val)
                next_rec += 1

    metadata = {
        "integrator": "cf4",
        "dt": h,
        "n_steps": n_steps,
        "grid_size": len(cache.fgrid),
        "dissipator_stride": stride,
        "representation": "density" if density else ("factored" if factored else "vector"),
    }
    return rec.finish(zoom_positions, metadata)


def _evolve_rk4(state, space, params, spec, t_span, integ, lindblad):
    mixed = state.kind == "mixed" or lindblad is not None
    h, n_steps = _select_step(spec, params, t_span, integ)
    t0 = t_span[0]
    h_const = build_h_const(space, params)
    sz_diag = space.sz_diag
    dissipator = _Dissipator(space, lindblad) if lindblad is not None else None
    comm_gap = sz_diag[:, None] - sz_diag[None, :]

    def rhs(t, data):
        f = float(spec.drive_shift(t))
        if mixed:
            out = -1j * (h_const @ data - data @ h_const) - 1j * f * (comm_gap * data)
            if dissipator is not None:
                out += dissipator.apply(data)
            return out
        return -1j * (h_const @ data + (f * sz_diag) * data)

    indices, zoom_positions = _record_plan(t0, h, n_steps, integ, spec)
    rec = _Recorder(
        space, params, spec, h_const, indices, h, t0, integ, mixed, lindblad is None
    )
    data = state.as_density().copy() if mixed else state.data.copy()
    y0 = float(spec.omega_dot_at(t0)) * 0.5 * _sigma_z_fast(space, data, mixed)
    next_rec = 0
    if indices[next_rec] == 0:
        rec.record(data, t0, 0.0)
        next_rec += 1
    w = 0.0
    for k in range(n_steps):
        t = t0 + k * h
        k1 = rhs(t, data)
        s2 = data + 0.5 * h * k1
        k2 = rhs(t + 0.5 * h, s2)
        s3 = data + 0.5 * h * k2
        k3 = rhs(t + 0.5 * h, s3)
        s4 = data + h * k3
        k4 = rhs(t + h, s4)
        data = data + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_new = t + h
        y_mid = (
            float(spec.omega_dot_at(t + 0.5 * h))
            * 0.5
            * 0.5
            * (_sigma_z_fast(space, s2, mixed) + _sigma_z_fast(space, s3, mixed))
        )
        y1 = float(spec.omega_dot_at(t_new)) * 0.5 * _sigma_z_fast(space, data, mixed)
        w += (h / 6.0) * (y0 + 4.0 * y_mid + y1)
        y0 = y1
        if next_rec < len(indices) and indices[next_rec] == k + 1:
            rec.record(data, t_new, w)
            next_rec += 1
    metadata = {"integrator": "rk4", "dt": h, "n_steps": n_steps}
    return rec.finish(zoom_positions, metadata)


def _evolve_adaptive(state, space, params, spec, t_span, integ, lindblad):
    from scipy.integrate import solve_ivp

    mixed = state.kind == "mixed" or lindblad is not None
    h_const = build_h_const(space, params)
    sz_diag = space.sz_diag
    dissipator = _Dissipator(space, lindblad) if lindblad is not None else None
    comm_gap = sz_diag[:, None] - sz_diag[None, :]
    dim = space.dim

    def rhs(t, flat):
        if mixed:
            rho = flat.reshape(dim, dim)
            f = float(spec.drive_shift(t))
            out = -1j * (h_const @ rho - rho @ h_const) - 1j * f * (comm_gap * rho)
            if dissipator is not None:
                out += dissipator.apply(rho)
            return out.ravel()
        f = float(spec.drive_shift(t))
        return -1j * (h_const @ flat + (f * sz_diag) * flat)

    y0 = (state.as_density() if mixed else state.data).astype(complex).ravel()
    sol = solve_ivp(
        rhs, t_span, y0, dense_output=True, rtol=integ.rtol, atol=integ.atol,
        method="DOP853",
    )
    if not sol.success:
        raise PhysicsAuditError(f"adaptive integration failed: {sol.message}")

    # work quadrature still runs on a drive-resolving grid off the interpolant
    h, n_steps = _select_step(spec, params, t_span, integ)
    t0 = t_span[0]
    indices, zoom_positions = _record_plan(t0, h, n_steps, integ, spec)
    rec = _Recorder(
        space, params, spec, h_const, indices, h, t0, integ, mixed, lindblad is None
    )
    acc = None
    next_rec = 0
    for k in range(n_steps + 1):
        t = t0 + k * h
        flat = sol.sol(t)
        data = flat.reshape(dim, dim) if mixed else flat
        y = float(spec.omega_dot_at(t)) * 0.5 * _sigma_z_fast(space, data, mixed)
        if acc is None:
            acc = WorkAccumulator(h, y)
        else:
            acc.add(y)
        if next_rec < len(indices) and indices[next_rec] == k:
            rec.record(np.ascontiguousarray(data), t, acc.value)
            next_rec += 1
    metadata = {"integrator": "adaptive", "rtol": integ.rtol, "atol": integ.atol}
    return rec.finish(zoom_positions, metadata)


_BACKENDS = {"cf4": _evolve_cf4, "rk4": _evolve_rk4, "adaptive": _evolve_adaptive}


def _evolve(state, space, params, spec, t_span, integ, lindblad, enforce_audit):
    state.validate()
    params.warn_if_not_dispersive(space.n_max)
    spec.warn_if_not_perturbative(params)
    traj = _BACKENDS[integ.method](state, space, params, spec, t_span, integ, lindblad)
    if enforce_audit:
        fails = traj.audit.failures()
        if any("truncation" in f for f in fails):
            raise TruncationError("; ".join(fails))
        if fails:
            raise PhysicsAuditError("; ".join(fails))
    return traj


def evolve_unitary(
    state: QuantumState,
    space: JointSpace,
    params: SystemParams,
    spec: ModulationSpec,
    t_span,
    integ: IntegratorConfig = IntegratorConfig(),
    enforce_audit: bool = True,
) -> Trajectory:
    """Propagate under i d/dt = H(t): amplitude vector for pure inputs,
    commutator equation for mixed ones."""
    return _evolve(state, space, params, spec, t_span, integ, None, enforce_audit)


def evolve_lindblad(
    state: QuantumState,
    space: JointSpace,
    params: SystemParams,
    spec: ModulationSpec,
    lindblad: LindbladParams,
    t_span,
    integ: IntegratorConfig = IntegratorConfig(),
    enforce_audit: bool = True,
) -> Trajectory:
    """Propagate the master equation with the standard quantum-optics dissipator.

    Pure inputs are promoted to density matrices; Hermiticity is enforced by
    symmetrization after each dissipative increment.
    """
    if state.kind == "pure":
        state = QuantumState.mixed(state.as_density())
    lindblad.check_consistency(params)
    return _evolve(state, space, params, spec, t_span, integ, lindblad, enforce_audit)
