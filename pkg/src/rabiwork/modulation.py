"""Multi-tone drive of the atomic frequency and its exact time derivative.

Each tone contributes eps * sin(theta(t) + phi) where the phase is the
literal product theta(t) = eta(t) * t.  For a linear chirp
eta(t) = eta0 + s*t this gives theta = eta0*t + s*t^2, so the
instantaneous angular frequency is eta0 + 2*s*t (twice the nominal slope).
Chirps may be clamped to a window [t_start, t_end]; outside it the phase
keeps advancing at the frozen instantaneous frequency, which keeps both
the drive and its derivative continuous.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError
from .hilbert import SystemParams


@dataclass(frozen=True)
class FrequencySchedule:
    """Frequency law of a single tone: constant eta0 or linear chirp eta0 + slope*t."""

    eta0: float
    slope: float = 0.0
    t_start: Optional[float] = None
    t_end: Optional[float] = None

    def __post_init__(self):
        if self.eta0 < 0:
            raise ConfigError("tone frequency eta0 must be non-negative")
        if self.slope == 0.0 and (self.t_start is not None or self.t_end is not None):
            raise ConfigError("clamp window only applies to chirped tones")
        if (
            self.t_start is not None
            and self.t_end is not None
            and self.t_end <= self.t_start
        ):
            raise ConfigError("chirp window must satisfy t_end > t_start")

    def _window(self, t):
        lo = -np.inf if self.t_start is None else self.t_start
        hi = np.inf if self.t_end is None else self.t_end
        return np.clip(t, lo, hi)

    def phase(self, t):
        """theta(t) = eta(t)*t inside the window, linearly continued outside."""
        if self.slope == 0.0:
            return self.eta0 * np.asarray(t, dtype=float)
        tc = self._window(t)
        theta_c = self.eta0 * tc + self.slope * tc**2
        return theta_c + (self.eta0 + 2.0 * self.slope * tc) * (np.asarray(t, dtype=float) - tc)

    def phase_rate(self, t):
        """d theta / dt, i.e. the instantaneous angular frequency."""
        if self.slope == 0.0:
            return np.broadcast_to(np.float64(self.eta0), np.shape(t)).copy() if np.ndim(t) else self.eta0
        tc = self._window(t)
        return self.eta0 + 2.0 * self.slope * tc

    def max_rate(self, t_span) -> float:
        """Largest instantaneous frequency over [t_span[0], t_span[1]]."""
        t0, t1 = t_span
        candidates = [self.phase_rate(t0), self.phase_rate(t1)]
        return float(np.max(np.abs(candidates)))


@dataclass(frozen=True)
class Tone:
    """One modulation tone: amplitude, phase offset and frequency schedule."""

    epsilon: float
    phi: float
    schedule: FrequencySchedule

    def __post_init__(self):
        if self.epsilon < 0:
            raise ConfigError("tone amplitude epsilon must be non-negative")

    def perturbative_ok(self, params: SystemParams) -> bool:
        return self.epsilon <= params.g and self.epsilon < 0.2 * params.omega0


@dataclass(frozen=True)
class ModulationSpec:
    """Atomic frequency Omega(t) = omega0 + sum_k eps_k sin(eta_k(t) t + phi_k)."""

    omega0: float
    tones: tuple

    def __post_init__(self):
        object.__setattr__(self, "tones", tuple(self.tones))

    @classmethod
    def single_tone(cls, omega0, epsilon, eta, phi=0.0) -> "ModulationSpec":
        return cls(omega0, (Tone(epsilon, phi, FrequencySchedule(eta)),))

    def omega_at(self, t):
        out = np.full(np.shape(t), self.omega0, dtype=float) if np.ndim(t) else self.omega0
        for tone in self.tones:
            out = out + tone.epsilon * np.sin(tone.schedule.phase(t) + tone.phi)
        return out

    def omega_dot_at(self, t):
        out = np.zeros(np.shape(t)) if np.ndim(t) else 0.0
        for tone in self.tones:
            out = out + tone.epsilon * np.cos(
                tone.schedule.phase(t) + tone.phi
            ) * tone.schedule.phase_rate(t)
        return out

    def drive_shift(self, t):
        """(Omega(t) - omega0) / 2, the coefficient of sigma_z added to the static Hamiltonian."""
        return 0.5 * (self.omega_at(t) - self.omega0)

    @property
    def shift_bound(self) -> float:
        """Upper bound on |drive_shift|."""
        return 0.5 * sum(tone.epsilon for tone in self.tones)

    def max_drive_frequency(self, t_span) -> float:
        rates = [tone.schedule.max_rate(t_span) for tone in self.tones if tone.epsilon > 0]
        return max(rates) if rates else 0.0

    def warn_if_not_perturbative(self, params: SystemParams) -> None:
        for k, tone in enumerate(self.tones):
            if tone.epsilon > 0 and not tone.perturbative_ok(params):
                warnings.warn(
                    f"tone {k} outside perturbative regime: eps={tone.epsilon:.4g}, "
                    f"g={params.g:.4g}, omega0={params.omega0:.4g}",
                    stacklevel=2,
                )


def omega_at(spec: ModulationSpec, t):
    """Drive value Omega(t); thin functional wrapper over the spec method."""
    return spec.omega_at(t)


def omega_dot_at(spec: ModulationSpec, t):
    """Exact derivative dOmega/dt (never finite-differenced)."""
    return spec.omega_dot_at(t)


def tones_from_records(omega0: float, records: Sequence[dict], omega: float, g: float) -> ModulationSpec:
    """Build a ModulationSpec from config records with dimensionless ratios.

    Each record carries epsilon_over_omega0, phase and either eta_over_omega
    or a chirp table {eta0_over_omega, slope_over_omega2, t_start, t_end}.
    """
    tones = []
    for k, rec in enumerate(records):
        where = f"modulation.tones[{k}]"
        if "epsilon_over_omega0" not in rec:
            raise ConfigError(f"{where}: missing field epsilon_over_omega0")
        eps = float(rec["epsilon_over_omega0"]) * omega0
        phi = float(rec.get("phase", 0.0))
        if "chirp" in rec:
            ch = rec["chirp"]
            for fieldname in ("eta0_over_omega", "slope_over_omega2"):
                if fieldname not in ch:
                    raise ConfigError(f"{where}.chirp: missing field {fieldname}")
            sched = FrequencySchedule(
                eta0=float(ch["eta0_over_omega"]) * omega,
                slope=float(ch["slope_over_omega2"]) * omega**2,
                t_start=float(ch["t_start"]) if "t_start" in ch else None,
                t_end=float(ch["t_end"]) if "t_end" in ch else None,
            )
        elif "eta_over_omega" in rec:
            sched = FrequencySchedule(eta0=float(rec["eta_over_omega"]) * omega)
        else:
            raise ConfigError(f"{where}: needs eta_over_omega or a chirp table")
        tones.append(Tone(eps, phi, sched))
    return ModulationSpec(omega0, tuple(tones))
