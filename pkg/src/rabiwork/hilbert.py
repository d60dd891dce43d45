"""Truncated joint Hilbert space of a single cavity mode and a two-level atom.

Basis ordering is atom-major throughout the package:

    index = atom * (n_max + 1) + n,   atom 0 = |g>, atom 1 = |e>

i.e. |g,0>, |g,1>, ..., |g,n_max>, |e,0>, ..., |e,n_max>.  Every module
consumes this single convention via :data:`ATOM_MAJOR`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, StateError, TruncationError

ATOM_MAJOR = "atom-major: index = atom*(n_max+1) + n, atom in (g=0, e=1)"

#: minimum truncation: the three-photon annihilation channel needs |g,3>
MIN_N_MAX = 3

NORM_TOL = 1e-9
TRACE_TOL = 1e-9
HERM_TOL = 1e-9
POSITIVITY_TOL = -1e-8


@dataclass(frozen=True, eq=False)
class JointSpace:
    """Dense operators on the truncated Fock (x) qubit space."""

    n_max: int
    dim: int
    a: np.ndarray
    adag: np.ndarray
    num: np.ndarray
    sz: np.ndarray
    sp: np.ndarray
    sm: np.ndarray
    eye: np.ndarray
    # diagonal views used in hot loops
    num_diag: np.ndarray = field(repr=False, default=None)
    sz_diag: np.ndarray = field(repr=False, default=None)
    pe_diag: np.ndarray = field(repr=False, default=None)

    @property
    def n_fock(self) -> int:
        return self.n_max + 1

    def index(self, atom: str, n: int) -> int:
        """Flat index of the bare state |atom, n>."""
        if atom not in ("g", "e"):
            raise ConfigError(f"atom label must be 'g' or 'e', got {atom!r}")
        if not 0 <= n <= self.n_max:
            raise ConfigError(f"Fock index {n} outside [0, {self.n_max}]")
        return (0 if atom == "g" else 1) * self.n_fock + n

    def top_fock_selector(self, n_levels: int = 2) -> np.ndarray:
        """0/1 vector selecting the n_levels highest Fock states (both atom sectors)."""
        sel = np.zeros(self.dim)
        nf = self.n_fock
        sel[nf - n_levels:nf] = 1.0
        sel[2 * nf - n_levels:] = 1.0
        return sel


def build_space(n_max: int) -> JointSpace:
    """Construct the joint space with all cached dense operators.

    n_max must be at least 3 so the |g,3> <-> |e,0> channel is representable.
    """
    if int(n_max) != n_max or n_max < MIN_N_MAX:
        raise ConfigError(f"n_max must be an integer >= {MIN_N_MAX}, got {n_max}")
    n_max = int(n_max)
    nf = n_max + 1
    a_f = np.diag(np.sqrt(np.arange(1, nf, dtype=float)), 1).astype(complex)
    eye_a = np.eye(2, dtype=complex)
    sz_a = np.diag([-1.0, 1.0]).astype(complex)
    sp_a = np.zeros((2, 2), dtype=complex)
    sp_a[1, 0] = 1.0

    a = np.kron(eye_a, a_f)
    adag = a.conj().T
    num = adag @ a
    sz = np.kron(sz_a, np.eye(nf, dtype=complex))
    sp = np.kron(sp_a, np.eye(nf, dtype=complex))
    sm = sp.conj().T

    sz_diag = np.real(np.diag(sz)).copy()
    return JointSpace(
        n_max=n_max,
        dim=2 * nf,
        a=a,
        adag=adag,
        num=num,
        sz=sz,
        sp=sp,
        sm=sm,
        eye=np.eye(2 * nf, dtype=complex),
        num_diag=np.real(np.diag(num)).copy(),
        sz_diag=sz_diag,
        pe_diag=(sz_diag + 1.0) / 2.0,
    )


@dataclass(frozen=True)
class SystemParams:
    """Static system frequencies (hbar = 1): cavity omega, mean atomic omega0, coupling g."""

    omega: float
    omega0: float
    g: float

    def __post_init__(self):
        if self.g <= 0 or self.omega <= 0 or self.omega0 <= 0:
            raise ConfigError("omega, omega0 and g must all be positive")
        if self.delta_minus == 0:
            raise ConfigError("degenerate detuning: omega - omega0 must not vanish")

    @property
    def delta_minus(self) -> float:
        return self.omega - self.omega0

    @property
    def delta_plus(self) -> float:
        return self.omega + self.omega0

    @property
    def shift_minus(self) -> float:
        """Dispersive shift g^2 / (omega - omega0)."""
        return self.g**2 / self.delta_minus

    @property
    def shift_plus(self) -> float:
        """Bloch-Siegert-type shift g^2 / (omega + omega0)."""
        return self.g**2 / self.delta_plus

    @property
    def kerr_alpha(self) -> float:
        return self.g**4 / self.delta_minus**3

    @property
    def detuning_sign(self) -> int:
        return 1 if self.delta_minus > 0 else -1

    def dispersive_ok(self, n_max: int) -> bool:
        return self.g * np.sqrt(n_max) < abs(self.delta_minus) / 2

    def warn_if_not_dispersive(self, n_max: int) -> None:
        if not self.dispersive_ok(n_max):
            warnings.warn(
                f"outside dispersive regime: g*sqrt(n_max)={self.g * np.sqrt(n_max):.4g} "
                f">= |delta_minus|/2={abs(self.delta_minus) / 2:.4g}",
                stacklevel=2,
            )


@dataclass(eq=False)
class QuantumState:
    """Pure amplitude vector or density matrix on the joint space."""

    kind: str  # "pure" | "mixed"
    data: np.ndarray

    @classmethod
    def pure(cls, vec: np.ndarray) -> "QuantumState":
        vec = np.asarray(vec, dtype=complex)
        state = cls("pure", vec)
        state.validate()
        return state

    @classmethod
    def mixed(cls, rho: np.ndarray) -> "QuantumState":
        rho = np.asarray(rho, dtype=complex)
        state = cls("mixed", rho)
        state.validate()
        return state

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def validate(self, check_positivity: bool = False) -> None:
        if self.kind == "pure":
            if self.data.ndim != 1:
                raise StateError("pure state payload must be a vector")
            norm = np.linalg.norm(self.data)
            if abs(norm - 1.0) > NORM_TOL:
                raise StateError(f"pure state norm {norm} deviates from 1 beyond {NORM_TOL}")
        elif self.kind == "mixed":
            rho = self.data
            if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
                raise StateError("mixed state payload must be a square matrix")
            if np.max(np.abs(rho - rho.conj().T)) > HERM_TOL:
                raise StateError("density matrix is not Hermitian within tolerance")
            tr = np.trace(rho).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise StateError(f"density matrix trace {tr} deviates from 1 beyond {TRACE_TOL}")
            if check_positivity:
                lo = np.linalg.eigvalsh(rho)[0]
                if lo < POSITIVITY_TOL:
                    raise StateError(f"density matrix minimum eigenvalue {lo} below {POSITIVITY_TOL}")
        else:
            raise StateError(f"unknown state kind {self.kind!r}")

    def as_density(self) -> np.ndarray:
        if self.kind == "pure":
            return np.outer(self.data, self.data.conj())
        return self.data

    def expectation(self, op: np.ndarray) -> complex:
        if self.kind == "pure":
            return complex(np.vdot(self.data, op @ self.data))
        return complex(np.trace(op @ self.data))

    def purity(self) -> float:
        if self.kind == "pure":
            return 1.0
        return float(np.real(np.trace(self.data @ self.data)))


def fock_ground_state(space: JointSpace, n: int) -> QuantumState:
    """Pure |g,n>."""
    if not 0 <= n <= space.n_max:
        raise ConfigError(f"Fock occupation {n} outside truncation [0, {space.n_max}]")
    vec = np.zeros(space.dim, dtype=complex)
    vec[space.index("g", n)] = 1.0
    return QuantumState.pure(vec)


def basis_state(space: JointSpace, atom: str, n: int) -> QuantumState:
    """Pure bare state |atom, n>."""
    vec = np.zeros(space.dim, dtype=complex)
    vec[space.index(atom, n)] = 1.0
    return QuantumState.pure(vec)


def thermal_photon_populations(n_bar: float, n_max: int) -> np.ndarray:
    """p_n = n_bar^n / (n_bar + 1)^(n+1) for n = 0..n_max (not renormalized)."""
    if n_bar < 0:
        raise ConfigError("n_bar must be non-negative")
    if n_bar == 0:
        p = np.zeros(n_max + 1)
        p[0] = 1.0
        return p
    r = n_bar / (n_bar + 1.0)
    return r ** np.arange(n_max + 1) / (n_bar + 1.0)


def thermal_tail_mass(n_bar: float, n_max: int) -> float:
    """Exact probability left above the truncation, sum_{n>n_max} p_n = r^(n_max+1)."""
    if n_bar <= 0:
        return 0.0
    r = n_bar / (n_bar + 1.0)
    return r ** (n_max + 1)


THERMAL_TAIL_TOL = 1e-4


def thermal_ground_state(
    space: JointSpace, n_bar: float, auto_renormalize: bool = False
) -> QuantumState:
    """Mixed |g><g| (x) thermal field state, diagonal in |g,n>.

    Raises TruncationError when the discarded tail exceeds THERMAL_TAIL_TOL
    unless auto_renormalize is set, in which case the truncated distribution
    is rescaled to unit trace.
    """
    tail = thermal_tail_mass(n_bar, space.n_max)
    if tail >= THERMAL_TAIL_TOL and not auto_renormalize:
        raise TruncationError(
            f"thermal tail mass {tail:.3e} above {THERMAL_TAIL_TOL:.0e} at "
            f"n_max={space.n_max}; raise n_max or enable auto_renormalize"
        )
    p = thermal_photon_populations(n_bar, space.n_max)
    p = p / p.sum()
    rho = np.zeros((space.dim, space.dim), dtype=complex)
    for n in range(space.n_fock):
        rho[space.index("g", n), space.index("g", n)] = p[n]
    return QuantumState.mixed(rho)
