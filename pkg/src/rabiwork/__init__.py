"""Simulator of the externally modulated quantum Rabi model.

Computes quantum-thermodynamic work, heat and excitation number under
unitary and dissipative evolution, with built-in perturbative dressed-state
oracles for the photon pair-creation and two-excitation annihilation
work-extraction protocols.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    NumericalCorruptionError,
    PhysicsAuditError,
    RabiworkError,
    StateError,
    TruncationError,
)
from .hilbert import (
    ATOM_MAJOR,
    JointSpace,
    QuantumState,
    SystemParams,
    basis_state,
    build_space,
    fock_ground_state,
    thermal_ground_state,
)
from .modulation import FrequencySchedule, ModulationSpec, Tone, omega_at, omega_dot_at
from .propagate import (
    IntegratorConfig,
    LindbladParams,
    ZoomWindow,
    build_h_const,
    evolve_lindblad,
    evolve_unitary,
    hamiltonian_at,
)
from .thermo import (
    Trajectory,
    excitations,
    first_law_residual,
    internal_energy,
    work_energy_relation_check,
)

__all__ = [
    "ATOM_MAJOR",
    "ConfigError",
    "FrequencySchedule",
    "IntegratorConfig",
    "JointSpace",
    "LindbladParams",
    "ModulationSpec",
    "NumericalCorruptionError",
    "PhysicsAuditError",
    "QuantumState",
    "RabiworkError",
    "StateError",
    "SystemParams",
    "Tone",
    "Trajectory",
    "TruncationError",
    "ZoomWindow",
    "basis_state",
    "build_h_const",
    "build_space",
    "evolve_lindblad",
    "evolve_unitary",
    "excitations",
    "first_law_residual",
    "fock_ground_state",
    "hamiltonian_at",
    "internal_energy",
    "omega_at",
    "omega_dot_at",
    "thermal_ground_state",
    "work_energy_relation_check",
]
