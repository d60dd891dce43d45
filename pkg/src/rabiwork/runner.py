"""Scenario configuration, canned figure reproductions and CSV persistence.

Scenarios are TOML files with all frequencies entered as dimensionless
ratios; internally omega = hbar = 1.  Energies are reported in units of
hbar*omega and times both as omega*t and t/tau, where the drive timescale
tau is defined from the first tone via 1/tau = g * eps^(1) / (2 delta_plus).
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import __version__
from .dressed import resonance_frequency
from .errors import ConfigError
from .hilbert import (
    JointSpace,
    QuantumState,
    SystemParams,
    build_space,
    fock_ground_state,
    thermal_ground_state,
)
from .modulation import ModulationSpec, tones_from_records
from .propagate import (
    IntegratorConfig,
    LindbladParams,
    ZoomWindow,
    evolve_lindblad,
    evolve_unitary,
)
from .thermo import Trajectory

CSV_COLUMNS = (
    "t_over_tau",
    "t_omega",
    "W_over_homega",
    "Q_over_homega",
    "U_over_homega",
    "N",
    "P_e",
    "sigma_z",
    "top_fock_pop",
)

FIGURE_SCENARIOS = {
    "fig1": ("fig1a_dce", "fig1b_ajc", "fig1c_jc", "fig1d_adce"),
    "fig2": ("fig2a_eta1", "fig2a_eta2", "fig2a_twotone", "fig2d_eta1_dissipative"),
    "fig3": ("fig3a_lz", "fig3b_lz_dissipative", "fig3c_lz6_dissipative"),
}


@dataclass
class Scenario:
    """Parsed scenario file, still in dimensionless-ratio form."""

    name: str
    system: dict
    initial_state: dict
    tones: list
    evolution: dict
    run: dict
    raw: dict = field(repr=False, default_factory=dict)

    def params_hash(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


@dataclass
class ResolvedScenario:
    scenario: Scenario
    params: SystemParams
    space: JointSpace
    state: QuantumState
    spec: ModulationSpec
    lindblad: Optional[LindbladParams]
    integrator: IntegratorConfig
    t_end: float
    tau: float


def _require(table: dict, key: str, where: str):
    if key not in table:
        raise ConfigError(f"{where}: missing field {key}")
    return table[key]


def load_scenario(path) -> Scenario:
    """Parse and schema-check one scenario file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"scenario file not found: {path}")
    try:
        raw = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: not valid TOML: {exc}") from exc

    name = raw.get("name", path.stem)
    system = _require(raw, "system", str(path))
    for fieldname in ("g_over_omega", "delta_minus_over_g", "n_max"):
        _require(system, fieldname, "system")
    initial = _require(raw, "initial_state", str(path))
    kind = _require(initial, "kind", "initial_state")
    if kind == "fock":
        _require(initial, "n", "initial_state")
    elif kind == "thermal":
        _require(initial, "n_bar", "initial_state")
    else:
        raise ConfigError(
            f"initial_state.kind: {kind!r} not supported (expected fock or thermal)"
        )
    modulation = _require(raw, "modulation", str(path))
    tones = _require(modulation, "tones", "modulation")
    if not isinstance(tones, list) or not tones:
        raise ConfigError("modulation.tones: need a non-empty tone list")
    evolution = raw.get("evolution", {"mode": "unitary"})
    mode = evolution.get("mode", "unitary")
    if mode not in ("unitary", "lindblad"):
        raise ConfigError(f"evolution.mode: {mode!r} not supported")
    if mode == "lindblad":
        for fieldname in ("kappa_over_g", "gamma_over_g"):
            _require(evolution, fieldname, "evolution")
    run = raw.get("run", {})
    if "t_end_tau" not in run and "t_end_omega" not in run:
        raise ConfigError("run: needs t_end_tau or t_end_omega")
    return Scenario(name, system, initial, tones, evolution, run, raw)


def resolve_scenario(scenario: Scenario) -> ResolvedScenario:
    """Turn ratios into absolute parameters (omega = 1) and build all objects."""
    sys_tab = scenario.system
    g = float(sys_tab["g_over_omega"])
    delta_minus = float(sys_tab["delta_minus_over_g"]) * g
    omega = 1.0
    omega0 = omega - delta_minus
    params = SystemParams(omega=omega, omega0=omega0, g=g)
    space = build_space(int(sys_tab["n_max"]))

    init = scenario.initial_state
    if init["kind"] == "fock":
        state = fock_ground_state(space, int(init["n"]))
    else:
        state = thermal_ground_state(
            space, float(init["n_bar"]), bool(init.get("auto_renormalize", False))
        )

    spec = tones_from_records(omega0, scenario.tones, omega, g)
    eps1 = spec.tones[0].epsilon
    tau = 2.0 * params.delta_plus / (params.g * eps1) if eps1 > 0 else 1.0 / omega

    evo = scenario.evolution
    lindblad = None
    if evo.get("mode", "unitary") == "lindblad":
        kappa = float(evo["kappa_over_g"]) * g
        gamma = float(evo["gamma_over_g"]) * g
        if "n_a" in evo and "n_c" in evo:
            lindblad = LindbladParams(
                kappa, gamma, float(evo["n_c"]), float(evo["n_a"]),
                k_b_t_r=float(evo["k_b_t_r_over_omega"]) if "k_b_t_r_over_omega" in evo else None,
            )
        elif "n_c" in evo:
            lindblad = LindbladParams.from_cavity_occupancy(
                params, kappa, gamma, float(evo["n_c"])
            )
        elif "k_b_t_r_over_omega" in evo:
            lindblad = LindbladParams.from_reservoir_temperature(
                params, kappa, gamma, float(evo["k_b_t_r_over_omega"]) * omega
            )
        else:
            lindblad = LindbladParams(kappa, gamma)

    run = scenario.run
    t_end = (
        float(run["t_end_tau"]) * tau if "t_end_tau" in run else float(run["t_end_omega"])
    )
    zooms = tuple(
        ZoomWindow(
            name=z.get("name", f"zoom{i}"),
            t_start=float(z["t_start_tau"]) * tau,
            n_periods=float(z.get("n_drive_periods", 10)),
            samples_per_period=int(z.get("samples_per_period", 50)),
        )
        for i, z in enumerate(run.get("zoom", []))
    )
    integ = IntegratorConfig(
        method=run.get("integrator", "cf4"),
        steps_per_drive_period=int(run.get("steps_per_drive_period", 50)),
        record_count=int(run.get("records", 2000)),
        zoom_windows=zooms,
    )
    return ResolvedScenario(
        scenario, params, space, state, spec, lindblad, integ, t_end, tau
    )


def scenario_physics_warnings(resolved: ResolvedScenario) -> list:
    """Dispersive/perturbative flags without running anything."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        resolved.params.warn_if_not_dispersive(resolved.space.n_max)
        resolved.spec.warn_if_not_perturbative(resolved.params)
    return [str(w.message) for w in caught]


def run_scenario(
    scenario: Scenario,
    out_dir=None,
    t_end_override_tau: Optional[float] = None,
    record_states: bool = False,
    enforce_audit: bool = True,
):
    """Evolve one scenario; optionally persist CSV files.

    Returns (trajectory, {csv name: path}) with one file per zoom window in
    addition to the main table.
    """
    resolved = resolve_scenario(scenario)
    t_end = (
        t_end_override_tau * resolved.tau if t_end_override_tau is not None else resolved.t_end
    )
    integ = resolved.integrator
    if record_states:
        from dataclasses import replace

        integ = replace(integ, record_states=True)
    if resolved.lindblad is None:
        traj = evolve_unitary(
            resolved.state, resolved.space, resolved.params, resolved.spec,
            (0.0, t_end), integ, enforce_audit=enforce_audit,
        )
    else:
        traj = evolve_lindblad(
            resolved.state, resolved.space, resolved.params, resolved.spec,
            resolved.lindblad, (0.0, t_end), integ, enforce_audit=enforce_audit,
        )
    traj.metadata.update(
        scenario=scenario.name,
        params_hash=scenario.params_hash(),
        tau_omega=resolved.tau,
        mode="lindblad" if resolved.lindblad is not None else "unitary",
    )
    paths = {}
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        main_path = out_dir / f"{scenario.name}.csv"
        write_trajectory_csv(traj, resolved.tau, main_path)
        paths[scenario.name] = main_path
        for zoom_name, positions in traj.zoom.items():
            zpath = out_dir / f"{scenario.name}__{zoom_name}.csv"
            write_trajectory_csv(traj, resolved.tau, zpath, subset=positions)
            paths[f"{scenario.name}__{zoom_name}"] = zpath
    return traj, paths


def write_trajectory_csv(traj: Trajectory, tau: float, path, subset=None) -> None:
    """Write the fixed-schema CSV with '#' metadata comment lines."""
    idx = np.arange(len(traj.times)) if subset is None else np.asarray(subset)
    cols = np.column_stack(
        [
            traj.times[idx] / tau,
            traj.times[idx],
            traj.w[idx],
            traj.q[idx],
            traj.u[idx],
            traj.n_exc[idx],
            traj.p_e[idx],
            traj.sigma_z[idx],
            traj.top_fock_pop[idx],
        ]
    )
    lines = [
        f"# scenario: {traj.metadata.get('scenario', 'unnamed')}",
        f"# params_hash: {traj.metadata.get('params_hash', 'n/a')}",
        f"# code_version: {__version__}",
        f"# tau_omega: {tau:.12e}",
        f"# mode: {traj.metadata.get('mode', 'unitary')}",
        ",".join(CSV_COLUMNS),
    ]
    lines.extend(",".join(f"{v:.12e}" for v in row) for row in cols)
    Path(path).write_text("\n".join(lines) + "\n")


def bundled_scenario_path(name: str) -> Path:
    """Path of one of the packaged scenario files."""
    root = resources.files("rabiwork") / "scenarios" / f"{name}.toml"
    if not root.is_file():
        raise ConfigError(f"no bundled scenario named {name!r}")
    return Path(str(root))


def load_bundled(name: str) -> Scenario:
    return load_scenario(bundled_scenario_path(name))


def bundled_scenario_names() -> list:
    root = resources.files("rabiwork") / "scenarios"
    return sorted(p.stem for p in root.iterdir() if p.name.endswith(".toml"))


# ---------------------------------------------------------------------------
# resonance table


RESONANCE_ROWS = (
    ("dce", 0),
    ("ajc", 0),
    ("jc", 1),
    ("jc", 2),
    ("jc", 3),
    ("jc", 4),
    ("adce", 3),
    ("adce", 4),
    ("adce", 5),
)


def resonance_table(params: SystemParams, epsilon: float, phi: float = 0.0, tau: Optional[float] = None):
    """Rows of (regime, J, eta_spectral, eta_closed, |lam|, tau_m, flag)."""
    rows = []
    for regime, j in RESONANCE_ROWS:
        spectral = resonance_frequency(params, regime, max(j, 1), epsilon, phi, mode="spectral")
        closed = resonance_frequency(params, regime, max(j, 1), epsilon, phi, mode="closed_form")
        lam_abs = abs(spectral.lam)
        tau_m = spectral.rabi_half_period
        rows.append(
            {
                "regime": regime,
                "J": j,
                "eta_spectral_over_omega": spectral.eta_res / params.omega,
                "eta_closed_over_omega": closed.eta_res / params.omega,
                "lam_abs_over_omega": lam_abs / params.omega,
                "tau_m_omega": tau_m,
                "tau_m_over_tau": tau_m / tau if tau else float("nan"),
                "flag": "" if lam_abs > 0 else "no transfer",
            }
        )
    return rows


def format_resonance_table(rows) -> str:
    header = (
        f"{'regime':<6} {'J':>2} {'eta_spec/omega':>15} {'eta_closed/omega':>17} "
        f"{'|lam|/omega':>12} {'tau_m*omega':>12}  flag"
    )
    out = [header]
    for r in rows:
        out.append(
            f"{r['regime']:<6} {r['J']:>2} {r['eta_spectral_over_omega']:>15.6f} "
            f"{r['eta_closed_over_omega']:>17.6f} {r['lam_abs_over_omega']:>12.4e} "
            f"{r['tau_m_omega']:>12.4e}  {r['flag']}"
        )
    return "\n".join(out)


# ---------------------------------------------------------------------------
# figure reproduction


def _run_named(args):
    name, out_dir, t_end_override_tau, records = args
    scenario = load_bundled(name)
    if records is not None:
        scenario.run["records"] = records
    _, paths = run_scenario(scenario, out_dir, t_end_override_tau=t_end_override_tau)
    return paths


def reproduce_figures(
    selector: str,
    out_dir,
    jobs: int = 1,
    t_end_override_tau: Optional[float] = None,
    records: Optional[int] = None,
) -> dict:
    """Run the bundled scenario set behind one figure (or all of them)."""
    if selector == "all":
        names = [n for group in FIGURE_SCENARIOS.values() for n in group]
    elif selector in FIGURE_SCENARIOS:
        names = list(FIGURE_SCENARIOS[selector])
    else:
        valid = ", ".join(list(FIGURE_SCENARIOS) + ["all"])
        raise ConfigError(f"unknown figure selector {selector!r}; expected one of: {valid}")
    all_paths = {}
    tasks = [(name, out_dir, t_end_override_tau, records) for name in names]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for paths in pool.map(_run_named, tasks):
                all_paths.update(paths)
    else:
        for task in tasks:
            all_paths.update(_run_named(task))
    return all_paths
