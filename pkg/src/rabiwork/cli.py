"""Command-line entry points.

Exit codes: 0 success, 2 configuration error, 3 physics audit failure.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, PhysicsAuditError, TruncationError
from . import runner


def _add_run(sub):
    p = sub.add_parser("run", help="run one scenario file and write CSV output")
    p.add_argument("--config", required=True, help="scenario TOML path or bundled name")
    p.add_argument("--out", default="runs", help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="accepted for symmetry; single scenario")


def _add_resonances(sub):
    p = sub.add_parser("resonances", help="print the resonance table for a scenario's parameters")
    p.add_argument("--config", required=True)


def _add_figures(sub):
    p = sub.add_parser("figures", help="reproduce the bundled figure datasets")
    p.add_argument("--select", required=True, help="fig1 | fig2 | fig3 | all")
    p.add_argument("--out", default="runs")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--t-end-tau", type=float, default=None, help="override run length (in tau)")
    p.add_argument("--records", type=int, default=None, help="override sample count")


def _add_validate(sub):
    p = sub.add_parser("validate", help="schema and physics flags only; no propagation")
    p.add_argument("--config", required=True)


def _load(config: str):
    try:
        return runner.load_scenario(config)
    except ConfigError:
        # fall back to a bundled scenario name
        return runner.load_bundled(config)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rabiwork",
        description="Modulated Rabi model: quantum work, heat and excitation dynamics",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run(sub)
    _add_resonances(sub)
    _add_figures(sub)
    _add_validate(sub)
    args = parser.parse_args(argv)

    try:
        if args.command == "run":
            scenario = _load(args.config)
            traj, paths = runner.run_scenario(scenario, args.out)
            for name, path in paths.items():
                print(f"{name}: {path}")
            for line in traj.audit.warnings:
                print(f"note: {line}")
        elif args.command == "resonances":
            scenario = _load(args.config)
            resolved = runner.resolve_scenario(scenario)
            rows = runner.resonance_table(
                resolved.params, resolved.spec.tones[0].epsilon,
                resolved.spec.tones[0].phi, tau=resolved.tau,
            )
            print(runner.format_resonance_table(rows))
        elif args.command == "figures":
            paths = runner.reproduce_figures(
                args.select, args.out, jobs=args.jobs,
                t_end_override_tau=args.t_end_tau, records=args.records,
            )
            for name, path in sorted(paths.items()):
                print(f"{name}: {path}")
        elif args.command == "validate":
            scenario = _load(args.config)
            resolved = runner.resolve_scenario(scenario)
            flags = runner.scenario_physics_warnings(resolved)
            print(f"{scenario.name}: schema OK; params hash {scenario.params_hash()}")
            for flag in flags:
                print(f"warning: {flag}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (PhysicsAuditError, TruncationError) as exc:
        print(f"physics audit failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
