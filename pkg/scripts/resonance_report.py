#!/usr/bin/env python3
"""Print the resonance table for the stock working point (or a scenario)."""

import argparse

from rabiwork import SystemParams, runner


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=None, help="scenario file or bundled name")
    args = parser.parse_args()
    if args.config:
        scenario = runner.load_bundled(args.config)
        resolved = runner.resolve_scenario(scenario)
        params, eps = resolved.params, resolved.spec.tones[0].epsilon
        tau = resolved.tau
    else:
        params, eps = SystemParams(1.0, 0.6, 0.05), 0.03
        tau = 2.0 * params.delta_plus / (params.g * eps)
    rows = runner.resonance_table(params, eps, tau=tau)
    print(runner.format_resonance_table(rows))


if __name__ == "__main__":
    main()
