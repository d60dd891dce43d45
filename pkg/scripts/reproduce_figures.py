#!/usr/bin/env python3
"""Reproduce the bundled figure datasets (CSV files) from the command line.

Equivalent to `rabiwork figures`; kept as a standalone experiment script.
"""

import argparse

from rabiwork import runner


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--select", default="all", help="fig1 | fig2 | fig3 | all")
    parser.add_argument("--out", default="runs")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--t-end-tau", type=float, default=None)
    args = parser.parse_args()
    paths = runner.reproduce_figures(
        args.select, args.out, jobs=args.jobs, t_end_override_tau=args.t_end_tau
    )
    for name, path in sorted(paths.items()):
        print(f"{name}: {path}")


if __name__ == "__main__":
    main()
