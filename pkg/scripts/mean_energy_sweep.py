#!/usr/bin/env python3
"""Mean harvested energy vs activation threshold for several antenna counts.

Log-spaced threshold grid; one analytic column per antenna count plus a
simulation column with its standard error.  The 2- and 8-antenna curves
cross once on this grid, which is the interesting feature to plot.
"""
import argparse
import math
import pathlib

import numpy as np

from beamharvest import SystemParams, mean_harvested, run_energy_trials


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--antenna-list", default="2,4,8")
    ap.add_argument("--grid", default="1e-4:2e-2:25",
                    help="start:stop:count, log-spaced thresholds [J]")
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=2026)
    ap.add_argument("--out", type=pathlib.Path,
                    default=pathlib.Path("out/mean_energy_sweep.csv"))
    args = ap.parse_args()

    start, stop, count = args.grid.split(":")
    grid = np.geomspace(float(start), float(stop), int(count))
    antenna_list = [int(v) for v in args.antenna_list.split(",")]
    seeds = np.random.SeedSequence(args.seed).generate_state(
        len(grid) * len(antenna_list))

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w") as fh:
        fh.write("antennas,E_th,mean_analytic,mean_mc,se\n")
        for j, m_total in enumerate(antenna_list):
            for i, e_th in enumerate(grid):
                p = SystemParams(antennas=m_total, users=m_total,
                                 energy_threshold=float(e_th))
                stats = run_energy_trials(
                    p, args.trials, int(seeds[j * len(grid) + i]))
                mc = stats.energy_samples.mean()
                se = stats.energy_samples.std(ddof=1) / math.sqrt(args.trials)
                fh.write(f"{m_total},{e_th:.17g},{mean_harvested(p):.17g},"
                         f"{mc:.17g},{se:.17g}\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
