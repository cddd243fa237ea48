"""Plateau length gamma*tau against ring size, with a straight-line fit.

    python scripts/saturation_scaling.py [N ...]

The plateau ends when the two wavefronts leaving the initial pair meet again
on the far side of the ring, so gamma*tau should grow linearly with N.
"""

import sys

import numpy as np

from qwalk import Partition, RingConfig, Statistics, entanglement_of_particles, evolve, saturation_interval


def plateau_length(n, statistics, step=0.05):
    grid = np.round(np.arange(0.0, 0.5 * n + 10.0, step), 10)
    cfg = RingConfig(n, statistics=statistics)
    part = Partition.half(n)
    pair = (n // 2, n // 2 + 1)
    ep = [entanglement_of_particles(evolve(cfg, pair, gt), part) for gt in grid]
    return saturation_interval(grid, ep)


def main():
    sizes = [int(a) for a in sys.argv[1:]] or [30, 40, 50, 60, 70, 80, 90, 100, 120]
    print(f"{'N':>5} {'fermion':>9} {'boson':>9}")
    taus = {st: [] for st in Statistics}
    for n in sizes:
        row = {st: plateau_length(n, st) for st in Statistics}
        for st, tau in row.items():
            taus[st].append(np.nan if tau is None else tau)
        print(f"{n:>5} " + " ".join(f"{'-' if row[st] is None else f'{row[st]:.2f}':>9}" for st in Statistics))
    for st in Statistics:
        y = np.array(taus[st])
        ok = np.isfinite(y)
        slope, icept = np.polyfit(np.array(sizes)[ok], y[ok], 1)
        print(f"{st.value}: gamma*tau ~ {slope:.4f} N + {icept:.2f}")


if __name__ == "__main__":
    main()
