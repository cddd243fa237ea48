"""Co-moving packets: how E_P approaches its stationary value.

    python scripts/comoving_plateau.py [t_max_fs]

Prints E_P every 2 ps for both statistics, running in a box just large enough
for the requested horizon.
"""

import sys

from qwalk import continuum as cont


def main():
    t_max = float(sys.argv[1]) if len(sys.argv) > 1 else 40000.0
    base = cont.preset("comoving", "fermion")
    need = base.x0_nm + 10 * base.sigma_nm + base.max_speed * t_max
    half_length = 10.0 * (int(need / 10.0) + 1)
    runs = {}
    for st in ("fermion", "boson"):
        cfg = cont.preset("comoving", st, t_max_fs=t_max, half_length_nm=half_length, output_every_fs=2000.0)
        runs[st] = cont.simulate(cfg)
    print(f"box half-length {half_length:.0f} nm")
    print(f"{'t (ps)':>7} {'fermion':>9} {'boson':>9}")
    for f, b in zip(runs["fermion"], runs["boson"]):
        print(f"{f.time_fs / 1000:7.1f} {f.ep:9.5f} {b.ep:9.5f}")


if __name__ == "__main__":
    main()
