"""Command-line entry point.

    qwalk run <config-path>
    qwalk preset <fig1|fig2|fig3|fig4|fig5|saturation>

Exit codes: 0 success, 2 invalid config, 3 numerical invariant breach,
4 output I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from importlib import resources
from pathlib import Path

from . import continuum as cont
from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .emit import emit_gamma_map, write_csv, write_json
from .entanglement import (
    Partition,
    SectorEmpty,
    reduced_density_matrix,
    saturation_interval,
    sector_weights,
    von_neumann_entropy,
)
from .ring import InvariantError, RingConfig, evolve

log = logging.getLogger("qwalk")

PRESETS = ("fig1", "fig2", "fig3", "fig4", "fig5", "saturation")
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
SECTOR_SUM_TOL = 1e-9


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}")
    return resources.files("qwalk").joinpath("presets", f"{name}.ini").read_text(encoding="utf-8")


def output_dir(cfg: ExperimentConfig) -> Path:
    return Path(os.environ.get("QWALK_OUT_DIR") or cfg.output_dir)


def _pair_tag(j: int, r: int, n: int) -> str:
    return f"{j}{r}" if n < 10 else f"{j}_{r}"


def _ring_row(cfg: RingConfig, pair, part, gt, ordering):
    state = evolve(cfg, pair, gt)
    w = sector_weights(state, part)
    total = w.p0 + w.p1 + w.p2
    if abs(total - 1) > SECTOR_SUM_TOL:
        raise InvariantError(f"sector weights sum to {total!r} at gamma*t={gt}")
    try:
        s = von_neumann_entropy(reduced_density_matrix(state, part, ordering))
    except SectorEmpty:
        s = 0.0
    return {"ep": w.p1 * s, "p1": w.p1, "entropy": s, "p0": w.p0, "p2": w.p2}


def run_ring(exp: ExperimentConfig, out: Path) -> list[Path]:
    spec = exp.ring
    written = []
    combos = [(n, st) for n in spec.n_sites for st in spec.statistics]
    meta = {"mode": "ring", "name": exp.name, "runs": []}
    for n, st in combos:
        cfg = RingConfig(n, spec.gamma, st)
        part = spec.partition_for(n)
        pairs = spec.initial_pairs(n)
        stem = exp.name if len(combos) == 1 else f"{exp.name}_N{n}_{st.value}"
        header = ["gamma_t"]
        for j, r in pairs:
            header += [f"{q}_{_pair_tag(j, r, n)}" for q in spec.quantities]
        rows = []
        for gt in spec.t_grid:
            row = [gt]
            for pair in pairs:
                values = _ring_row(cfg, pair, part, gt, spec.ordering)
                row += [values[q] for q in spec.quantities]
            rows.append(row)
        written.append(write_csv(out / f"{stem}.csv", header, rows))
        maps = []
        for gt in spec.gamma_map_times:
            for j, r in pairs:
                state = evolve(cfg, (j, r), gt)
                path = out / f"{stem}_gamma_{_pair_tag(j, r, n)}_t{gt:g}.csv"
                written.extend(emit_gamma_map(state, path))
                maps.append(path.name)
        meta["runs"].append({
            "csv": f"{stem}.csv",
            "n_sites": n,
            "statistics": st.value,
            "gamma": spec.gamma,
            "initial": [list(p) for p in pairs],
            "alice": part.alice_sites,
            "ordering": spec.ordering,
            "entropy": "von_neumann_nats",
            "n_points": len(spec.t_grid),
            "gamma_maps": maps,
        })
    written.append(write_json(out / f"{exp.name}.json", meta))
    return written


def sweep_saturation(exp: ExperimentConfig, out: Path) -> list[Path]:
    """One row per (N, statistics): the plateau length gamma*tau, or a flagged row."""
    spec = exp.sweep
    rows = []
    for n in spec.n_sites:
        for st in spec.statistics:
            cfg = RingConfig(n, spec.gamma, st)
            pair = (n // 2, n // 2 + 1)
            part = Partition.half(n)
            ep = [_ring_row(cfg, pair, part, gt, "partition")["ep"] for gt in spec.t_grid]
            tau = saturation_interval(spec.t_grid, ep)
            rows.append([n, st.value, tau, tau is None])
            if tau is None:
                log.warning("no plateau found for N=%d %s", n, st.value)
    header = ["n_sites", "statistics", "gamma_tau", "flagged"]
    written = [write_csv(out / f"{exp.name}.csv", header, rows)]
    written.append(write_json(out / f"{exp.name}.json", {
        "mode": "ring_sweep",
        "name": exp.name,
        "initial": "(N/2, N/2+1)",
        "partition": "half",
        "t_stop": spec.t_grid[-1],
        "n_points": len(spec.t_grid),
        "estimator": "saturation_interval(onset_fraction=0.95, rise_fraction=1.25, lookahead=5)",
    }))
    return written


def run_continuum(exp: ExperimentConfig, out: Path) -> list[Path]:
    spec = exp.continuum
    written = []
    meta = {"mode": "continuum", "name": exp.name, "method": spec.method, "runs": []}
    for scenario, ccfg in spec.configs:
        stem = f"{exp.name}_{scenario}_{ccfg.statistics.value}"
        samples = cont.simulate(ccfg, method=spec.method)
        rows = [[s.time_fs, s.ep, s.p1, s.norm, s.symmetry] for s in samples]
        written.append(write_csv(out / f"{stem}.csv", ["time_fs", "ep", "p1", "norm", "symmetry_residual"], rows))
        meta["runs"].append({
            "csv": f"{stem}.csv",
            "scenario": scenario,
            "statistics": ccfg.statistics.value,
            "mass_kg": ccfg.mass_kg,
            "sigma_nm": ccfg.sigma_nm,
            "x0_nm": ccfg.x0_nm,
            "k1_per_nm": ccfg.k1,
            "k2_per_nm": ccfg.k2,
            "half_length_nm": ccfg.half_length_nm,
            "dx_nm": ccfg.dx_nm,
            "dt_fs": ccfg.dt_fs,
            "t_max_fs": ccfg.t_max_fs,
            "entropy": "linear",
        })
    written.append(write_json(out / f"{exp.name}.json", meta))
    return written


RUNNERS = {"ring": run_ring, "ring_sweep": sweep_saturation, "continuum": run_continuum}


def execute(exp: ExperimentConfig) -> list[Path]:
    out = output_dir(exp)
    return RUNNERS[exp.mode](exp, out)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="qwalk", description="Two-particle quantum walk experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config file")
    p_run.add_argument("config")
    p_pre = sub.add_parser("preset", help="run a bundled preset")
    p_pre.add_argument("name", choices=PRESETS)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    try:
        if args.command == "run":
            exp = load_config(args.config)
        else:
            exp = parse_config(preset_text(args.name), f"preset:{args.name}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        written = execute(exp)
    except InvariantError as exc:
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in written:
        log.info("wrote %s", path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
