import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwalk import cli
from qwalk.config import ConfigError, load_config, parse_config, parse_number
from qwalk.emit import format_float, write_csv
from qwalk.ring import InvariantError, RingConfig, Statistics, evolve

RING = """\
[run]
mode = ring
name = small
output_dir = out

[ring]
n_sites = 6
statistics = fermion, boson
initial = 1 2; 2 5
partition = 1-3
t_start = 0
t_stop = 2*pi
n_points = 9
quantities = ep, p1
gamma_map_times = 0, 1.5
"""


def run_main(args, monkeypatch, out):
    monkeypatch.setenv("QWALK_OUT_DIR", str(out))
    return cli.main(args)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_parse_number():
    assert parse_number("2*pi") == 2 * math.pi
    assert parse_number("-pi/4") == -math.pi / 4
    assert parse_number("1e-3") == 1e-3
    for bad in ("__import__('os')", "1/0", "pi(", "inf*1", "True"):
        with pytest.raises(ValueError):
            parse_number(bad)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_format_float_round_trips(x):
    s = format_float(x)
    assert float(s) == x
    assert len(s.split("e")[0].replace("-", "").replace(".", "")) == 17


def test_format_float_drops_negative_zero():
    assert format_float(-0.0) == "0.0000000000000000e+00"


def test_write_csv_layout(tmp_path):
    path = write_csv(tmp_path / "a" / "t.csv", ["n", "x", "ok"], [[1, 0.5, True], [2, None, False]])
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.decode("utf-8").splitlines() == ["n,x,ok", "1,5.0000000000000000e-01,true", "2,,false"]
    with pytest.raises(ValueError):
        write_csv(tmp_path / "b.csv", ["a"], [[1, 2]])


def test_parse_ring_config():
    cfg = parse_config(RING)
    assert cfg.mode == "ring"
    assert cfg.ring.initial == ((1, 2), (2, 5))
    assert cfg.ring.partition == (1, 2, 3)
    assert cfg.ring.statistics == (Statistics.FERMION, Statistics.BOSON)
    assert len(cfg.ring.t_grid) == 9 and cfg.ring.t_grid[-1] == pytest.approx(2 * math.pi)


@pytest.mark.parametrize("old,new,line", [
    ("partition = 1-3", "partition =", 10),
    ("partition = 1-3", "partition = 1-6", 10),
    ("n_sites = 6", "n_sites = 5", 7),
    ("initial = 1 2; 2 5", "initial = 1 2; 2 9", 9),
    ("initial = 1 2; 2 5", "initial = 1 1", 9),
    ("n_points = 9", "n_points = 0", 13),
    ("t_stop = 2*pi", "t_stop = 0", 12),
    ("quantities = ep, p1", "quantities = ep, purity", 14),
    ("mode = ring", "mode = lattice", 2),
    ("name = small", "name = a/b", 3),
    ("gamma_map_times = 0, 1.5", "gamma_map_times = 0, -1", 15),
    ("gamma_map_times = 0, 1.5", "colour = red", 15),
])
def test_config_errors_are_line_addressed(old, new, line):
    with pytest.raises(ConfigError) as info:
        parse_config(RING.replace(old, new), "exp.ini")
    assert info.value.line == line
    assert str(info.value).startswith(f"exp.ini:{line}: ")


def test_missing_section_and_syntax_errors():
    with pytest.raises(ConfigError):
        parse_config("[run]\nmode = ring\n")
    with pytest.raises(ConfigError) as info:
        parse_config("mode = ring\n")
    assert info.value.line == 1
    with pytest.raises(ConfigError):
        load_config("/nonexistent/exp.ini")


def test_continuum_config_overrides():
    text = "[run]\nmode = continuum\n[continuum]\nscenario = collision\nstatistics = boson\nt_max_fs = 200\n"
    cfg = parse_config(text)
    ((name, ccfg),) = cfg.continuum.configs
    assert name == "collision" and ccfg.t_max_fs == 200.0 and ccfg.ek1_mev == 10.0
    with pytest.raises(ConfigError) as info:
        parse_config(text + "dx_nm = 1.0\n")
    assert info.value.line == 3


def test_run_ring_outputs(tmp_path, monkeypatch):
    cfg_path = tmp_path / "exp.ini"
    cfg_path.write_text(RING)
    out = tmp_path / "res"
    assert run_main(["run", str(cfg_path)], monkeypatch, out) == 0
    rows = read_csv(out / "small_N6_fermion.csv")
    assert rows[0] == ["gamma_t", "ep_12", "p1_12", "ep_25", "p1_25"]
    assert len(rows) == 10
    meta = json.loads((out / "small.json").read_text())
    assert [r["statistics"] for r in meta["runs"]] == ["fermion", "boson"]
    g0 = np.array([[float(v) for v in r[1:]] for r in read_csv(out / "small_N6_boson_gamma_25_t0.csv")[1:]])
    assert np.count_nonzero(g0) == 2 and g0[1, 4] == g0[4, 1] == 0.5
    side = json.loads((out / "small_N6_boson_gamma_25_t1.5.json").read_text())
    assert side["n_sites"] == 6 and side["gamma_t"] == 1.5 and side["initial"] == [2, 5]


def test_gamma_map_boson_double_occupancy(tmp_path):
    from qwalk.emit import emit_gamma_map
    csv_path, _ = emit_gamma_map(evolve(RingConfig(6, statistics="boson"), (3, 3), 0.0), tmp_path / "g.csv")
    g = np.array([[float(v) for v in r[1:]] for r in read_csv(csv_path)[1:]])
    assert g[2, 2] == 1.0 and np.count_nonzero(g) == 1


def test_empty_partition_exits_2(tmp_path, monkeypatch, capsys):
    cfg_path = tmp_path / "bad.ini"
    cfg_path.write_text(RING.replace("partition = 1-3", "partition ="))
    assert run_main(["run", str(cfg_path)], monkeypatch, tmp_path / "o") == 2
    assert f"{cfg_path}:10:" in capsys.readouterr().err


def test_invariant_breach_exits_3(tmp_path, monkeypatch):
    def broken(*args, **kwargs):
        raise InvariantError("norm drifted")

    monkeypatch.setattr(cli, "evolve", broken)
    assert run_main(["preset", "fig1"], monkeypatch, tmp_path) == 3


def test_io_failure_exits_4(tmp_path, monkeypatch):
    blocker = tmp_path / "file"
    blocker.write_text("not a directory")
    assert run_main(["preset", "fig1"], monkeypatch, blocker / "sub") == 4


def test_output_dir_default_and_override(tmp_path, monkeypatch):
    cfg = parse_config(RING)
    monkeypatch.delenv("QWALK_OUT_DIR", raising=False)
    assert str(cli.output_dir(cfg)) == "out"
    monkeypatch.setenv("QWALK_OUT_DIR", str(tmp_path))
    assert cli.output_dir(cfg) == tmp_path


def test_sweep_single_n(tmp_path, monkeypatch):
    text = "[run]\nmode = ring_sweep\nname = sw\n[sweep]\nn_sites = 50\nstatistics = fermion\nt_stop = 30\nn_points = 601\n"
    cfg_path = tmp_path / "sw.ini"
    cfg_path.write_text(text)
    assert run_main(["run", str(cfg_path)], monkeypatch, tmp_path) == 0
    rows = read_csv(tmp_path / "sw.csv")
    assert len(rows) == 2 and rows[1][:2] == ["50", "fermion"] and rows[1][3] == "false"


def test_sweep_flags_missing_plateau(tmp_path, monkeypatch):
    text = "[run]\nmode = ring_sweep\nname = sw\n[sweep]\nn_sites = 50\nstatistics = boson\nt_stop = 3\nn_points = 61\n"
    cfg_path = tmp_path / "sw.ini"
    cfg_path.write_text(text)
    assert run_main(["run", str(cfg_path)], monkeypatch, tmp_path) == 0
    assert read_csv(tmp_path / "sw.csv")[1][2:] == ["", "true"]


def test_continuum_run(tmp_path, monkeypatch):
    text = (
        "[run]\nmode = continuum\nname = c\n[continuum]\nscenario = collision\n"
        "statistics = fermion\nt_max_fs = 50\nhalf_length_nm = 100\ndx_nm = 0.5\ndt_fs = 0.5\n"
    )
    cfg_path = tmp_path / "c.ini"
    cfg_path.write_text(text)
    assert run_main(["run", str(cfg_path)], monkeypatch, tmp_path) == 0
    rows = read_csv(tmp_path / "c_collision_fermion.csv")
    assert rows[0] == ["time_fs", "ep", "p1", "norm", "symmetry_residual"]
    assert len(rows) == 7


@pytest.mark.parametrize("name", cli.PRESETS)
def test_presets_parse(name):
    cfg = parse_config(cli.preset_text(name), name)
    assert cfg.name == name


def test_unknown_preset():
    with pytest.raises(ConfigError):
        cli.preset_text("fig9")


def test_module_entry_point(tmp_path):
    env = {"QWALK_OUT_DIR": str(tmp_path), "PATH": "/usr/bin:/bin"}
    res = subprocess.run([sys.executable, "-m", "qwalk", "preset", "fig1"], env=env, capture_output=True)
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "fig1.csv").exists()
    res = subprocess.run([sys.executable, "-m", "qwalk", "preset", "fig9"], env=env, capture_output=True)
    assert res.returncode == 2
