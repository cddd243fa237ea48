"""Experiment configuration files.

The format is INI-style: ``[section]`` headers, ``key = value`` lines, ``#``
comments (``;`` only at line start).  Numbers may be simple arithmetic in
``pi`` (``2*pi``, ``pi/4``).
Lists are comma-separated; lists of site pairs are ``;``-separated
(``1 2; 1 3``).  See docs/formats.md for every key.
"""

from __future__ import annotations

import ast
import configparser
import math
import operator
import re
from dataclasses import dataclass, field
from pathlib import Path

from .continuum import PRESETS as CONTINUUM_SCENARIOS
from .continuum import ContinuumConfig
from .entanglement import ORDERINGS, Partition
from .ring import Statistics

__all__ = ["ConfigError", "RingSpec", "SweepSpec", "ContinuumSpec", "ExperimentConfig", "load_config", "parse_config"]

MODES = ("ring", "continuum", "ring_sweep")
RING_QUANTITIES = ("ep", "p1", "entropy", "p0", "p2")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<config>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def parse_number(text: str) -> float:
    """Evaluate a float literal or small arithmetic expression in ``pi``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        raise ValueError(f"not a number: {text!r}")

    try:
        value = ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError):
        raise ValueError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"not a finite number: {text!r}")
    return value


def _split_list(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def _parse_int(text: str) -> int:
    v = parse_number(text)
    if v != int(v):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(v)


def _parse_sites(text: str) -> list[int]:
    """``1, 3, 5-8`` -> [1, 3, 5, 6, 7, 8]."""
    sites = []
    for part in _split_list(text):
        m = re.fullmatch(r"(\d+)\s*-\s*(\d+)", part)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if lo > hi:
                raise ValueError(f"empty site range {part!r}")
            sites.extend(range(lo, hi + 1))
        else:
            sites.append(_parse_int(part))
    return sites


@dataclass(frozen=True)
class RingSpec:
    n_sites: tuple[int, ...]
    statistics: tuple[Statistics, ...]
    initial: tuple  # tuple of (j, r) pairs or the string "center"
    partition: str | tuple[int, ...]
    t_grid: tuple[float, ...]
    gamma: float = 1.0
    ordering: str = "partition"
    quantities: tuple[str, ...] = ("ep", "p1", "entropy")
    gamma_map_times: tuple[float, ...] = ()

    def initial_pairs(self, n: int) -> list[tuple[int, int]]:
        if self.initial == "center":
            return [(n // 2, n // 2 + 1)]
        return list(self.initial)

    def partition_for(self, n: int) -> Partition:
        if self.partition == "half":
            return Partition.half(n)
        return Partition.of(n, self.partition)


@dataclass(frozen=True)
class SweepSpec:
    n_sites: tuple[int, ...]
    statistics: tuple[Statistics, ...]
    t_grid: tuple[float, ...]
    gamma: float = 1.0


@dataclass(frozen=True)
class ContinuumSpec:
    configs: tuple[tuple[str, ContinuumConfig], ...]
    method: str = "packets"


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    name: str
    output_dir: str = "out"
    ring: RingSpec | None = None
    sweep: SweepSpec | None = None
    continuum: ContinuumSpec | None = None
    source: str = "<config>"


def _line_index(text: str) -> dict:
    """Map (section, key) and section names to 1-based line numbers."""
    index = {}
    section = None
    for no, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s[0] in "#;":
            continue
        m = re.fullmatch(r"\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip()
            index.setdefault(section, no)
            continue
        m = re.match(r"([^=:]+?)\s*[=:]", s)
        if m and section is not None:
            index.setdefault((section, m.group(1).strip().lower()), no)
    return index


class _Reader:
    def __init__(self, parser, lines, source):
        self.parser = parser
        self.lines = lines
        self.source = source

    def error(self, message, section, key=None):
        line = self.lines.get((section, key)) if key else self.lines.get(section)
        return ConfigError(message, line, self.source)

    def has(self, section, key):
        return self.parser.has_option(section, key)

    def get(self, section, key, convert=str, default=None, required=False):
        if not self.parser.has_option(section, key):
            if required:
                raise self.error(f"missing required key '{key}' in [{section}]", section)
            return default
        raw = self.parser.get(section, key)
        try:
            return convert(raw)
        except (ValueError, TypeError) as exc:
            raise self.error(f"[{section}] {key}: {exc}", section, key) from None

    def require_section(self, section):
        if not self.parser.has_section(section):
            raise ConfigError(f"missing section [{section}]", None, self.source)

    def check_keys(self, section, allowed):
        for key in self.parser.options(section):
            if key not in allowed:
                raise self.error(f"unknown key '{key}' in [{section}]", section, key)


def _statistics_list(text):
    return tuple(Statistics.parse(s) for s in _split_list(text))


def _int_list(text):
    values = tuple(_parse_int(s) for s in _split_list(text))
    if not values:
        raise ValueError("empty list")
    return values


def _float_list(text):
    return tuple(parse_number(s) for s in _split_list(text))


def _pairs(text):
    if text.strip().lower() == "center":
        return "center"
    pairs = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = re.split(r"[\s,]+", chunk)
        if len(parts) != 2:
            raise ValueError(f"expected a site pair like '1 2', got {chunk!r}")
        pairs.append((_parse_int(parts[0]), _parse_int(parts[1])))
    if not pairs:
        raise ValueError("no initial pairs given")
    return tuple(pairs)


def _partition(text):
    if text.strip().lower() == "half":
        return "half"
    sites = tuple(_parse_sites(text))
    if not sites:
        raise ValueError("Alice must hold at least one site")
    return sites


def _time_grid(r: _Reader, section: str) -> tuple[float, ...]:
    start = r.get(section, "t_start", parse_number, 0.0)
    stop = r.get(section, "t_stop", parse_number, required=True)
    n = r.get(section, "n_points", _parse_int, required=True)
    if n < 1:
        raise r.error("n_points must be >= 1", section, "n_points")
    if start < 0:
        raise r.error("t_start must be non-negative", section, "t_start")
    if n > 1 and not stop > start:
        raise r.error("t_stop must exceed t_start", section, "t_stop")
    if n == 1:
        return (start,)
    step = (stop - start) / (n - 1)
    return tuple(start + i * step for i in range(n))


RING_KEYS = {
    "n_sites", "statistics", "initial", "partition", "ordering", "t_start", "t_stop",
    "n_points", "quantities", "gamma_map_times", "gamma",
}
SWEEP_KEYS = {"n_sites", "statistics", "t_start", "t_stop", "n_points", "gamma"}
CONTINUUM_KEYS = {
    "scenario", "statistics", "method", "mass_kg", "sigma_nm", "x0_nm", "ek1_mev", "ek2_mev",
    "direction1", "direction2", "half_length_nm", "dx_nm", "dt_fs", "t_max_fs", "output_every_fs",
}


def _ring_spec(r: _Reader) -> RingSpec:
    s = "ring"
    r.require_section(s)
    r.check_keys(s, RING_KEYS)
    n_sites = r.get(s, "n_sites", _int_list, required=True)
    for n in n_sites:
        if n < 2 or n % 2:
            raise r.error(f"n_sites must be even and >= 2, got {n}", s, "n_sites")
    stats = r.get(s, "statistics", _statistics_list, (Statistics.FERMION,))
    initial = r.get(s, "initial", _pairs, required=True)
    partition = r.get(s, "partition", _partition, "half")
    ordering = r.get(s, "ordering", str, "partition").strip().lower()
    if ordering not in ORDERINGS:
        raise r.error(f"ordering must be one of {ORDERINGS}", s, "ordering")
    quantities = r.get(s, "quantities", lambda t: tuple(q.lower() for q in _split_list(t)), ("ep", "p1", "entropy"))
    for q in quantities:
        if q not in RING_QUANTITIES:
            raise r.error(f"unknown quantity {q!r}; expected {RING_QUANTITIES}", s, "quantities")
    gamma = r.get(s, "gamma", parse_number, 1.0)
    if not gamma > 0:
        raise r.error("gamma must be positive", s, "gamma")
    grid = _time_grid(r, s)
    maps = r.get(s, "gamma_map_times", _float_list, ())
    if any(t < 0 for t in maps):
        raise r.error("gamma_map_times must be non-negative", s, "gamma_map_times")
    for n in n_sites:
        if initial != "center":
            for j, k in initial:
                if not (1 <= j <= n and 1 <= k <= n):
                    raise r.error(f"initial pair ({j}, {k}) outside 1..{n}", s, "initial")
                if j == k and Statistics.FERMION in stats:
                    raise r.error(f"two fermions cannot both start on site {j}", s, "initial")
        try:
            Partition.half(n) if partition == "half" else Partition.of(n, partition)
        except ValueError as exc:
            raise r.error(str(exc), s, "partition") from None
    return RingSpec(n_sites, stats, initial, partition, grid, gamma, ordering, quantities, maps)


def _sweep_spec(r: _Reader) -> SweepSpec:
    s = "sweep"
    r.require_section(s)
    r.check_keys(s, SWEEP_KEYS)
    n_sites = r.get(s, "n_sites", _int_list, required=True)
    for n in n_sites:
        if n < 4 or n % 2:
            raise r.error(f"n_sites must be even and >= 4, got {n}", s, "n_sites")
    stats = r.get(s, "statistics", _statistics_list, (Statistics.FERMION, Statistics.BOSON))
    gamma = r.get(s, "gamma", parse_number, 1.0)
    return SweepSpec(n_sites, stats, _time_grid(r, s), gamma)


def _continuum_spec(r: _Reader) -> ContinuumSpec:
    s = "continuum"
    r.require_section(s)
    r.check_keys(s, CONTINUUM_KEYS)
    scenarios = r.get(s, "scenario", lambda t: tuple(_split_list(t)), ("comoving",))
    for name in scenarios:
        if name != "custom" and name not in CONTINUUM_SCENARIOS:
            raise r.error(f"unknown scenario {name!r}", s, "scenario")
    stats = r.get(s, "statistics", _statistics_list, (Statistics.FERMION, Statistics.BOSON))
    method = r.get(s, "method", str, "packets").strip()
    if method not in ("packets", "field"):
        raise r.error("method must be 'packets' or 'field'", s, "method")
    overrides = {}
    for key in CONTINUUM_KEYS - {"scenario", "statistics", "method"}:
        if r.has(s, key):
            conv = _parse_int if key.startswith("direction") else parse_number
            overrides[key] = r.get(s, key, conv)
    configs = []
    for name in scenarios:
        for st in stats:
            params = dict(CONTINUUM_SCENARIOS.get(name, {}))
            params.update(overrides)
            params["statistics"] = st
            try:
                configs.append((name, ContinuumConfig(**params)))
            except ValueError as exc:
                raise r.error(f"scenario {name}: {exc}", s) from None
    return ContinuumSpec(tuple(configs), method)


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        msg = getattr(exc, "message", str(exc)).splitlines()[0]
        raise ConfigError(msg, line, source) from None
    r = _Reader(parser, _line_index(text), source)
    r.require_section("run")
    r.check_keys("run", {"mode", "name", "output_dir"})
    mode = r.get("run", "mode", lambda t: t.strip().lower(), required=True)
    if mode not in MODES:
        raise r.error(f"mode must be one of {MODES}", "run", "mode")
    name = r.get("run", "name", str.strip, "qwalk")
    if not re.fullmatch(r"[A-Za-z0-9_.-]+", name):
        raise r.error("name may only contain letters, digits, '_', '.', '-'", "run", "name")
    out = r.get("run", "output_dir", str.strip, "out")
    kwargs = {}
    if mode == "ring":
        kwargs["ring"] = _ring_spec(r)
    elif mode == "ring_sweep":
        kwargs["sweep"] = _sweep_spec(r)
    else:
        kwargs["continuum"] = _continuum_spec(r)
    return ExperimentConfig(mode, name, out, source=source, **kwargs)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror or exc}", None, str(path)) from None
    return parse_config(text, str(path))
