"""Two identical particles propagating freely on a line.

Internal units: lengths in nm, energies in meV, hbar = 1, so one time unit is
hbar/meV (about 658.2 fs).  Public fields and outputs use fs.  Alice holds
x < 0 and Bob x > 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache

import numpy as np
from scipy import constants

from .ring import InvariantError, Statistics
from .tridiag import CayleySweep

__all__ = [
    "HBAR_OVER_MEV_FS",
    "ContinuumConfig",
    "ContinuumState",
    "PacketPair",
    "Sample",
    "kinetic_coefficient",
    "wavenumber",
    "gaussian_packet",
    "initial_state",
    "initial_packets",
    "step",
    "step_packets",
    "ep_linear",
    "ep_linear_packets",
    "exchange_residual",
    "simulate",
    "spreading_width",
    "preset",
    "PRESETS",
]

HBAR_OVER_MEV_FS = constants.hbar / (constants.milli * constants.e) / constants.femto
NORM_TOL = 1e-8
SYMMETRY_TOL = 1e-8
P1_EMPTY = 1e-12
AUDIT_POINTS = 800


def kinetic_coefficient(mass_kg: float) -> float:
    """hbar^2 / 2m in meV nm^2."""
    return constants.hbar**2 / (2 * mass_kg) / (constants.milli * constants.e) / constants.nano**2


def wavenumber(energy_mev: float, mass_kg: float) -> float:
    """k = sqrt(2 m E) / hbar in 1/nm."""
    if energy_mev < 0:
        raise ValueError("kinetic energy must be non-negative")
    return float(np.sqrt(energy_mev / kinetic_coefficient(mass_kg)))


@dataclass(frozen=True)
class ContinuumConfig:
    """Two Gaussian packets at +x0 (packet 1) and -x0 (packet 2).

    ``direction1``/``direction2`` carry the sign of each packet's momentum.
    """

    statistics: Statistics = Statistics.FERMION
    mass_kg: float = 9.1e-31
    sigma_nm: float = 5.0
    x0_nm: float = 20.0
    ek1_mev: float = 0.0
    ek2_mev: float = 0.0
    direction1: int = 1
    direction2: int = 1
    half_length_nm: float = 200.0
    dx_nm: float = 0.25
    dt_fs: float = 0.25
    t_max_fs: float = 2000.0
    output_every_fs: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "statistics", Statistics.parse(self.statistics))
        for name in ("mass_kg", "sigma_nm", "half_length_nm", "dx_nm", "dt_fs", "output_every_fs"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.x0_nm < 0 or self.t_max_fs < 0:
            raise ValueError("x0_nm and t_max_fs must be non-negative")
        if self.ek1_mev < 0 or self.ek2_mev < 0:
            raise ValueError("kinetic energies must be non-negative; use direction flags for sign")
        if self.direction1 not in (1, -1) or self.direction2 not in (1, -1):
            raise ValueError("direction flags must be +1 or -1")
        if self.dx_nm > self.sigma_nm / 10 * (1 + 1e-12):
            raise ValueError(f"dx_nm={self.dx_nm} exceeds sigma/10={self.sigma_nm / 10}")
        ratio = 2 * self.half_length_nm / self.dx_nm
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("2 * half_length_nm must be an integer multiple of dx_nm")
        self.check_domain()

    @property
    def kinetic(self) -> float:
        return kinetic_coefficient(self.mass_kg)

    @property
    def k1(self) -> float:
        return self.direction1 * wavenumber(self.ek1_mev, self.mass_kg)

    @property
    def k2(self) -> float:
        return self.direction2 * wavenumber(self.ek2_mev, self.mass_kg)

    def group_speed(self, k: float) -> float:
        """hbar k / m in nm/fs."""
        return 2 * self.kinetic * k / HBAR_OVER_MEV_FS

    @property
    def max_speed(self) -> float:
        """Speed of the fastest relevant component: |k| plus three momentum widths."""
        spread = 3 / (2 * self.sigma_nm)
        return max(self.group_speed(abs(k) + spread) for k in (self.k1, self.k2))

    def check_domain(self):
        need = self.x0_nm + 10 * self.sigma_nm + self.max_speed * self.t_max_fs
        if self.half_length_nm < need:
            raise ValueError(
                f"half_length_nm={self.half_length_nm} too small: packets reach the wall "
                f"(need >= {need:.1f} nm)"
            )

    @property
    def n_points(self) -> int:
        return int(round(2 * self.half_length_nm / self.dx_nm)) - 1

    @cached_property
    def x(self) -> np.ndarray:
        """Interior grid points; psi vanishes at +-half_length."""
        i = np.arange(1, self.n_points + 1)
        return -self.half_length_nm + i * self.dx_nm

    @property
    def dt(self) -> float:
        return self.dt_fs / HBAR_OVER_MEV_FS

    def with_(self, **changes) -> "ContinuumConfig":
        return replace(self, **changes)


def _cut_weights(x: np.ndarray, dx: float):
    """Trapezoid weights for x<0 (Alice) and x>0 (Bob); a node at 0 is split in half."""
    at_zero = np.isclose(x, 0.0, atol=1e-9 * dx)
    w_a = np.where(x < 0, dx, 0.0)
    w_b = np.where(x > 0, dx, 0.0)
    w_a = np.where(at_zero, dx / 2, w_a)
    w_b = np.where(at_zero, dx / 2, w_b)
    return w_a, w_b


@dataclass(eq=False)
class ContinuumState:
    """psi[i, j] = Phi(x_i, x_j), normalized on the full plane."""

    psi: np.ndarray
    x: np.ndarray
    dx: float
    statistics: Statistics
    time_fs: float = 0.0

    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * self.dx**2)


def gaussian_packet(center: float, k: float, sigma: float, x: np.ndarray) -> np.ndarray:
    """Minimum-uncertainty packet (2 pi sigma^2)^(-1/4) exp(i k x - (x - center)^2 / 4 sigma^2)."""
    x = np.asarray(x, dtype=float)
    if x.min() > center - 5 * sigma or x.max() < center + 5 * sigma:
        raise ValueError(f"packet at {center} nm with sigma {sigma} nm is clipped by the domain")
    return (2 * np.pi * sigma**2) ** -0.25 * np.exp(1j * k * x - (x - center) ** 2 / (4 * sigma**2))


def _sign(statistics: Statistics) -> float:
    return -1.0 if statistics is Statistics.FERMION else 1.0


@dataclass(eq=False)
class PacketPair:
    """Two single-particle orbitals; the field is a(x1) b(x2) -+ b(x1) a(x2), normalized.

    The split Cayley step acts as C x C on the plane, so evolving each orbital
    with C reproduces the full-field evolution exactly.
    """

    a: np.ndarray
    b: np.ndarray
    statistics: Statistics
    dx: float
    x: np.ndarray
    time_fs: float = 0.0
    scale: float = field(default=0.0)

    def __post_init__(self):
        if self.scale == 0.0:
            self.scale = 1.0 / np.sqrt(self._raw_norm())

    def _raw_norm(self) -> float:
        aa = np.vdot(self.a, self.a).real * self.dx
        bb = np.vdot(self.b, self.b).real * self.dx
        ab = np.vdot(self.a, self.b) * self.dx
        return float(2 * (aa * bb + _sign(self.statistics) * abs(ab) ** 2))

    def norm(self) -> float:
        return self.scale**2 * self._raw_norm()

    def field(self, stride: int = 1) -> ContinuumState:
        """Dense field, optionally sampled on every ``stride``-th grid point."""
        a, b = self.a[::stride], self.b[::stride]
        s = _sign(self.statistics)
        psi = self.scale * (np.outer(a, b) + s * np.outer(b, a))
        return ContinuumState(psi, self.x[::stride], self.dx * stride, self.statistics, self.time_fs)


def initial_packets(cfg: ContinuumConfig) -> PacketPair:
    a = gaussian_packet(cfg.x0_nm, cfg.k1, cfg.sigma_nm, cfg.x)
    b = gaussian_packet(-cfg.x0_nm, cfg.k2, cfg.sigma_nm, cfg.x)
    if cfg.statistics is Statistics.FERMION and cfg.x0_nm == 0 and cfg.k1 == cfg.k2:
        raise ValueError("two fermions cannot share one orbital")
    return PacketPair(a, b, cfg.statistics, cfg.dx_nm, cfg.x)


def initial_state(cfg: ContinuumConfig) -> ContinuumState:
    """(Anti)symmetrized product of the two packets, unit norm on the full plane."""
    return initial_packets(cfg).field()


@lru_cache(maxsize=16)
def _sweep(n: int, dx: float, dt: float, kinetic: float) -> CayleySweep:
    return CayleySweep(n, dx, dt, kinetic)


def step(state: ContinuumState, cfg: ContinuumConfig, dt_fs: float | None = None) -> ContinuumState:
    """Advance the full field by one split Cayley step (x1 sweep, then x2 sweep)."""
    dt_fs = cfg.dt_fs if dt_fs is None else dt_fs
    sweep = _sweep(cfg.n_points, cfg.dx_nm, dt_fs / HBAR_OVER_MEV_FS, cfg.kinetic)
    psi = np.array(state.psi, dtype=complex, order="C", copy=True)
    sweep.apply(psi, axis=0)
    sweep.apply(psi, axis=1)
    return ContinuumState(psi, state.x, state.dx, state.statistics, state.time_fs + dt_fs)


def step_packets(pair: PacketPair, cfg: ContinuumConfig, n_steps: int = 1, dt_fs: float | None = None) -> PacketPair:
    dt_fs = cfg.dt_fs if dt_fs is None else dt_fs
    sweep = _sweep(cfg.n_points, cfg.dx_nm, dt_fs / HBAR_OVER_MEV_FS, cfg.kinetic)
    orbitals = np.ascontiguousarray(np.stack([pair.a, pair.b]))
    for _ in range(n_steps):
        sweep.apply(orbitals, axis=1)
    return PacketPair(
        orbitals[0].copy(), orbitals[1].copy(), pair.statistics, pair.dx, pair.x,
        pair.time_fs + n_steps * dt_fs, pair.scale,
    )


def exchange_residual(state: ContinuumState) -> float:
    """max |psi(x2, x1) -+ psi(x1, x2)|, zero for a perfectly (anti)symmetric field."""
    return float(np.max(np.abs(state.psi.T - _sign(state.statistics) * state.psi)))


def ep_linear(state: ContinuumState) -> tuple[float, float]:
    """(E_P, P1) with the linear entropy 1 - Tr rho_A^2, by trapezoid quadrature."""
    w_a, w_b = _cut_weights(state.x, state.dx)
    rows = w_a > 0
    cols = w_b > 0
    k = np.sqrt(w_a[rows])[:, None] * state.psi[np.ix_(rows, cols)] * np.sqrt(w_b[cols])[None, :]
    ab = float(np.sum(np.abs(k) ** 2))
    p1 = 2 * ab
    if p1 < P1_EMPTY:
        return 0.0, p1
    gram = k @ k.conj().T
    purity = float(np.sum(np.abs(gram) ** 2)) / ab**2
    return p1 * (1 - purity), p1


def ep_linear_packets(pair: PacketPair) -> tuple[float, float]:
    """Same quantity as :func:`ep_linear`, evaluated through the rank-2 structure."""
    w_a, w_b = _cut_weights(pair.x, pair.dx)
    s = _sign(pair.statistics)
    # Phi = scale * sum_m u_m(x1) v_m(x2) with u = (a, b), v = (b, s a)
    u = np.stack([pair.a, pair.b])
    v = np.stack([pair.b, s * pair.a])
    # K = U_w V_w^T; gram = U_w (V_w^T conj(V_w)) U_w^H
    gv = (v * w_b) @ v.conj().T  # gv[m, n] = sum_y v_m(y) conj(v_n(y)) w_b
    gu = (u.conj() * w_a) @ u.T  # gu[n, m] = sum_x conj(u_n(x)) u_m(x) w_a
    scale2 = pair.scale**2
    ab = float(np.real(np.trace(gv @ gu))) * scale2
    p1 = 2 * ab
    if p1 < P1_EMPTY:
        return 0.0, p1
    prod = gv @ gu
    purity = float(np.real(np.trace(prod @ prod))) * scale2**2 / ab**2
    return p1 * (1 - purity), p1


def spreading_width(sigma_nm: float, t_fs: float, mass_kg: float) -> float:
    """Free-particle Gaussian width sigma * sqrt(1 + (hbar t / 2 m sigma^2)^2) in nm."""
    tau = kinetic_coefficient(mass_kg) * (t_fs / HBAR_OVER_MEV_FS) / sigma_nm**2
    return sigma_nm * np.sqrt(1 + tau**2)


@dataclass(frozen=True)
class Sample:
    time_fs: float
    ep: float
    p1: float
    norm: float
    symmetry: float


def simulate(cfg: ContinuumConfig, method: str = "packets", check: bool = True) -> list[Sample]:
    """Run from t=0 to t_max, recording E_P every ``output_every_fs``.

    ``method="packets"`` evolves the two orbitals; ``method="field"`` steps the
    full 2D field.  Both apply the same Cayley operator.  With ``check`` on,
    norm drift above 1e-8 or an exchange residual above 1e-8 raises
    :class:`InvariantError`.
    """
    if method not in ("packets", "field"):
        raise ValueError(f"unknown method {method!r}")
    stride = int(round(cfg.output_every_fs / cfg.dt_fs))
    if stride < 1 or abs(stride * cfg.dt_fs - cfg.output_every_fs) > 1e-9 * cfg.output_every_fs:
        raise ValueError("output_every_fs must be a positive multiple of dt_fs")
    n_out = int(np.floor(cfg.t_max_fs / cfg.output_every_fs + 1e-9))
    pair = initial_packets(cfg)
    state = pair.field() if method == "field" else None
    samples = []
    for i in range(n_out + 1):
        if i > 0:
            if method == "packets":
                pair = step_packets(pair, cfg, stride)
            else:
                for _ in range(stride):
                    state = step(state, cfg)
        if method == "packets":
            t = pair.time_fs
            ep, p1 = ep_linear_packets(pair)
            norm = pair.norm()
            audit = -(-cfg.n_points // AUDIT_POINTS)
            sym = exchange_residual(pair.field(audit))
        else:
            t = state.time_fs
            ep, p1 = ep_linear(state)
            norm = state.norm()
            sym = exchange_residual(state)
        if check:
            if abs(norm - 1) > NORM_TOL:
                raise InvariantError(f"norm drifted by {abs(norm - 1):.3e} at t={t} fs")
            if sym > SYMMETRY_TOL:
                raise InvariantError(f"exchange symmetry residual {sym:.3e} at t={t} fs")
        samples.append(Sample(round(i * cfg.output_every_fs, 9), ep, p1, norm, sym))
    return samples


PRESETS = {
    # Same velocity, taken as zero energy.  E_P only levels off after ~10 ps, so
    # the run is long and the box wide enough that no packet reaches a wall.
    "comoving": dict(
        ek1_mev=0.0, ek2_mev=0.0, direction1=1, direction2=1,
        t_max_fs=16000.0, half_length_nm=640.0, output_every_fs=50.0,
    ),
    # Packet at +x0 moves left, packet at -x0 moves right, 10 meV each.
    "collision": dict(ek1_mev=10.0, ek2_mev=10.0, direction1=-1, direction2=1, t_max_fs=1000.0),
}


def preset(name: str, statistics="fermion", **overrides) -> ContinuumConfig:
    if name not in PRESETS:
        raise ValueError(f"unknown continuum scenario {name!r}; expected one of {sorted(PRESETS)}")
    params = dict(PRESETS[name], statistics=statistics)
    params.update(overrides)
    return ContinuumConfig(**params)
