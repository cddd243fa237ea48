"""Two-particle continuous-time quantum walk on an N-site ring.

Sites are labelled 1..N with N+1 identified with 1.  Every time argument on the
lattice is the dimensionless product gamma*t.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "Statistics",
    "RingConfig",
    "PairBasis",
    "PairState",
    "StatisticsError",
    "InvariantError",
    "wrap_site",
    "bloch_amplitude",
    "single_particle_propagator",
    "pair_amplitude_fermion",
    "pair_amplitude_boson",
    "evolve",
    "correlation_map",
]

NORM_DRIFT_TOL = 1e-9


class Statistics(str, enum.Enum):
    FERMION = "fermion"
    BOSON = "boson"

    @classmethod
    def parse(cls, value) -> "Statistics":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown statistics {value!r}; expected 'fermion' or 'boson'") from None


class StatisticsError(ValueError):
    """Requested state is forbidden by the exchange statistics."""


class InvariantError(RuntimeError):
    """A numerical invariant (norm, trace, positivity) was violated."""


@dataclass(frozen=True)
class RingConfig:
    n_sites: int
    gamma: float = 1.0
    statistics: Statistics = Statistics.FERMION

    def __post_init__(self):
        if isinstance(self.n_sites, bool) or int(self.n_sites) != self.n_sites:
            raise ValueError(f"n_sites must be an integer, got {self.n_sites!r}")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        if self.n_sites < 2 or self.n_sites % 2:
            raise ValueError(f"n_sites must be an even integer >= 2, got {self.n_sites}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        object.__setattr__(self, "statistics", Statistics.parse(self.statistics))

    @property
    def basis(self) -> "PairBasis":
        return PairBasis(self.n_sites, self.statistics)


def wrap_site(j: int, n_sites: int) -> int:
    """Map any integer label onto the 1..N window."""
    return (int(j) - 1) % n_sites + 1


def _check_site(j, n_sites: int) -> int:
    if isinstance(j, bool) or int(j) != j or not 1 <= j <= n_sites:
        raise ValueError(f"site index {j!r} outside 1..{n_sites}")
    return int(j)


def _check_time(gt) -> float:
    gt = float(gt)
    if not np.isfinite(gt) or gt < 0:
        raise ValueError(f"gamma*t must be finite and non-negative, got {gt}")
    return gt


@dataclass(frozen=True)
class PairBasis:
    """Lexicographically ordered canonical pairs.

    Fermions use j<k (N(N-1)/2 states), bosons j<=k (N(N+1)/2 states).
    Site labels are 1-based.
    """

    n_sites: int
    statistics: Statistics

    @cached_property
    def pairs(self) -> np.ndarray:
        offset = 1 if self.statistics is Statistics.FERMION else 0
        j, k = np.triu_indices(self.n_sites, k=offset)
        return np.stack([j + 1, k + 1], axis=1)

    @cached_property
    def _lookup(self) -> np.ndarray:
        table = np.full((self.n_sites, self.n_sites), -1, dtype=np.int64)
        p = self.pairs - 1
        table[p[:, 0], p[:, 1]] = np.arange(len(p))
        return table

    def __len__(self) -> int:
        n = self.n_sites
        return n * (n - 1) // 2 if self.statistics is Statistics.FERMION else n * (n + 1) // 2

    def index(self, j: int, k: int) -> int:
        """Flat index of the canonical pair (j, k); raises on non-canonical input."""
        j = _check_site(j, self.n_sites)
        k = _check_site(k, self.n_sites)
        idx = self._lookup[j - 1, k - 1]
        if idx < 0:
            raise ValueError(f"({j}, {k}) is not a canonical {self.statistics.value} pair")
        return int(idx)

    def pair(self, index: int) -> tuple[int, int]:
        j, k = self.pairs[index]
        return int(j), int(k)

    def canonical(self, j: int, k: int) -> tuple[int, int, int]:
        """Return (j', k', sign) with j' <= k' and the exchange sign of the reordering."""
        j = _check_site(j, self.n_sites)
        k = _check_site(k, self.n_sites)
        if j == k and self.statistics is Statistics.FERMION:
            raise StatisticsError(f"two fermions cannot occupy site {j}")
        if j <= k:
            return j, k, 1
        return k, j, (-1 if self.statistics is Statistics.FERMION else 1)


@dataclass(frozen=True, eq=False)
class PairState:
    basis: PairBasis
    amplitudes: np.ndarray
    time: float = 0.0
    initial: tuple[int, int] | None = None

    @property
    def n_sites(self) -> int:
        return self.basis.n_sites

    @property
    def statistics(self) -> Statistics:
        return self.basis.statistics

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def amplitude(self, j: int, k: int) -> complex:
        """Amplitude on |jk>, with the fermionic sign when j > k."""
        if j == k and self.statistics is Statistics.FERMION:
            return 0j
        cj, ck, sign = self.basis.canonical(j, k)
        return sign * complex(self.amplitudes[self.basis.index(cj, ck)])

    def pair_matrix(self) -> np.ndarray:
        """Dense N x N amplitude table C with C[k-1, s-1] = amplitude(k, s).

        The lower triangle carries the exchange sign; the boson diagonal holds
        the doubly-occupied amplitudes as they are.
        """
        n = self.n_sites
        c = np.zeros((n, n), dtype=complex)
        p = self.basis.pairs - 1
        c[p[:, 0], p[:, 1]] = self.amplitudes
        sign = -1.0 if self.statistics is Statistics.FERMION else 1.0
        off = p[:, 0] != p[:, 1]
        c[p[off, 1], p[off, 0]] = sign * self.amplitudes[off]
        return c


def bloch_amplitude(cfg: RingConfig, gt: float, k: int, j: int) -> complex:
    """Single-particle transition amplitude <k| exp(-i H0 t) |j> from the Bloch sum."""
    n = cfg.n_sites
    k = _check_site(k, n)
    j = _check_site(j, n)
    return complex(_first_column(n, _check_time(gt))[(k - j) % n])


def _first_column(n: int, gt: float) -> np.ndarray:
    # lambda depends on (k - j) mod N only; row d is the amplitude for offset d
    if gt == 0:
        # exact identity instead of a DFT sum with roundoff in every entry
        col = np.zeros(n, dtype=complex)
        col[0] = 1.0
        return col
    q = 2 * np.pi * np.arange(1, n + 1) / n
    weights = np.exp(2j * gt * np.cos(q))
    d = np.arange(n)
    phases = np.exp(-1j * np.outer(d, q))
    return np.exp(-2j * gt) / n * (phases @ weights)


def single_particle_propagator(cfg: RingConfig, gt: float) -> np.ndarray:
    """Circulant N x N propagator U with U[k-1, j-1] = lambda_{k,j}(gamma t)."""
    n = cfg.n_sites
    col = _first_column(n, _check_time(gt))
    d = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return col[d]


def _check_ordered(U, pairs, strict):
    n = U.shape[0]
    for a, b in pairs:
        _check_site(a, n)
        _check_site(b, n)
        if (a >= b) if strict else (a > b):
            raise ValueError(f"({a}, {b}) is not a canonical pair")


def pair_amplitude_fermion(U: np.ndarray, k: int, s: int, j: int, r: int) -> complex:
    """mu^f_{ks,jr} = lambda_kj lambda_sr - lambda_kr lambda_sj for k<s, j<r."""
    _check_ordered(U, [(k, s), (j, r)], strict=True)
    k, s, j, r = k - 1, s - 1, j - 1, r - 1
    return complex(U[k, j] * U[s, r] - U[k, r] * U[s, j])


def pair_amplitude_boson(U: np.ndarray, k: int, s: int, j: int, r: int) -> complex:
    """Boson pair amplitude for k<=s, j<=r, with sqrt(2) on single coincidences."""
    _check_ordered(U, [(k, s), (j, r)], strict=False)
    same_out, same_in = k == s, j == r
    k, s, j, r = k - 1, s - 1, j - 1, r - 1
    if not same_out and not same_in:
        return complex(U[k, j] * U[s, r] + U[k, r] * U[s, j])
    if same_out != same_in:
        return complex(np.sqrt(2) * U[k, j] * U[s, r])
    return complex(U[k, j] * U[s, r])


def evolve(cfg: RingConfig, initial: tuple[int, int], gt: float) -> PairState:
    """Evolve |jr> for a time gamma*t and return amplitudes over the full pair basis."""
    basis = cfg.basis
    j, r = initial
    j, r, _ = basis.canonical(j, r)
    gt = _check_time(gt)
    U = single_particle_propagator(cfg, gt)
    uj, ur = U[:, j - 1], U[:, r - 1]
    p = basis.pairs - 1
    kk, ss = p[:, 0], p[:, 1]
    if cfg.statistics is Statistics.FERMION:
        amps = uj[kk] * ur[ss] - ur[kk] * uj[ss]
    elif j != r:
        amps = uj[kk] * ur[ss] + ur[kk] * uj[ss]
        diag = kk == ss
        amps[diag] = np.sqrt(2) * uj[kk[diag]] * ur[kk[diag]]
    else:
        amps = np.sqrt(2) * uj[kk] * uj[ss]
        diag = kk == ss
        amps[diag] = uj[kk[diag]] ** 2
    state = PairState(basis, amps, gt, (j, r))
    drift = abs(state.norm() - 1.0)
    if drift > NORM_DRIFT_TOL:
        raise InvariantError(f"pair-state norm drifted by {drift:.3e} at gamma*t={gt}")
    return state


def correlation_map(state: PairState, convention: str = "pair") -> np.ndarray:
    """Two-particle correlation map Gamma as a symmetric N x N array.

    ``convention="pair"`` puts |c_(k,j)|^2 on both (k,j) and (j,k), so the upper
    triangle (diagonal included) sums to one.  ``convention="joint"`` is the
    joint-detection probability over ordered positions: off-diagonal entries are
    halved and the whole matrix sums to one.
    """
    if convention not in ("pair", "joint"):
        raise ValueError(f"unknown convention {convention!r}")
    n = state.n_sites
    g = np.zeros((n, n))
    p = state.basis.pairs - 1
    w = np.abs(state.amplitudes) ** 2
    off = p[:, 0] != p[:, 1]
    if convention == "joint":
        w = np.where(off, 0.5 * w, w)
    g[p[:, 0], p[:, 1]] = w
    g[p[off, 1], p[off, 0]] = w[off]
    return g
