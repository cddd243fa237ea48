"""Entanglement of particles for two identical particles on the ring.

Only the sector with one particle on each side contributes, so the measure is
the probability of that sector times the entropy of Alice's normalized
single-particle density matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .ring import InvariantError, PairState, RingConfig, evolve

__all__ = [
    "Partition",
    "SectorWeights",
    "DensityMatrix",
    "SectorEmpty",
    "sector_weights",
    "reduced_density_matrix",
    "von_neumann_entropy",
    "linear_entropy",
    "entanglement_of_particles",
    "ep_time_series",
    "EPSample",
    "saturation_interval",
]

EIG_CUTOFF = 1e-14
NEG_EIG_TOL = 1e-10
HERMITIAN_TOL = 1e-12
P1_EMPTY = 1e-14


class SectorEmpty(ValueError):
    """The one-particle-per-side sector carries no weight."""


@dataclass(frozen=True)
class Partition:
    """Sites held by Alice; Bob holds the complement."""

    n_sites: int
    alice: frozenset

    def __post_init__(self):
        alice = frozenset(int(a) for a in self.alice)
        object.__setattr__(self, "alice", alice)
        if not alice:
            raise ValueError("partition: Alice must hold at least one site")
        bad = [a for a in alice if not 1 <= a <= self.n_sites]
        if bad:
            raise ValueError(f"partition: sites {sorted(bad)} outside 1..{self.n_sites}")
        if len(alice) == self.n_sites:
            raise ValueError("partition: Alice cannot hold every site")

    @classmethod
    def half(cls, n_sites: int) -> "Partition":
        return cls(n_sites, frozenset(range(1, n_sites // 2 + 1)))

    @classmethod
    def of(cls, n_sites: int, alice: Iterable[int]) -> "Partition":
        return cls(n_sites, frozenset(alice))

    @property
    def bob(self) -> frozenset:
        return frozenset(range(1, self.n_sites + 1)) - self.alice

    @property
    def alice_sites(self) -> list[int]:
        return sorted(self.alice)

    @property
    def bob_sites(self) -> list[int]:
        return sorted(self.bob)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.n_sites, dtype=bool)
        m[np.array(self.alice_sites) - 1] = True
        return m

    def shifted(self, m: int) -> "Partition":
        return Partition(self.n_sites, frozenset((a - 1 + m) % self.n_sites + 1 for a in self.alice))


@dataclass(frozen=True)
class SectorWeights:
    p0: float
    p1: float
    p2: float


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray
    sites: tuple

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues with float noise in [-1e-10, 0) clamped to zero."""
        rho = self.entries
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        w = np.linalg.eigvalsh(rho)
        if w.min(initial=0.0) < -NEG_EIG_TOL:
            raise InvariantError(f"density matrix has eigenvalue {w.min():.3e} < 0")
        return np.clip(w, 0.0, None)


def _check_partition(state: PairState, part: Partition):
    if part.n_sites != state.n_sites:
        raise ValueError(f"partition is for N={part.n_sites}, state has N={state.n_sites}")


def sector_weights(state: PairState, part: Partition) -> SectorWeights:
    _check_partition(state, part)
    in_a = part.mask()
    p = state.basis.pairs - 1
    count = in_a[p[:, 0]].astype(int) + in_a[p[:, 1]].astype(int)
    w = np.abs(state.amplitudes) ** 2
    p2 = float(w[count == 2].sum())
    p1 = float(w[count == 1].sum())
    p0 = float(w[count == 0].sum())
    return SectorWeights(p0, p1, p2)


ORDERINGS = ("partition", "site")


def reduced_density_matrix(
    state: PairState, part: Partition, ordering: str = "partition"
) -> DensityMatrix:
    """[rho_A]_{k,k'} = sum_{s in B} conj(c_ks) c_k's / p1 for k, k' in A.

    ``ordering`` fixes how fermionic pair amplitudes map onto Alice x Bob:

    * ``"partition"``: c_ks is the signed amplitude on |ks> (Alice's mode
      created first), so rho_A equals <a_k^dag a_k'> on the one-particle sector
      and agrees with the first-quantized partial trace.
    * ``"site"``: c_ks is the canonical-pair amplitude without the exchange
      sign, i.e. the mode tensor product taken in natural site order.

    The two coincide for bosons and whenever every Alice site precedes every
    Bob site (e.g. the half-ring cut).
    """
    _check_partition(state, part)
    if ordering not in ORDERINGS:
        raise ValueError(f"unknown ordering {ordering!r}; expected one of {ORDERINGS}")
    c = state.pair_matrix()
    if ordering == "site":
        c = np.triu(c) + np.triu(c, 1).T
    a = np.array(part.alice_sites) - 1
    b = np.array(part.bob_sites) - 1
    block = c[np.ix_(a, b)]
    p1 = float(np.sum(np.abs(block) ** 2))
    if p1 <= P1_EMPTY:
        raise SectorEmpty("no weight in the one-particle-per-side sector")
    rho = block.conj() @ block.T / p1
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho, tuple(part.alice_sites))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in nats."""
    w = rho.eigenvalues()
    w = w[w > EIG_CUTOFF]
    return max(0.0, float(-np.sum(w * np.log(w))))


def linear_entropy(rho: DensityMatrix) -> float:
    rho.eigenvalues()
    return max(0.0, float(1.0 - np.sum(np.abs(rho.entries) ** 2)))


Entropy = Callable[[DensityMatrix], float]


def entanglement_of_particles(
    state: PairState,
    part: Partition,
    entropy: Entropy = von_neumann_entropy,
    ordering: str = "partition",
) -> float:
    """E_P = P1 * entropy(rho_A); exactly 0 when the P1 sector is empty."""
    try:
        rho = reduced_density_matrix(state, part, ordering)
    except SectorEmpty:
        return 0.0
    return sector_weights(state, part).p1 * entropy(rho)


@dataclass(frozen=True)
class EPSample:
    gamma_t: float
    ep: float
    p1: float
    entropy: float


def ep_time_series(
    cfg: RingConfig,
    initial: tuple[int, int],
    part: Partition,
    t_grid: Sequence[float],
    entropy: Entropy = von_neumann_entropy,
    ordering: str = "partition",
) -> list[EPSample]:
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) == 0:
        raise ValueError("time grid must be a non-empty 1D sequence")
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("time grid must be strictly increasing")
    out = []
    for gt in t_grid:
        state = evolve(cfg, initial, gt)
        weights = sector_weights(state, part)
        try:
            s = entropy(reduced_density_matrix(state, part, ordering))
        except SectorEmpty:
            s = 0.0
        out.append(EPSample(float(gt), weights.p1 * s, weights.p1, s))
    return out


def saturation_interval(
    gamma_t: Sequence[float],
    ep: Sequence[float],
    onset_fraction: float = 0.95,
    rise_fraction: float = 1.25,
    lookahead: float = 5.0,
) -> float | None:
    """Duration of the first E_P plateau, or None when no plateau is found.

    Analysis heuristic, not a closed form.  Onset is the first sample where
    E_P reaches ``onset_fraction`` of the median over the next ``lookahead``
    units of gamma*t.  After onset a running median tracks the plateau level;
    the plateau ends at the first sample exceeding ``rise_fraction`` times it.
    """
    t = np.asarray(gamma_t, dtype=float)
    e = np.asarray(ep, dtype=float)
    if t.shape != e.shape or len(t) < 4 or np.any(np.diff(t) <= 0):
        return None
    onset = None
    for i in range(len(t)):
        ahead = e[(t >= t[i]) & (t <= t[i] + lookahead)]
        level = np.median(ahead)
        if level > 0 and e[i] >= onset_fraction * level:
            onset = i
            break
    if onset is None:
        return None
    for i in range(onset + 1, len(t)):
        level = np.median(e[onset:i])
        if e[i] > rise_fraction * level:
            return float(t[i] - t[onset])
    return None
