"""Ground-truth references for the ring walk.

Two independent routes: the N=4 closed forms for E_P, and brute-force exact
diagonalization on the full N^2 two-particle product space.  Nothing here is
used by the production evolution path.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .entanglement import DensityMatrix, Partition, SectorEmpty
from .ring import PairBasis, PairState, RingConfig, Statistics

__all__ = [
    "ClosedFormCase",
    "closed_form_ep",
    "laplacian",
    "dense_single_particle_propagator",
    "dense_two_particle_propagator",
    "oracle_partial_trace",
    "MAX_ORACLE_SITES",
]

MAX_ORACLE_SITES = 12


class ClosedFormCase(str, enum.Enum):
    F12_A12 = "F12_A12"
    F13_A12 = "F13_A12"
    F23_A12 = "F23_A12"
    F13_A13_FERMION = "F13_A13_fermion"
    F13_A13_BOSON = "F13_A13_boson"
    BOSON_DOUBLE_OCC = "BosonDoubleOcc"


def closed_form_ep(case: ClosedFormCase, gt: float) -> float:
    """E_P on the N=4 ring from the analytic expressions (natural log)."""
    case = ClosedFormCase(case)
    gt = float(gt)
    if case is ClosedFormCase.F12_A12:
        return 0.5 * math.sin(2 * gt) ** 2 * math.log(2)
    if case is ClosedFormCase.F13_A12:
        c = math.cos(2 * gt)
        denom = 2 * (1 + c * c)
        # p1 * lambda_pm = (c -+ 1)^2 / 4 with lambda_pm = (c -+ 1)^2 / denom
        total = 0.0
        for a in ((c - 1) ** 2, (c + 1) ** 2):
            if a > 0:
                total -= a / 4 * math.log(a / denom)
        return total
    if case is ClosedFormCase.F13_A13_FERMION:
        return math.log(2) * math.sin(2 * gt) ** 2
    return 0.0


def laplacian(n_sites: int, gamma: float = 1.0) -> np.ndarray:
    """Explicit ring Laplacian stencil gamma * (2|j> - |j-1> - |j+1>)."""
    h = 2.0 * np.eye(n_sites)
    for j in range(n_sites):
        h[(j + 1) % n_sites, j] -= 1.0
        h[(j - 1) % n_sites, j] -= 1.0
    return gamma * h


def _expm_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def dense_single_particle_propagator(n_sites: int, gt: float) -> np.ndarray:
    """exp(-i H0 t) by eigendecomposition of the explicit Laplacian (gamma = 1)."""
    return _expm_hermitian(laplacian(n_sites), gt)


def _check_scale(n_sites: int):
    if n_sites > MAX_ORACLE_SITES:
        raise ValueError(f"oracle refuses N={n_sites} > {MAX_ORACLE_SITES} (cost grows as N^6)")


def _swap_operator(n: int) -> np.ndarray:
    p = np.zeros((n * n, n * n))
    for a in range(n):
        for b in range(n):
            p[b * n + a, a * n + b] = 1.0
    return p


def _pair_basis_vectors(basis: PairBasis) -> np.ndarray:
    """Columns are the (anti)symmetrized kets |jk>_{f,b} in the product space.

    Built by applying the projector (1 -+ P)/2 to |j>|k> and normalizing, so the
    construction does not rely on the pair-amplitude formulas.
    """
    n = basis.n_sites
    swap = _swap_operator(n)
    eye = np.eye(n * n)
    if basis.statistics is Statistics.FERMION:
        proj = 0.5 * (eye - swap)
    else:
        proj = 0.5 * (eye + swap)
    cols = []
    for j, k in basis.pairs:
        v = proj[:, (j - 1) * n + (k - 1)]
        cols.append(v / np.linalg.norm(v))
    return np.array(cols).T


def dense_two_particle_propagator(cfg: RingConfig, gt: float) -> np.ndarray:
    """Pair-basis unitary from exact diagonalization of H0 x 1 + 1 x H0.

    Entry [a, b] is the amplitude from basis pair b to basis pair a.
    """
    n = cfg.n_sites
    _check_scale(n)
    h0 = laplacian(n)
    eye = np.eye(n)
    h = np.kron(h0, eye) + np.kron(eye, h0)
    u = _expm_hermitian(h, gt)
    b = _pair_basis_vectors(cfg.basis)
    return b.conj().T @ u @ b


def oracle_partial_trace(state: PairState, part: Partition) -> DensityMatrix:
    """Alice's one-body density matrix <a_k^dag a_k'> via first quantization.

    Embeds the state in the N^2 product space, keeps the component with exactly
    one particle on Alice's sites, and evaluates the one-body operators
    |k><k'| x 1 + 1 x |k><k'| on it.
    """
    n = state.n_sites
    _check_scale(n)
    psi = _pair_basis_vectors(state.basis) @ state.amplitudes
    in_a = np.zeros(n, dtype=bool)
    in_a[[a - 1 for a in part.alice]] = True
    one_in_a = np.logical_xor(in_a[:, None], in_a[None, :]).reshape(-1)
    psi1 = np.where(one_in_a, psi, 0.0)
    if np.vdot(psi1, psi1).real <= 1e-14:
        raise SectorEmpty("no weight in the one-particle-per-side sector")
    sites = sorted(part.alice)
    eye = np.eye(n)
    rho = np.empty((len(sites), len(sites)), dtype=complex)
    for i, k in enumerate(sites):
        for j, kp in enumerate(sites):
            hop = np.zeros((n, n))
            hop[k - 1, kp - 1] = 1.0  # a_k^dag a_k' moves a particle k' -> k
            op = np.kron(hop, eye) + np.kron(eye, hop)
            rho[i, j] = np.vdot(psi1, op @ psi1)
    rho /= np.trace(rho).real
    return DensityMatrix(rho, tuple(sites))
