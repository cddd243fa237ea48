import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from qwalk.entanglement import Partition, entanglement_of_particles, reduced_density_matrix, sector_weights
from qwalk.oracle import (
    ClosedFormCase,
    closed_form_ep,
    dense_single_particle_propagator,
    dense_two_particle_propagator,
    laplacian,
    oracle_partial_trace,
)
from qwalk.ring import RingConfig, Statistics, evolve, single_particle_propagator

times = st.floats(min_value=0.0, max_value=12.0, allow_nan=False)
stats = st.sampled_from(list(Statistics))


def test_laplacian_rows_sum_to_zero():
    h = laplacian(6, gamma=0.7)
    assert np.allclose(h.sum(axis=1), 0.0)
    assert np.allclose(h, h.T)
    assert h[0, 5] == -0.7


@given(n=st.sampled_from([4, 6, 8, 10]), gt=times)
def test_bloch_sum_matches_expm(n, gt):
    ref = expm(-1j * laplacian(n) * gt)
    assert np.allclose(single_particle_propagator(RingConfig(n), gt), ref, atol=1e-12)
    assert np.allclose(dense_single_particle_propagator(n, gt), ref, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(n=st.sampled_from([4, 6]), gt=times, statistics=stats, data=st.data())
def test_dense_two_particle_matches_engine(n, gt, statistics, data):
    cfg = RingConfig(n, statistics=statistics)
    u = dense_two_particle_propagator(cfg, gt)
    b = data.draw(st.integers(0, len(cfg.basis) - 1))
    state = evolve(cfg, cfg.basis.pair(b), gt)
    assert np.allclose(u[:, b], state.amplitudes, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(n=st.sampled_from([4, 6]), gt=times, statistics=stats, data=st.data())
def test_partial_trace_matches_engine(n, gt, statistics, data):
    k = data.draw(st.integers(1, n - 1))
    alice = data.draw(st.lists(st.integers(1, n), min_size=k, max_size=k, unique=True))
    part = Partition.of(n, alice)
    j = data.draw(st.integers(1, n))
    r = data.draw(st.integers(1, n).filter(lambda x: x != j))
    state = evolve(RingConfig(n, statistics=statistics), (j, r), gt)
    if sector_weights(state, part).p1 < 1e-8:
        return
    ref = oracle_partial_trace(state, part).entries
    assert np.allclose(reduced_density_matrix(state, part).entries, ref, atol=1e-10)


def test_oracle_refuses_large_rings():
    with pytest.raises(ValueError):
        dense_two_particle_propagator(RingConfig(14), 0.1)


@pytest.mark.parametrize("case,pair,alice,statistics,ordering", [
    (ClosedFormCase.F12_A12, (1, 2), [1, 2], "fermion", "partition"),
    (ClosedFormCase.F13_A12, (1, 3), [1, 2], "boson", "partition"),
    (ClosedFormCase.F23_A12, (2, 3), [1, 2], "fermion", "partition"),
    (ClosedFormCase.F13_A13_FERMION, (1, 3), [1, 3], "fermion", "site"),
    (ClosedFormCase.F13_A13_BOSON, (1, 3), [1, 3], "boson", "partition"),
    (ClosedFormCase.BOSON_DOUBLE_OCC, (1, 1), [1, 3], "boson", "partition"),
])
def test_closed_forms_on_coarse_grid(case, pair, alice, statistics, ordering):
    cfg = RingConfig(4, statistics=statistics)
    part = Partition.of(4, alice)
    for gt in np.linspace(0, 2 * math.pi, 37):
        ep = entanglement_of_particles(evolve(cfg, pair, gt), part, ordering=ordering)
        assert abs(ep - closed_form_ep(case, gt)) < 1e-9


def test_f13_a12_closed_form_endpoints():
    # cos(2 gt) = +-1: the pair sits on (1,3) or (2,4), one particle per side, product state
    assert closed_form_ep(ClosedFormCase.F13_A12, 0.0) == 0.0
    # cos(2 gt) = 0: rho_A is maximally mixed and P1 = 1/2
    assert abs(closed_form_ep(ClosedFormCase.F13_A12, math.pi / 4) - 0.5 * math.log(2)) < 1e-15
