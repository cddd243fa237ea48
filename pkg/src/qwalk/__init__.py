"""Two-particle continuous-time quantum walks and entanglement of particles."""

from .entanglement import (
    Partition,
    entanglement_of_particles,
    ep_time_series,
    linear_entropy,
    reduced_density_matrix,
    saturation_interval,
    sector_weights,
    von_neumann_entropy,
)
from .ring import PairState, RingConfig, Statistics, correlation_map, evolve

__version__ = "0.1.0"
