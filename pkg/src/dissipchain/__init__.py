"""Simulation of qubit chains in which each neighbouring pair decays into a shared environment."""
from .dynamics import (SteadyStateReport, Trajectory, commutant_dimension, kernel_report,
                       propagate, steady_state_from, time_grid)
from .entanglement import (BirthClass, ConcurrenceSeries, Onset, concurrence, concurrence_series,
                           partial_trace, sudden_birth)
from .errors import *  # noqa: F401,F403
from .model import (Boundary, ChainSpec, Liouvillian, basis_state, devectorize, link_operator,
                    liouvillian, lowering_operator, total_excitation, vectorize)

__version__ = "0.1.0"
