"""Optimal single-copy conversion of bipartite pure entangled states
under local operations and classical communication.

The package answers, exactly where the inputs allow it: with what
probability can one pure state be turned into another, which explicit
local protocol achieves that optimum, and which monotone certifies that
nothing better exists.
"""

from .conversion import (Breakpoints, ConversionPlan, DiagonalOperator,
                         InfeasibleConversionError, IntermediateOrderError,
                         MultiCopyBound, MULTI_COPY_POSSIBLE,
                         PlanInvariantError, SINGLE_COPY_OPTIMAL,
                         breakpoints, build_plan, intermediate_state,
                         measurement_operators, multi_copy_bound,
                         optimal_probability, optimal_probability_detail,
                         tensor_conversion_probability)
from .locc import (Announce, Branch, BranchLimitError, ExactMonomial,
                   LoccProtocol, LocalMeasurement, LocalUnitary,
                   MajorizationError, MeasurementOutcome,
                   MonotoneViolationError, ProtocolError, SimulationReport,
                   apply_measurement, build_full_protocol,
                   deterministic_protocol, exhaustive_run,
                   exhaustive_run_exact, monotone_audit, monte_carlo_run,
                   success_probability)
from .monotones import (Ensemble, MonotoneVector, ensemble_average,
                        entanglement_monotone, entropy_of_entanglement,
                        monotone_profile, smallest_eigenvalue_sum)
from .ordering import (BOTH_UNIT, EQUAL, FIRST_GREATER, SECOND_GREATER,
                       ComparisonResult, INTRANSITIVE_TRIPLE,
                       NonadditivityInstance, SUPERMULTIPLICATIVE_PAIR,
                       compare, find_cycle, nonadditivity_search)
from .schmidt import (BipartiteState, DensityOperator, InvalidStateError,
                      SchmidtVector, majorizes, reduced_density,
                      schmidt_decompose, state_from_schmidt, tensor_power)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
