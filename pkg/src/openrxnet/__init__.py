"""Compositional modeling of open reaction networks.

Open networks are cospans of finite sets decorated with reaction
networks; they compose by gluing boundaries.  Gray-boxing compiles them
to open mass-action dynamical systems, and black-boxing extracts the
steady-state relation between boundary concentrations and flows.  The
structural laws of this algebra are executable: see
:mod:`openrxnet.laws` and the ``check-laws`` CLI subcommand.
"""

from .finset import (Cospan, DecoratedCospan, DecorationKind, FinFun, FinSet,
                     compose_open, coproduct, dagger, empty_open,
                     identity_open, is_equivalent, pushout, tensor_open)
from .network import (NETWORK_DECORATION, Complex, PetriView, ReactionNetwork,
                      Transition, complexes, from_petri, is_markov,
                      map_species, open_network, to_petri)
from .poly import Poly
from .dynamics import (FIELD_DECORATION, FlowSpec, PolyField, Profile,
                       Trajectory, emit_equations, grey_box,
                       mass_action_field, map_variables, open_field,
                       open_rate_rhs, pullback, pushforward, simulate)
from .blackbox import (STEADY_TOL, BoundaryPartition, FlowSolution,
                       FunctorialityReport, InternalSolve, LinearRelation,
                       SteadyTuple, check_functoriality, check_membership,
                       compose_linear, flows_for, identity_relation,
                       linear_blackbox, partition, residual, sample_blackbox,
                       solve_internal, is_steady, tuple_coordinates)
from .dsl import NetworkDocument, parse, parse_document, render
from .errors import (ApexTooLargeError, BoundaryMismatchError, DslError,
                     NonFiniteStateError, NonlinearFieldError, OpenRxnetError)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
