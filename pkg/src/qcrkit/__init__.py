"""Toolkit for multipartite quantum cryptographic resource states.

Construct dealer/player states whose computational-basis measurement yields
perfectly secure shared secrets, certify them operationally, transform them
(player reduction, dealer-side composition), and analyze entanglement
structure across bipartite cuts.
"""
from .construct import (
    ShieldSeed,
    TwistingFamily,
    build_example_state,
    build_ghz_qcr,
    build_private_state,
    build_twisted_qcr,
    haar_unitary,
    maximally_entangled,
    per_party_twist,
    random_density,
    random_party_twist,
    random_private_state,
    random_pure,
    random_separable_density,
    relabel_negated_player,
)
from .entanglement import (
    CutResult,
    CutSpec,
    PptReport,
    all_dealer_cuts_ppt,
    ppt_check,
    trace_distance,
)
from .protocols import (
    CompositionRecord,
    InputVerificationError,
    ReductionOutcome,
    compose,
    cx_matrix,
    expand_from_private,
    reduce,
    shift_matrix,
)
from .registers import (
    DEALER,
    ENV_PARTY,
    IndexSet,
    Subsystem,
    SystemLayout,
    digit_sum,
    index_set,
    standard_layout,
)
from .statefile import StateFileError, read_state, state_to_text, text_to_state, write_state
from .states import (
    MeasurementOutcome,
    QuantumState,
    apply_controlled,
    apply_unitary,
    measure_computational,
    measurement_distribution,
    partial_trace,
    partial_transpose,
    project_registers,
    purify,
    tensor_product,
    trace_norm,
)
from .verify import (
    CoalitionReport,
    CoalitionSpec,
    ConditionIReport,
    VerificationReport,
    check_condition_i,
    check_condition_ii,
    is_qcr,
)

__version__ = "0.1.0"

__all__ = [
    "DEALER",
    "ENV_PARTY",
    "CoalitionReport",
    "CoalitionSpec",
    "CompositionRecord",
    "ConditionIReport",
    "CutResult",
    "CutSpec",
    "IndexSet",
    "InputVerificationError",
    "MeasurementOutcome",
    "PptReport",
    "QuantumState",
    "ReductionOutcome",
    "ShieldSeed",
    "StateFileError",
    "Subsystem",
    "SystemLayout",
    "TwistingFamily",
    "VerificationReport",
    "all_dealer_cuts_ppt",
    "apply_controlled",
    "apply_unitary",
    "build_example_state",
    "build_ghz_qcr",
    "build_private_state",
    "build_twisted_qcr",
    "check_condition_i",
    "check_condition_ii",
    "compose",
    "cx_matrix",
    "digit_sum",
    "expand_from_private",
    "haar_unitary",
    "index_set",
    "is_qcr",
    "maximally_entangled",
    "measure_computational",
    "measurement_distribution",
    "partial_trace",
    "partial_transpose",
    "per_party_twist",
    "ppt_check",
    "project_registers",
    "purify",
    "random_density",
    "random_party_twist",
    "random_private_state",
    "random_pure",
    "random_separable_density",
    "read_state",
    "reduce",
    "relabel_negated_player",
    "shift_matrix",
    "standard_layout",
    "state_to_text",
    "tensor_product",
    "text_to_state",
    "trace_distance",
    "trace_norm",
    "write_state",
]
