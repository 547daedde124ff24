"""Resonant multilevel amplitude damping (ReMAD) channels.

Construction of qudit ReMAD/MAD channels from transition matrices,
degradability and antidegradability tests, and capacity computations.
"""

from .capacities import (
    CapacityResult,
    DiagonalInput,
    Method,
    capacity_dispatch,
    coherent_information,
    diagonal_q1,
    edge_gamma10_one_capacity,
    edge_q,
    entanglement_assisted_capacity,
    mutual_information,
    plane_gamma10_zero_capacity,
    plane_gamma21_zero_capacity,
    qubit_adc_capacity,
)
from .channels import (
    KrausSet,
    QutritParams,
    TransitionMatrix,
    apply_channel,
    beamsplitter_params,
    beamsplitter_transition,
    complementary_transition,
    covariance_unitary,
    mad_kraus,
    qutrit_params_to_transition,
    remad_kraus,
    stinespring_apply,
)
from .composition import (
    CompositionOutcome,
    compose_superoperators,
    compose_transitions,
    gamma20_interpolator,
)
from .config import Tolerances, get_tolerances
from .liouville import (
    ChannelClassification,
    ChoiMatrix,
    Superoperator,
    Verdict,
    analytic_antidegrading_params,
    analytic_degrading_params,
    choi_of,
    classify_qutrit,
    devectorize,
    invert_superoperator,
    is_cptp,
    kernel_inclusion_nondegradable,
    qutrit_inverse_closed_form,
    superoperator_of,
    vectorize,
)

__version__ = "0.1.0"
