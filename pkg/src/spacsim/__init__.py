"""Numerical simulator for postselected von Neumann measurement with a
single-photon-added coherent pointer state.

Builds the conditioned pointer state after an impulsive qubit-pointer
coupling followed by postselection, and evaluates its photon-number
distribution, Mandel Q factor, and quadrature squeezing, with an
independent dense-evolution oracle for validation.
"""

from .errors import (
    ConvergenceError,
    DegeneratePostselectionError,
    DimensionMismatchError,
    InvalidDimensionError,
    InvalidParameterError,
    OracleDimensionError,
    SpacsimError,
    TruncationError,
    UndefinedQError,
    UndefinedWeakValueError,
)
from .experiments import (
    ParamSet,
    PointResult,
    SweepResult,
    SweepRow,
    SweepSpec,
    TrendReport,
    evaluate_point,
    figure_preset,
    run_sweep,
    trend_checks,
)
from .fock import (
    CoherentParams,
    StateVector,
    adaptive_dim,
    apply,
    coherent_state,
    displacement_matrix,
    expectation,
    fock_state,
    inner_product,
    ladder_ops,
    norm,
    normalize,
    number_op,
    phase_quadrature,
    quadrature_ops,
    spacs_state,
)
from .measurement import (
    MeasurementConfig,
    SelectionConfig,
    analytic_beta,
    branch_superposition,
    final_pointer_state,
    joint_evolution_project,
    naive_postselection_probability,
    true_postselection_probability,
    weak_value,
)
from .observables import (
    analytic_q_initial,
    analytic_s_initial,
    edge_tail_mass,
    mandel_q,
    photon_distribution,
    squeezing,
)

__version__ = "0.1.0"
