"""Monitored quantum walks on finite graphs."""

__version__ = "0.1.0"

from .kernels import BACKEND
from .monitored import (
    AmplitudeSeries,
    EosSet,
    MonitoredOperator,
    amplitude_matrix_power,
    amplitude_path_sum,
    amplitude_projected,
    amplitude_recursion,
    degenerate_eigenvector,
    detect_eos,
    eigenvalues,
    equivalence_class_check,
    equivalence_classes,
    kernel,
    monitored_matrix,
    path_sum_series,
    projected_matrix,
    recursion_rows,
    resolvent_pole_residual,
    stationary_states,
)
from .observables import (
    ProbabilityMap,
    TransitionStats,
    detect_mf,
    mtt_matrix,
    probability_map,
    transition_stats,
)
from .spectral import (
    PhaseVector,
    SpectralModel,
    build_identity_basis,
    build_localized_basis,
    build_plane_wave_basis,
    hamiltonian_matrix,
    inverse_participation_ratio,
    ipr_localized_closed_form,
    linear_spectrum,
    make_model,
    phase_factors,
    unitary_matrix,
    validate_basis,
)
from .unitary_avg import (
    AveragedProbabilityMatrix,
    averaged_probability_matrix,
    detailed_balance_residual,
    time_averaged_transition,
    ue_transition_closed_form,
)

