"""Quantum master equations with Bohr-frequency clustering, checked against HEOM.

Energies are in cm^-1, times in fs and temperatures in K throughout.
"""

from .bath import (
    BathDescriptor,
    ExponentialMode,
    drude_lorentz_exact_gamma,
    drude_lorentz_high_temp,
    eval_Gamma,
    gamma_S_pair,
    kms_mismatch,
    kms_residual,
)
from .dynamics import (
    PropagationDiverged,
    TimeGrid,
    Trajectory,
    coherence_series,
    default_dt,
    fit_decay_rate,
    positivity_monitor,
    propagate,
    trace_distance_series,
)
from .generators import (
    KINDS,
    Generator,
    GKLSCertificate,
    build,
    build_davies,
    build_nonsecular_davies,
    build_redfield,
    build_unified,
    build_unified_simplified,
    gkls_certificate,
)
from .heom import UnsupportedBathError, build_hierarchy, convergence_scan, propagate_heom
from .linalg import InvariantError, hermitian_eig, trace_distance, trace_norm
from .scenarios import (
    ScenarioSpec,
    builtin,
    builtin_dephasing_dimer,
    builtin_two_qubit_three_bath,
    dephasing_analytic_coherences,
    slowest_decay_rate,
)
from .spectral import (
    IncompatibleReferenceError,
    ReferenceSplit,
    aggregate_jump_operators,
    bohr_frequencies,
    decompose,
    jump_operators,
    reference_split_by_tolerance,
    reference_split_explicit,
    validity_diagnostics,
)
from .thermo import covariance_residual, entropy_production, gibbs_state, stationarity_residual
from .units import CM_TO_RAD_PER_FS, KB_CODATA, KB_REPRODUCTION, inverse_temperature, rate_from_lifetime_fs

__version__ = "0.1.0"
