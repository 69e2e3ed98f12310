"""Numerical laboratory for the 1D isentropic Carrollian fluid system.

A 2x2 conservative system for the stress sigma and inverse velocity beta,
regularised by vanishing viscosity, together with the structural objects
that make its entropy theory checkable at desk scale: the admissible
region sigma - |beta| >= c0, Riemann invariants w = sigma +/- beta that
decouple the dynamics into scalar equations, entropy pairs generated by
the d'Alembert formula, and the kinetic dissipation measures.
"""

from .analysis import (
    AuditResult,
    Bump1D,
    ConvergenceReport,
    DissipationField,
    KineticMeasureHistogram,
    SpaceTimeTestFunction,
    bump_battery,
    bump_test_function,
    convergence_metrics,
    entropy_dissipation_field,
    entropy_inequality_check,
    entropy_weak_functional,
    kinetic_measures,
    weak_residual,
)
from .entropy import (
    CATALOG_NAMES,
    EntropyPair,
    TestFunctionPair,
    catalog_pair,
    certify_convexity,
    entropy_compatibility_residual,
    entropy_equation_residual,
    pair_from_f,
    pair_from_g,
    special_pair,
    validate_test_pair,
)
from .errors import (
    AdmissibilityError,
    CarrollianError,
    ConfigError,
    DomainError,
    InputError,
    InvariantViolationError,
    ParameterError,
    QuadratureError,
)
from .flux import (
    CutoffProfile,
    EigenData,
    cutoff_primitive,
    eigen_structure,
    flux,
    flux_jacobian,
    modified_flux_matrix,
    modified_speeds,
    psi_cutoff,
    psi_cutoff_prime,
)
from .initial_data import build_initial_state, constant_state, demo_sine, riemann_jump
from .phase import (
    AdmissibilityReport,
    FluidState,
    Grid1D,
    RiemannState,
    check_admissible,
    from_riemann,
    generalized_pressure,
    l2_energy,
    load_state_json,
    save_state_json,
    state_from_csv,
    state_to_csv,
    to_riemann,
)
from .quadrature import adaptive_simpson
from .solver import (
    SolverConfig,
    StepReport,
    Trajectory,
    central_gradient,
    run,
    step_coupled,
    step_modified,
    step_scalar_ri,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError",
    "AdmissibilityReport",
    "AuditResult",
    "Bump1D",
    "CATALOG_NAMES",
    "CarrollianError",
    "ConfigError",
    "ConvergenceReport",
    "CutoffProfile",
    "DissipationField",
    "DomainError",
    "EigenData",
    "EntropyPair",
    "FluidState",
    "Grid1D",
    "InputError",
    "InvariantViolationError",
    "KineticMeasureHistogram",
    "ParameterError",
    "QuadratureError",
    "RiemannState",
    "SolverConfig",
    "SpaceTimeTestFunction",
    "StepReport",
    "TestFunctionPair",
    "Trajectory",
    "adaptive_simpson",
    "build_initial_state",
    "bump_battery",
    "bump_test_function",
    "catalog_pair",
    "central_gradient",
    "certify_convexity",
    "check_admissible",
    "constant_state",
    "convergence_metrics",
    "cutoff_primitive",
    "demo_sine",
    "eigen_structure",
    "entropy_compatibility_residual",
    "entropy_dissipation_field",
    "entropy_equation_residual",
    "entropy_inequality_check",
    "entropy_weak_functional",
    "flux",
    "flux_jacobian",
    "from_riemann",
    "generalized_pressure",
    "kinetic_measures",
    "l2_energy",
    "load_state_json",
    "modified_flux_matrix",
    "modified_speeds",
    "pair_from_f",
    "pair_from_g",
    "psi_cutoff",
    "psi_cutoff_prime",
    "riemann_jump",
    "run",
    "save_state_json",
    "special_pair",
    "state_from_csv",
    "state_to_csv",
    "step_coupled",
    "step_modified",
    "step_scalar_ri",
    "to_riemann",
    "validate_test_pair",
    "weak_residual",
]
