"""Spectral solver and verification suite for two Euler-Bernoulli beam spans
joined by a point mass, with an independent finite-element cross-check."""

__version__ = "0.1.0"

from .config import (
    BeamSystem,
    CoefficientProfile,
    ConfigError,
    ConstraintError,
    eval_coeff,
    load_system,
    parse_system,
    serialize_system,
    uniform_system,
    variable_system,
)
from .fem import assemble, compare, solve_generalized
from .fundamental import (
    FundamentalSet,
    SubwronskianTriple,
    left_fundamental,
    right_fundamental,
    shear_identity_residual,
    subwronskians,
    vanishing_scan,
)
from .oscillation import (
    BoundaryVariant,
    dim_check,
    leighton_nehari_transform,
    positivity_propagation,
    simple_zero_scan,
    transform_identity_residual,
)
from .quasi import (
    IntegrationError,
    Trajectory,
    integrate,
    integrate_scaled,
    vector_field,
)
from .spectrum import (
    Eigenpair,
    VerificationReport,
    char_det,
    eigenpair,
    energy_form,
    h_inner,
    interface_matrix,
    refine,
    scan,
    solve_modes,
    step_classify,
    verify,
)

__all__ = [
    "BeamSystem",
    "BoundaryVariant",
    "CoefficientProfile",
    "ConfigError",
    "ConstraintError",
    "Eigenpair",
    "FundamentalSet",
    "IntegrationError",
    "SubwronskianTriple",
    "Trajectory",
    "VerificationReport",
    "assemble",
    "char_det",
    "compare",
    "dim_check",
    "eigenpair",
    "energy_form",
    "eval_coeff",
    "h_inner",
    "integrate",
    "integrate_scaled",
    "interface_matrix",
    "left_fundamental",
    "leighton_nehari_transform",
    "load_system",
    "parse_system",
    "positivity_propagation",
    "refine",
    "right_fundamental",
    "scan",
    "serialize_system",
    "shear_identity_residual",
    "simple_zero_scan",
    "solve_generalized",
    "solve_modes",
    "step_classify",
    "subwronskians",
    "transform_identity_residual",
    "uniform_system",
    "vanishing_scan",
    "variable_system",
    "vector_field",
    "verify",
]
