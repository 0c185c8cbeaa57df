"""Riemannian gradients, multipliers and Hessians on constraint manifolds.

The manifold is a regular level set ``S = F^{-1}(c)`` of constraint functions
on a Euclidean space; every quantity is computed from ambient gradients and
Hessians.  Closed forms are provided for the orthogonal group and for the
2-power cost on SO(3).
"""
from .errors import (
    ConstraintHessianError,
    ContractViolation,
    NoCriticalSetError,
    OffManifoldError,
    ParameterError,
    SingularGramianError,
)
from .fields import (
    ScalarField,
    ambient_hessian,
    constant_field,
    fd_gradient,
    fd_hessian,
    half_norm_squared,
    linear_field,
    quadratic_field,
)
from .gramian import (
    ConstraintSystem,
    GramianReport,
    RestrictedHessian,
    TangentBasis,
    gramian,
    gramian_report,
    induced_gradient,
    null_space_basis,
    restricted_hessian,
    sigma_multipliers,
    standard_control_field,
)
from .orthogonal import (
    OrthogonalPoint,
    SkewBasisElement,
    constraint_system,
    geodesic_second_derivative,
    gramian_determinant,
    matrix_exponential,
    nu_basis,
    restricted_hessian_on,
    sigma_closed_form,
    tangent_basis,
)
from .so3 import (
    CriticalPointReport,
    RotationSampleSet,
    UnitQuaternion,
    critical_sets,
    example_samples,
    hessian_coefficients,
    power2_cost,
    quaternion_to_rotation,
    solve_Q,
    sweep,
    verify_critical,
)
from .stability import (
    StabilityVerdict,
    VectorFieldSpec,
    augmented_hessian,
    lyapunov_decay_check,
    stability_certificate,
    symmetric_eigenvalues,
)

__version__ = "0.1.0"

__all__ = [
    "ConstraintHessianError",
    "ContractViolation",
    "NoCriticalSetError",
    "OffManifoldError",
    "ParameterError",
    "SingularGramianError",
    "ScalarField",
    "ambient_hessian",
    "constant_field",
    "fd_gradient",
    "fd_hessian",
    "half_norm_squared",
    "linear_field",
    "quadratic_field",
    "ConstraintSystem",
    "GramianReport",
    "RestrictedHessian",
    "TangentBasis",
    "gramian",
    "gramian_report",
    "induced_gradient",
    "null_space_basis",
    "restricted_hessian",
    "sigma_multipliers",
    "standard_control_field",
    "OrthogonalPoint",
    "SkewBasisElement",
    "constraint_system",
    "geodesic_second_derivative",
    "gramian_determinant",
    "matrix_exponential",
    "nu_basis",
    "restricted_hessian_on",
    "sigma_closed_form",
    "tangent_basis",
    "CriticalPointReport",
    "RotationSampleSet",
    "UnitQuaternion",
    "critical_sets",
    "example_samples",
    "hessian_coefficients",
    "power2_cost",
    "quaternion_to_rotation",
    "solve_Q",
    "sweep",
    "verify_critical",
    "StabilityVerdict",
    "VectorFieldSpec",
    "augmented_hessian",
    "lyapunov_decay_check",
    "stability_certificate",
    "symmetric_eigenvalues",
]
