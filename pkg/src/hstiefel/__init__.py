"""Quadratic Morse-Bott function Tr(P*P) on quaternionic Stiefel manifolds."""

from .flow import closed_form_flow, flow_constants, flow_limits, numerical_flow
from .group_action import (
    GroupElement,
    act_point,
    act_tangent,
    isotropy_embed,
    random_group_element,
    transitivity_witness,
)
from .morse import (
    critical_level,
    critical_levels,
    gradient,
    height,
    hessian_apply,
    hessian_reference,
    hessian_spectrum,
    is_critical,
    notable_point,
    sigma_invariants,
)
from .quaternion import Quaternion, QuaternionMatrix, adjoint, frobenius_inner, mat_mul, qmul, re_trace
from .qsvd import complete_symplectic, relative_svd, svd
from .stiefel import (
    StiefelPoint,
    TangentVector,
    normal_project,
    polar_retract,
    random_point,
    random_tangent,
    tangent_basis,
    tangent_project,
    validate_point,
)

__version__ = "0.1.0"
