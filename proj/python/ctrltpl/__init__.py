"""Control templates, observability Gramians, and hybrid observer feedback
for state-affine systems."""

from ._core import (
    CtrltplError,
    InputSignal,
    MultiPoly,
    StateAffineSystem,
    TemplateFamily,
    build_general_position,
    certify_template,
    coeffs_from_roots,
    gramian,
    integrate_gain,
    kalman_determinant,
    load_system,
    mimo_template,
    observable_at,
    rotation_to,
    saturate,
    scaled_rotated,
    simulate_scenario,
    siso_template,
    smin_lower_bound,
    steady_state_gain,
    transition_matrix,
    variation_of_constants_S,
    verify_general_position,
)

__all__ = [
    "CtrltplError",
    "InputSignal",
    "MultiPoly",
    "StateAffineSystem",
    "TemplateFamily",
    "build_general_position",
    "certify_template",
    "coeffs_from_roots",
    "gramian",
    "integrate_gain",
    "kalman_determinant",
    "load_system",
    "mimo_template",
    "observable_at",
    "rotation_to",
    "saturate",
    "scaled_rotated",
    "simulate_scenario",
    "siso_template",
    "smin_lower_bound",
    "steady_state_gain",
    "transition_matrix",
    "variation_of_constants_S",
    "verify_general_position",
]
