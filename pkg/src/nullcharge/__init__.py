"""Classical electrodynamics of massless point charges."""
from . import _backend
from .conformal import (ConformalJacobian, ConformalParams, conformal_jacobian, dilate,
                        eom_invariance_residual, special_conformal, transform_field)
from .eigen import (EigenSolution, FieldClass, ParticleState, admissible_velocities,
                    classify_field, eigenvalue_roots, propagate, velocity_map)
from .fields import FieldKind, FieldSpec, make_field
from .minkowski import ETA, EmTensor, FieldEB, em_invariants, em_tensor_from_eb, mdot
from .radiation import cutoff_factors, radiated_angular_momentum, radiated_flux, radiated_momentum
from .retarded import field_tensor, lw_potential, retarded_frame, retarded_time
from .worldline import HelicalWorldline, SampledWorldline, StraightWorldline, circular

BACKEND = _backend.NAME

__all__ = [
    "BACKEND", "ETA", "ConformalJacobian", "ConformalParams", "EigenSolution", "EmTensor",
    "FieldClass", "FieldEB", "FieldKind", "FieldSpec", "HelicalWorldline", "ParticleState",
    "SampledWorldline", "StraightWorldline", "admissible_velocities", "circular",
    "classify_field", "conformal_jacobian", "cutoff_factors", "dilate", "eigenvalue_roots",
    "em_invariants", "em_tensor_from_eb", "eom_invariance_residual", "field_tensor",
    "lw_potential", "make_field", "mdot", "propagate", "radiated_angular_momentum",
    "radiated_flux", "radiated_momentum", "retarded_frame", "retarded_time",
    "special_conformal", "transform_field", "velocity_map",
]
