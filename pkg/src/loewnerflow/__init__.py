"""Numerical Loewner theory in the unit disc and the right half-plane.

Compose Herglotz vector fields from Berkson-Porta data (tau, p), integrate
the generalized Loewner equation into evolution families, and check their
defining properties numerically.
"""
from .config import FieldSpec, build_field, load_field
from .errors import (AmbiguousDecomposition, ConfigError, ContractionFailure, DegenerateInput,
                     LoewnerError, NotAGenerator, NumericalFailure, QuadratureFailure,
                     ValidationFailure)
from .families import (HydrodynamicFit, MultiplierCurve, claim1_residual, claim2_residual,
                       denjoy_wolff_estimate, hydrodynamic_coefficients, multiplier_check,
                       multiplier_curve, multiplier_lambda, semigroup_family)
from .field import (IDENTITY, BerksonPortaData, BPSnapshot, FieldBounds, HerglotzVectorField,
                    bounds, compose_bp, decompose_bp, eval_field, field_derivative,
                    field_from_callable, is_generator, polynomial_field)
from .geometry import (BoundaryPoint, DiscPoint, HalfPlanePoint, cayley, cayley_forward,
                       cayley_inverse, hyperbolic_distance, parse_complex)
from .herglotz import (DrivingPoint, HalfPlaneField, HerglotzFunction, PiecewiseSignal,
                       brownian_driving, cayley_kernel_p, chordal_field, chordal_p, constant_p,
                       constant_signal, eval_signal, exponential_signal, node_signal, radial_p,
                       table_p, transfer_to_halfplane, user_p, validate_herglotz)
from .integrator import (EvolutionFamilyHandle, GridResult, SolverOptions, Trajectory, evolve,
                         evolve_grid, evolve_with_derivative, halfplane_evolve, partial_s,
                         picard_oracle)
from .report import VerificationReport
from .verify import (builtin_families, check_contraction, check_ef3, check_semigroup,
                     check_univalence, run_suite)

__version__ = "0.1.0"
