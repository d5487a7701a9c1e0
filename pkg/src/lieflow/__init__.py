"""lieflow: solvers for first-order systems generated by a
finite-dimensional Lie algebra of vector fields.

The pieces fit together like this: a :class:`LieAlgebra` fixes structure
constants, a :class:`MatrixRep` realizes them as matrices, a
:class:`CoefficientCurve` supplies the time-dependent coefficients, and
the solvers produce either a :class:`GroupTrajectory` (direct matrix
integration) or :class:`CanonicalCoords` (product-of-exponentials
factorization).  Homogeneous-space actions turn group trajectories into
solutions of the underlying nonlinear system; superposition rules
combine particular solutions; reduction splits a solved part off the
group equation.  ``physics`` holds the worked spin and uniform-force
systems, and ``cli`` exposes everything as the ``lieflow`` command.
"""

from .algebra import (
    BUILTIN_ALGEBRAS,
    BUILTIN_REPRESENTATIONS,
    LieAlgebra,
    MatrixRep,
    builtin_algebra,
    builtin_representation,
    default_representation_name,
    load_algebra_json,
    load_representation_json,
)
from .curves import CoefficientCurve, parse_component_token
from .errors import (
    ChartExitError,
    CoordinateBreakdownError,
    DegenerateInputError,
    DimensionError,
    DivergenceError,
    InvalidLiftError,
    LieFlowError,
    NotQuadratureReducibleError,
    NumericalBreakdownError,
    PoleError,
    RepresentationError,
    SetupError,
    StructureError,
)
from .groupflow import GroupTrajectory, solve_group_direct, uniform_grid
from .homogeneous import (
    ACTION_TAGS,
    AffineLineAction,
    HeisenbergPlaneAction,
    HomogeneousAction,
    PointCurve,
    Sl2HomographyAction,
    action_by_tag,
    group_to_riccati_coefficients,
    riccati_to_group_coefficients,
)
from .kernels import USING_COMPILED_KERNELS, expm
from .physics import (
    ClassicalMotion,
    LinearPotentialDrive,
    MagneticDrive,
    MomentumWavefunction,
    PropagatorFactors,
    QuantumMotion,
    SpinEvolution,
    classical_linear_potential,
    covering_map,
    propagator_factors,
    quantum_linear_potential,
    spin_evolution,
)
from .reduction import (
    GaugeCurve,
    ReducedSystem,
    gauge_transform_coefficients,
    lift_solution,
    reassemble,
    reduce_to_subgroup,
    riccati_reciprocal_reduction,
    riccati_shift_reduction,
    right_log_rates,
    sl2_two_solution_lift,
)
from .superposition import (
    ProjectivePoint,
    SuperpositionRule,
    cross_ratio,
    fit_constants,
    superpose_affine,
    superpose_linear,
    superpose_planar_sl2,
    superpose_riccati,
)
from .weinorman import (
    CanonicalCoords,
    cumulative_integral_half_grid,
    quadrature_solve,
    reconstruct,
    solve_wei_norman,
    wn_step_matrix,
)

__version__ = "1.0.0"

__all__ = [
    "__version__",
    "ACTION_TAGS",
    "AffineLineAction",
    "BUILTIN_ALGEBRAS",
    "BUILTIN_REPRESENTATIONS",
    "CanonicalCoords",
    "ChartExitError",
    "ClassicalMotion",
    "CoefficientCurve",
    "CoordinateBreakdownError",
    "DegenerateInputError",
    "DimensionError",
    "DivergenceError",
    "GaugeCurve",
    "GroupTrajectory",
    "HeisenbergPlaneAction",
    "HomogeneousAction",
    "InvalidLiftError",
    "LieAlgebra",
    "LieFlowError",
    "LinearPotentialDrive",
    "MagneticDrive",
    "MatrixRep",
    "MomentumWavefunction",
    "NotQuadratureReducibleError",
    "NumericalBreakdownError",
    "PointCurve",
    "PoleError",
    "ProjectivePoint",
    "PropagatorFactors",
    "QuantumMotion",
    "RepresentationError",
    "SetupError",
    "Sl2HomographyAction",
    "SpinEvolution",
    "StructureError",
    "SuperpositionRule",
    "USING_COMPILED_KERNELS",
    "action_by_tag",
    "builtin_algebra",
    "builtin_representation",
    "classical_linear_potential",
    "covering_map",
    "cross_ratio",
    "cumulative_integral_half_grid",
    "default_representation_name",
    "expm",
    "fit_constants",
    "gauge_transform_coefficients",
    "group_to_riccati_coefficients",
    "lift_solution",
    "load_algebra_json",
    "load_representation_json",
    "parse_component_token",
    "propagator_factors",
    "quadrature_solve",
    "quantum_linear_potential",
    "reassemble",
    "reconstruct",
    "reduce_to_subgroup",
    "riccati_reciprocal_reduction",
    "riccati_shift_reduction",
    "riccati_to_group_coefficients",
    "right_log_rates",
    "sl2_two_solution_lift",
    "solve_group_direct",
    "solve_wei_norman",
    "spin_evolution",
    "superpose_affine",
    "superpose_linear",
    "superpose_planar_sl2",
    "superpose_riccati",
    "uniform_grid",
    "wn_step_matrix",
]
