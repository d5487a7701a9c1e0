"""Exception hierarchy for the lieflow toolkit.

Two broad classes matter for callers (and for the CLI's exit codes):

* :class:`SetupError` — the inputs were malformed or inconsistent
  (dimension mismatches, invalid permutations, files that do not parse,
  degenerate data).  CLI exit code 1.
* :class:`NumericalBreakdownError` — the inputs were fine but the
  computation hit a genuine numerical boundary (solution escaping to
  infinity, a coordinate chart collapsing, a pole in a superposition
  formula).  These carry the time of failure where applicable.  CLI
  exit code 2.
"""

from __future__ import annotations


class LieFlowError(Exception):
    """Base class for all lieflow errors."""


class SetupError(LieFlowError):
    """Invalid or inconsistent input data (CLI exit code 1)."""


class DimensionError(SetupError):
    """Array or vector shape does not match the algebra/representation."""


class StructureError(SetupError):
    """Structure constants violate antisymmetry or the Jacobi identity."""


class RepresentationError(SetupError):
    """Matrices fail the homomorphism property, or a matrix does not
    decompose in the representation's basis to the required residual."""


class DegenerateInputError(SetupError):
    """Input solutions are degenerate (coincident points, dependent
    fundamental set) and the requested formula is undefined for them."""


class NotQuadratureReducibleError(SetupError):
    """The coordinate ODE system for the requested factorization order is
    not reducible to iterated quadratures; fall back to the RK4 solver."""


class InvalidLiftError(SetupError):
    """A subgroup reduction produced coefficient components outside the
    subalgebra beyond tolerance: the supplied curve does not actually lift
    a (sufficiently accurate) particular solution."""


class NumericalBreakdownError(LieFlowError):
    """A computation failed at a specific time for numerical reasons
    (CLI exit code 2)."""

    def __init__(self, message: str, *, t: float | None = None):
        super().__init__(message)
        self.t = t


class DivergenceError(NumericalBreakdownError):
    """The integrated state left the range of floating point numbers."""


class CoordinateBreakdownError(NumericalBreakdownError):
    """The product-of-exponentials step matrix became singular: the chosen
    factorization order is only a local coordinate system and its validity
    boundary was reached."""

    def __init__(self, message: str, *, t: float | None = None,
                 v=None, det: float | None = None):
        super().__init__(message, t=t)
        self.v = v
        self.det = det


class PoleError(NumericalBreakdownError):
    """A superposition denominator vanished (the formula has a pole at the
    requested constants/inputs)."""


class ChartExitError(NumericalBreakdownError):
    """A curve left the coordinate chart required by the requested
    operation (for example, a particular solution passing through the
    point at infinity while a finite-chart section is in use)."""
