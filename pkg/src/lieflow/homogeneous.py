"""Concrete group actions on homogeneous spaces and solution propagation.

Once the group equation ``dg/dt = -sum b_a(t) M_a g`` is solved, every
associated system on a space the group acts on is solved too: the curve
through ``x0`` is ``x(t) = act(g(t), x0)``.  This module ships the three
actions the toolkit works with:

* ``sl2-homography`` — fractional linear maps of the compactified line,
* ``affine-line`` — ``x -> a x + c`` on the line,
* ``heisenberg-plane`` — unit upper-triangular 3x3 matrices moving phase
  points ``(x, p)`` through ``(x, p, 1)``.

Fundamental vector fields are computed numerically as the derivative of
``t -> act(exp(-t M_a), x)`` at ``t = 0`` (central differences with
Richardson extrapolation); closed forms are reserved for tests.

Sign dictionary (worth stating once, since every sign error lands here):
with fields ``X_a(x) = d/dt act(exp(-t M_a), x)|_0``, the propagated
curve satisfies ``dx/dt = sum_a b_a X_a(x)``.  For the homography action
the fields are ``(-1, -x, -x^2)``, so the scalar equation
``dx/dt = c0 + c1 x + c2 x^2`` corresponds to ``b = (-c0, -c1, -c2)``;
:func:`riccati_to_group_coefficients` and
:func:`group_to_riccati_coefficients` convert both ways.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .algebra import MatrixRep, builtin_representation
from .curves import CoefficientCurve
from .errors import ChartExitError, DimensionError, SetupError
from .groupflow import GroupTrajectory
from .superposition import ProjectivePoint

GROUP_TOL = 1e-6
_FD_STEP = 1e-6

__all__ = [
    "HomogeneousAction",
    "Sl2HomographyAction",
    "AffineLineAction",
    "HeisenbergPlaneAction",
    "PointCurve",
    "action_by_tag",
    "ACTION_TAGS",
    "act",
    "propagate",
    "fundamental_vector_field",
    "riccati_to_group_coefficients",
    "group_to_riccati_coefficients",
]


class PointCurve:
    """A time-sampled curve of points in an action's space.

    For the projective line the samples are homogeneous pairs and
    :meth:`values` places ``inf`` where the curve passes through the point
    at infinity; for the other spaces the samples are plain floats/pairs.
    """

    def __init__(self, ts, points, kind: str):
        self.ts = np.asarray(ts, dtype=float)
        self.kind = kind
        if kind == "projective-line":
            pts = [ProjectivePoint.from_value(p) for p in points]
            if len(pts) != self.ts.size:
                raise DimensionError("one point per time sample required")
            self.points = pts
        elif kind in ("line", "plane"):
            arr = np.asarray(points, dtype=float)
            want = (self.ts.size,) if kind == "line" else (self.ts.size, 2)
            if arr.shape != want:
                raise DimensionError("point array shape mismatch")
            self.points = arr
        else:
            raise SetupError(f"unknown point-curve kind {kind!r}")

    def __len__(self) -> int:
        return self.ts.size

    def values(self) -> np.ndarray:
        """Float samples; projective curves map the infinite point to
        ``inf``."""
        if self.kind == "projective-line":
            return np.array([p.value() for p in self.points])
        return self.points

    def finite_mask(self) -> np.ndarray:
        if self.kind == "projective-line":
            return np.array([not p.is_infinite for p in self.points])
        if self.kind == "plane":
            return np.isfinite(self.points).all(axis=1)
        return np.isfinite(self.points)

    def to_csv(self, path) -> None:
        from .fileio import write_point_curve_csv
        write_point_curve_csv(path, self)

    def __repr__(self) -> str:
        return f"<PointCurve {self.kind} {len(self)} samples>"


class HomogeneousAction:
    """Base class: a transitive matrix-group action on a small space."""

    tag: str = ""

    def __init__(self, rep: MatrixRep):
        self.rep = rep

    # subclasses implement: _check_group, apply, point_kind, coerce_point

    def act(self, g: np.ndarray, x):
        """Apply a group element to a point (membership checked)."""
        g = np.asarray(g)
        self._check_group(g)
        return self.apply(g, self.coerce_point(x))

    def propagate(self, traj: GroupTrajectory, x0) -> PointCurve:
        """Move ``x0`` with every sample of a group trajectory.  The
        result solves the associated system ``dx/dt = sum b_a X_a(x)``
        for the coefficients that produced the trajectory."""
        if traj.rep.size != self.rep.size:
            raise DimensionError(
                "trajectory representation does not match the action")
        x0 = self.coerce_point(x0)
        self._check_group(traj.gs[0])
        pts = [self.apply(g, x0) for g in traj.gs]
        return PointCurve(traj.ts, pts, self.point_kind)

    def fundamental_vector_field(self, alpha: int, x):
        """Tangent vector of ``t -> act(exp(-t M_alpha), x)`` at ``t=0``.

        Central finite differences with one Richardson step; callers
        needing exact fields should treat these as 1e-8-accurate.
        """
        mats = self.rep.mats
        if not 0 <= alpha < len(mats):
            raise DimensionError(f"basis index {alpha} out of range")
        x = self.coerce_point(x)
        x_arr = self._chart_value(x)

        def moved(t: float) -> np.ndarray:
            g = kernels.expm(-t * mats[alpha])
            if not self.rep.is_complex:
                g = g.real
            return self._chart_value(self.apply(g, x))

        def central(h: float) -> np.ndarray:
            return (moved(h) - moved(-h)) / (2.0 * h)

        h = _FD_STEP
        d = (4.0 * central(h) - central(2.0 * h)) / 3.0
        return d if np.ndim(x_arr) else float(d)

    # helpers -------------------------------------------------------------

    def _chart_value(self, x):
        return x

    def __repr__(self) -> str:
        return f"<{type(self).__name__} tag={self.tag!r}>"


class Sl2HomographyAction(HomogeneousAction):
    """Fractional linear action of unimodular 2x2 matrices on the
    compactified line: ``x -> (a x + b) / (c x + d)`` with the point at
    infinity handled projectively (``inf -> a / c``)."""

    tag = "sl2-homography"
    point_kind = "projective-line"

    def __init__(self, rep: MatrixRep | None = None):
        super().__init__(rep or builtin_representation("sl2-defining"))

    def _check_group(self, g: np.ndarray) -> None:
        if g.shape != (2, 2):
            raise DimensionError("homography needs a 2x2 matrix")
        det = float(np.linalg.det(g.real if np.iscomplexobj(g) else g))
        if abs(det - 1.0) > GROUP_TOL:
            raise SetupError(
                f"matrix is not unimodular (det={det!r}); not in the "
                f"homography group")

    def coerce_point(self, x) -> ProjectivePoint:
        return ProjectivePoint.from_value(x)

    def apply(self, g: np.ndarray, x: ProjectivePoint) -> ProjectivePoint:
        return x.transform(np.asarray(g, dtype=float))

    def _chart_value(self, x: ProjectivePoint) -> float:
        if x.is_infinite:
            raise ChartExitError(
                "the point at infinity has no tangent coordinates in the "
                "affine chart")
        return x.value()


class AffineLineAction(HomogeneousAction):
    """Action of matrices ``[[a, c], [0, 1]]`` on the line:
    ``x -> a x + c``."""

    tag = "affine-line"
    point_kind = "line"

    def __init__(self, rep: MatrixRep | None = None):
        super().__init__(rep or builtin_representation("affine-defining"))

    def _check_group(self, g: np.ndarray) -> None:
        if g.shape != (2, 2):
            raise DimensionError("affine action needs a 2x2 matrix")
        if abs(g[1, 0]) > GROUP_TOL or abs(g[1, 1] - 1.0) > GROUP_TOL:
            raise SetupError(
                "matrix is not in the affine group (last row must be 0, 1)")
        if abs(g[0, 0]) < GROUP_TOL:
            raise SetupError("affine matrix has (near-)zero scale entry")

    def coerce_point(self, x) -> float:
        return float(x)

    def apply(self, g: np.ndarray, x: float) -> float:
        return float(g[0, 0]) * x + float(g[0, 1])


class HeisenbergPlaneAction(HomogeneousAction):
    """Unit upper-triangular 3x3 matrices moving phase-plane points:
    ``(x, p, 1)^T -> g (x, p, 1)^T``."""

    tag = "heisenberg-plane"
    point_kind = "plane"

    def __init__(self, rep: MatrixRep | None = None):
        super().__init__(rep or builtin_representation("heisenberg-3x3"))

    def _check_group(self, g: np.ndarray) -> None:
        if g.shape != (3, 3):
            raise DimensionError("phase-plane action needs a 3x3 matrix")
        lower = np.tril(g, -1)
        diag = np.diagonal(g)
        if np.max(np.abs(lower)) > GROUP_TOL \
                or np.max(np.abs(diag - 1.0)) > GROUP_TOL:
            raise SetupError(
                "matrix is not unit upper-triangular; not in the "
                "phase-plane group")

    def coerce_point(self, x) -> np.ndarray:
        pt = np.asarray(x, dtype=float)
        if pt.shape != (2,):
            raise DimensionError("phase-plane points are (x, p) pairs")
        return pt

    def apply(self, g: np.ndarray, x: np.ndarray) -> np.ndarray:
        v = g @ np.array([x[0], x[1], 1.0])
        return v[:2]


_ACTIONS = {
    Sl2HomographyAction.tag: Sl2HomographyAction,
    AffineLineAction.tag: AffineLineAction,
    HeisenbergPlaneAction.tag: HeisenbergPlaneAction,
}
ACTION_TAGS = tuple(sorted(_ACTIONS))


def action_by_tag(tag: str) -> HomogeneousAction:
    try:
        cls = _ACTIONS[tag]
    except KeyError:
        raise SetupError(
            f"unknown action {tag!r}; available: "
            f"{', '.join(ACTION_TAGS)}") from None
    return cls()


# Free-function façade mirroring the class methods.

def act(action: HomogeneousAction, g: np.ndarray, x):
    return action.act(g, x)


def propagate(action: HomogeneousAction, traj: GroupTrajectory,
              x0) -> PointCurve:
    return action.propagate(traj, x0)


def fundamental_vector_field(action: HomogeneousAction, alpha: int, x):
    return action.fundamental_vector_field(alpha, x)


def riccati_to_group_coefficients(c):
    """Coefficients of ``dx/dt = c0 + c1 x + c2 x^2`` as group-equation
    coefficients for the homography action: ``b = (-c0, -c1, -c2)``.

    Accepts a length-3 vector or a :class:`CoefficientCurve`.
    """
    if isinstance(c, CoefficientCurve):
        if c.dim != 3:
            raise DimensionError("scalar quadratic equation has 3 "
                                 "coefficients")
        return CoefficientCurve(
            3, lambda t, inner=c: -inner(t),
            domain=c.domain, description=f"negated({c.description})")
    arr = np.asarray(c, dtype=float)
    if arr.shape != (3,):
        raise DimensionError("scalar quadratic equation has 3 coefficients")
    return -arr


def group_to_riccati_coefficients(b):
    """Inverse of :func:`riccati_to_group_coefficients` (the map is its
    own inverse; provided under both names so intent reads clearly)."""
    return riccati_to_group_coefficients(b)
