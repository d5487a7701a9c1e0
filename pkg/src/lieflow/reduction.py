"""Gauge transformations of group equations and reduction by particular
solutions.

Two closely related constructions live here.

**Gauge transform.**  A time-dependent group element ``g'(t)`` acts on a
system's solutions by ``x(t) -> act(g'(t), x(t))``; the moved solutions
obey the same kind of system with new coefficients

    b_new = Ad(g') b  -  decompose(dg'/dt g'^{-1}),

where ``decompose`` expresses the right logarithmic derivative in the
algebra basis.  (The sign follows the module-wide convention
``dg/dt g^{-1} = -sum b_a M_a``: conjugating that equation by ``g'``
produces exactly the line above.)

**Reduction.**  If ``x1(t)`` solves the system on a space whose base
point is stabilized by a subgroup ``H``, any curve ``g1(t)`` with
``act(g1(t), base) = x1(t)`` splits the group solution as
``g = g1 h`` where ``h`` stays in ``H`` and solves the ``H``-equation
with coefficients ``Ad(g1^{-1})(b + decompose(dg1/dt g1^{-1}))`` — i.e.
the gauge transform by ``g1^{-1}``.  The components of those coefficients
outside the subalgebra vanish identically when ``x1`` is exact; their
numerical size ("leakage") certifies the pipeline.
"""

from __future__ import annotations

import numpy as np

from .algebra import MatrixRep
from .curves import CoefficientCurve
from .errors import (
    ChartExitError,
    DegenerateInputError,
    DimensionError,
    InvalidLiftError,
    RepresentationError,
    SetupError,
)
from .groupflow import GroupTrajectory
from .homogeneous import (
    AffineLineAction,
    HeisenbergPlaneAction,
    HomogeneousAction,
    PointCurve,
    Sl2HomographyAction,
)

GAUGE_DET_TOL = 1e-10
LEAK_TOL = 1e-6
# Rates derived from centered differences carry O(dt^2) noise that need
# not lie in the algebra's span (e.g. a trace component); the projection
# is still correct, so the span check is relaxed to this level here.
RATE_DECOMPOSE_TOL = 1e-6

__all__ = [
    "GaugeCurve",
    "ReducedSystem",
    "gauge_transform_coefficients",
    "lift_solution",
    "sl2_two_solution_lift",
    "reduce_to_subgroup",
    "reassemble",
    "centered_derivatives",
    "right_log_rates",
    "riccati_shift_reduction",
    "riccati_reciprocal_reduction",
]


def _check_uniform(ts: np.ndarray) -> float:
    ts = np.asarray(ts, dtype=float)
    if ts.ndim != 1 or ts.size < 3:
        raise DimensionError("need at least three grid points")
    steps = np.diff(ts)
    dt = float(steps[0])
    if dt <= 0 or np.max(np.abs(steps - dt)) > 1e-9 * max(1.0, abs(dt)):
        raise SetupError("grid must be uniform and increasing")
    return dt


def centered_derivatives(ts, arr) -> np.ndarray:
    """Second-order time derivatives of samples on a uniform grid:
    centered differences inside, one-sided three-point stencils at the
    endpoints."""
    arr = np.asarray(arr)
    dt = _check_uniform(ts)
    if arr.shape[0] != np.asarray(ts).size:
        raise DimensionError("one sample per grid point required")
    out = np.empty_like(arr, dtype=np.result_type(arr.dtype, float))
    out[1:-1] = (arr[2:] - arr[:-2]) / (2.0 * dt)
    out[0] = (-3.0 * arr[0] + 4.0 * arr[1] - arr[2]) / (2.0 * dt)
    out[-1] = (3.0 * arr[-1] - 4.0 * arr[-2] + arr[-3]) / (2.0 * dt)
    return out


class GaugeCurve:
    """A sampled invertible matrix curve with derivative estimates.

    ``gs[i]`` need not start at the identity.  Derivatives default to
    centered differences on the curve's own grid; callers holding exact
    derivatives (sections built from closed-form solutions) should pass
    ``dgs`` to avoid the finite-difference floor.
    """

    def __init__(self, rep: MatrixRep, ts, gs, dgs=None):
        self.rep = rep
        self.ts = np.asarray(ts, dtype=float)
        gs = np.asarray(gs)
        if gs.ndim != 3 or gs.shape[0] != self.ts.size \
                or gs.shape[1:] != (rep.size, rep.size):
            raise DimensionError("gauge samples must be (N, n, n) matching "
                                 "the representation")
        dets = np.abs(np.linalg.det(gs))
        if np.min(dets) < GAUGE_DET_TOL:
            k = int(np.argmin(dets))
            raise DegenerateInputError(
                f"gauge curve is (near-)singular at t={self.ts[k]:g} "
                f"(|det|={dets[k]:.3e})")
        self.gs = gs
        if dgs is not None:
            dgs = np.asarray(dgs)
            if dgs.shape != gs.shape:
                raise DimensionError("derivative samples must match gs")
            self._dgs = dgs
        else:
            self._dgs = None

    def __len__(self) -> int:
        return self.ts.size

    def derivatives(self) -> np.ndarray:
        if self._dgs is None:
            self._dgs = centered_derivatives(self.ts, self.gs)
        return self._dgs

    def inverse(self) -> "GaugeCurve":
        """The pointwise inverse curve, with exact derivative transport
        ``d/dt g^{-1} = -g^{-1} (dg/dt) g^{-1}``."""
        ginv = np.linalg.inv(self.gs)
        dgs = self.derivatives()
        dinv = -ginv @ dgs @ ginv
        return GaugeCurve(self.rep, self.ts, ginv, dgs=dinv)

    def coefficient_rates(self) -> np.ndarray:
        """Basis coefficients of the right logarithmic derivative
        ``dg/dt g^{-1}`` at every node, shape ``(N, r)``."""
        dgs = self.derivatives()
        ginv = np.linalg.inv(self.gs)
        out = np.empty((len(self), self.rep.algebra.dim))
        for i in range(len(self)):
            try:
                out[i] = self.rep.decompose(dgs[i] @ ginv[i],
                                            tol=RATE_DECOMPOSE_TOL)
            except RepresentationError as exc:
                raise RepresentationError(
                    f"gauge curve leaves the algebra at t={self.ts[i]:g}: "
                    f"{exc}") from exc
        return out

    def __repr__(self) -> str:
        return (f"<GaugeCurve {len(self)} samples "
                f"{self.rep.size}x{self.rep.size}>")


def gauge_transform_coefficients(gauge: GaugeCurve, b: CoefficientCurve
                                 ) -> CoefficientCurve:
    """Coefficients of the system whose solutions are the gauge-moved
    solutions of the ``b``-system (see module docstring for the formula).

    Returns a curve sampled on the gauge's grid (linear interpolation
    between nodes, no extrapolation).
    """
    r = gauge.rep.algebra.dim
    if b.dim != r:
        raise DimensionError(
            f"coefficient curve has dim {b.dim}, algebra needs {r}")
    rates = gauge.coefficient_rates()
    out = np.empty((len(gauge), r))
    for i, t in enumerate(gauge.ts):
        ad = gauge.rep.adjoint(gauge.gs[i])
        out[i] = ad @ b(t) - rates[i]
    return CoefficientCurve.from_samples(gauge.ts, out)


# ---------------------------------------------------------------------------
# Lifts of particular solutions
# ---------------------------------------------------------------------------

def _curve_arrays(x_sol, x_dot):
    """Normalize (PointCurve | (ts, values)) input to float arrays."""
    if isinstance(x_sol, PointCurve):
        ts = x_sol.ts
        xs = x_sol.values()
    else:
        ts, xs = x_sol
        ts = np.asarray(ts, dtype=float)
        xs = np.asarray(xs, dtype=float)
    if x_dot is not None:
        x_dot = np.asarray(x_dot, dtype=float)
        if x_dot.shape != xs.shape:
            raise DimensionError("x_dot must match the solution samples")
    return ts, xs, x_dot


def lift_solution(action: HomogeneousAction, x_sol, *, x_dot=None,
                  base_point=None) -> GaugeCurve:
    """A gauge curve ``g1(t)`` moving the action's base point along a
    particular solution: ``act(g1(t), base) = x1(t)`` pointwise.

    Sections by action:

    * homography, base 0 (default): ``[[1, x1], [0, 1]]`` — exits the
      chart if ``x1`` hits infinity;
    * homography, base ``inf``: ``[[1, 0], [1/x1, 1]]`` — exits the chart
      if ``x1`` hits 0;
    * affine line, base 0: ``[[1, x1], [0, 1]]`` (pure translation);
    * phase plane, base (0, 0): translation by ``(x1(t), p1(t))``.

    ``x_dot`` supplies exact solution derivatives (e.g. the system's
    right-hand side evaluated on the samples); otherwise centered
    differences are used, which caps downstream leakage accuracy at the
    finite-difference error.
    """
    ts, xs, x_dot = _curve_arrays(x_sol, x_dot)

    if isinstance(action, Sl2HomographyAction):
        if xs.ndim != 1:
            raise DimensionError("line solutions must be scalar samples")
        if base_point is None:
            base_point = 0.0
        n = ts.size
        gs = np.tile(np.eye(2), (n, 1, 1))
        dgs = np.zeros((n, 2, 2))
        if base_point in (0, 0.0, "zero"):
            if not np.all(np.isfinite(xs)):
                raise ChartExitError(
                    "particular solution passes through infinity; the "
                    "translation section cannot lift it")
            if x_dot is None:
                x_dot = centered_derivatives(ts, xs)
            gs[:, 0, 1] = xs
            dgs[:, 0, 1] = x_dot
        elif base_point in (np.inf, "inf", "infinity"):
            if not np.all(np.isfinite(xs)) or np.any(np.abs(xs) < 1e-12):
                raise ChartExitError(
                    "particular solution hits 0 or infinity; the "
                    "reciprocal section cannot lift it")
            if x_dot is None:
                x_dot = centered_derivatives(ts, xs)
            gs[:, 1, 0] = 1.0 / xs
            dgs[:, 1, 0] = -x_dot / xs ** 2
        else:
            raise SetupError(
                f"no lift section for base point {base_point!r}; "
                f"use 0 or inf")
        return GaugeCurve(action.rep, ts, gs, dgs=dgs)

    if isinstance(action, AffineLineAction):
        if xs.ndim != 1:
            raise DimensionError("line solutions must be scalar samples")
        if base_point not in (None, 0, 0.0):
            raise SetupError("the affine lift uses base point 0")
        if x_dot is None:
            x_dot = centered_derivatives(ts, xs)
        n = ts.size
        gs = np.tile(np.eye(2), (n, 1, 1))
        dgs = np.zeros((n, 2, 2))
        gs[:, 0, 1] = xs
        dgs[:, 0, 1] = x_dot
        return GaugeCurve(action.rep, ts, gs, dgs=dgs)

    if isinstance(action, HeisenbergPlaneAction):
        if xs.ndim != 2 or xs.shape[1] != 2:
            raise DimensionError("phase-plane solutions must be (N, 2)")
        if base_point is not None and np.any(np.asarray(base_point) != 0):
            raise SetupError("the phase-plane lift uses base point (0, 0)")
        if x_dot is None:
            x_dot = centered_derivatives(ts, xs)
        n = ts.size
        gs = np.tile(np.eye(3), (n, 1, 1))
        dgs = np.zeros((n, 3, 3))
        gs[:, 0, 2] = xs[:, 0]
        gs[:, 1, 2] = xs[:, 1]
        dgs[:, 0, 2] = x_dot[:, 0]
        dgs[:, 1, 2] = x_dot[:, 1]
        return GaugeCurve(action.rep, ts, gs, dgs=dgs)

    raise SetupError(f"no lift section implemented for {action!r}")


def sl2_two_solution_lift(ts, x1, x2, *, x1_dot=None, x2_dot=None,
                          rep=None) -> GaugeCurve:
    """Unimodular section through two particular solutions:
    ``[[x2, x1], [1, 1]] / sqrt(x2 - x1)`` maps ``0 -> x1`` and
    ``inf -> x2``.  Requires ``x2 > x1`` pointwise (real normalization).
    """
    ts = np.asarray(ts, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x1.shape != ts.shape or x2.shape != ts.shape:
        raise DimensionError("need one sample of each solution per node")
    gap = x2 - x1
    if np.any(gap <= 0):
        raise DegenerateInputError(
            "two-solution section needs x2 > x1 along the whole window")
    if x1_dot is None:
        x1_dot = centered_derivatives(ts, x1)
    if x2_dot is None:
        x2_dot = centered_derivatives(ts, x2)
    s = gap ** -0.5
    ds = -0.5 * (x2_dot - x1_dot) * gap ** -1.5
    n = ts.size
    gs = np.empty((n, 2, 2))
    gs[:, 0, 0] = x2 * s
    gs[:, 0, 1] = x1 * s
    gs[:, 1, 0] = s
    gs[:, 1, 1] = s
    dgs = np.empty((n, 2, 2))
    dgs[:, 0, 0] = x2_dot * s + x2 * ds
    dgs[:, 0, 1] = x1_dot * s + x1 * ds
    dgs[:, 1, 0] = ds
    dgs[:, 1, 1] = ds
    if rep is None:
        rep = Sl2HomographyAction().rep
    return GaugeCurve(rep, ts, gs, dgs=dgs)


# ---------------------------------------------------------------------------
# Subgroup reduction and reassembly
# ---------------------------------------------------------------------------

class ReducedSystem:
    """Result of a subgroup reduction.

    Attributes
    ----------
    subgroup_indices:
        Basis indices spanning the subalgebra the equation lives in.
    coefficients:
        Sampled coefficient curve with one component per subgroup index
        (in listed order).
    leakage:
        Largest out-of-subalgebra coefficient magnitude seen (the
        theorem's vanishing components, numerically).
    ts, samples:
        The underlying grid and per-node subalgebra coefficients.
    """

    def __init__(self, subgroup_indices, ts, samples, leakage: float):
        self.subgroup_indices = tuple(int(i) for i in subgroup_indices)
        self.ts = np.asarray(ts, dtype=float)
        self.samples = np.asarray(samples, dtype=float)
        self.leakage = float(leakage)
        self.coefficients = CoefficientCurve.from_samples(self.ts,
                                                          self.samples)

    def __repr__(self) -> str:
        return (f"<ReducedSystem on indices {self.subgroup_indices} "
                f"leakage={self.leakage:.3e}>")


def reduce_to_subgroup(rep: MatrixRep, b: CoefficientCurve,
                       g1: GaugeCurve, subgroup_indices, *,
                       leak_tol: float = LEAK_TOL) -> ReducedSystem:
    """Coefficients of the residual subgroup equation after splitting off
    a lifted particular solution.

    Computes ``Ad(g1^{-1}) (b + decompose(dg1/dt g1^{-1}))`` on the
    lift's grid, verifies the components outside ``subgroup_indices``
    stay below ``leak_tol``, and returns the subalgebra components.  The
    index set must span a subalgebra (bracket-closure is checked).
    """
    algebra = rep.algebra
    sub = sorted(set(int(i) for i in subgroup_indices))
    if not sub:
        raise DimensionError("subgroup index list is empty")
    if not algebra.is_subalgebra(sub):
        raise SetupError(
            f"indices {sub} do not span a subalgebra (not bracket-closed)")
    if b.dim != algebra.dim:
        raise DimensionError(
            f"coefficient curve has dim {b.dim}, algebra needs "
            f"{algebra.dim}")
    rates = g1.coefficient_rates()
    outside = [i for i in range(algebra.dim) if i not in sub]
    n = len(g1)
    full = np.empty((n, algebra.dim))
    ginv = np.linalg.inv(g1.gs)
    for i, t in enumerate(g1.ts):
        ad_inv = rep.adjoint(ginv[i])
        full[i] = ad_inv @ (b(t) + rates[i])
    leakage = float(np.max(np.abs(full[:, outside]))) if outside else 0.0
    if leakage > leak_tol:
        raise InvalidLiftError(
            f"reduced coefficients leak outside the subalgebra "
            f"(max |component| {leakage:.3e} > {leak_tol:g}); the lift "
            f"does not track an accurate particular solution")
    return ReducedSystem(sub, g1.ts, full[:, sub], leakage)


def reassemble(g1: GaugeCurve, h_traj: GroupTrajectory) -> GroupTrajectory:
    """Pointwise product ``g1(t) h(t)``, the solution of the original
    group equation recovered from the reduced one.

    ``h`` is resampled onto the lift's grid by entrywise linear
    interpolation; the lift grid must lie inside ``h``'s time window.
    """
    if g1.rep.size != h_traj.rep.size:
        raise DimensionError("lift and subgroup trajectory size mismatch")
    pad = 1e-9 * max(1.0, abs(float(h_traj.ts[0])), abs(float(h_traj.ts[-1])))
    if g1.ts[0] < h_traj.ts[0] - pad or g1.ts[-1] > h_traj.ts[-1] + pad:
        raise SetupError(
            "lift grid extends beyond the subgroup trajectory window")
    n = g1.rep.size
    hs = np.empty((len(g1), n, n), dtype=h_traj.gs.dtype)
    flat = h_traj.gs.reshape(h_traj.gs.shape[0], -1)
    for col in range(flat.shape[1]):
        if np.iscomplexobj(flat):
            re = np.interp(g1.ts, h_traj.ts, flat[:, col].real)
            im = np.interp(g1.ts, h_traj.ts, flat[:, col].imag)
            hs.reshape(len(g1), -1)[:, col] = re + 1j * im
        else:
            hs.reshape(len(g1), -1)[:, col] = np.interp(
                g1.ts, h_traj.ts, flat[:, col])
    return GroupTrajectory(h_traj.rep, g1.ts, g1.gs @ hs)


def right_log_rates(rep: MatrixRep, ts, gs) -> np.ndarray:
    """Basis coefficients of ``dg/dt g^{-1}`` for a sampled matrix curve,
    with derivatives by centered differences (endpoints one-sided).
    Shape ``(N, r)``.  Used to verify product/cocycle identities."""
    return GaugeCurve(rep, ts, gs).coefficient_rates()


# ---------------------------------------------------------------------------
# Pre-canned scalar chart maps for the quadratic (Riccati) equation
# ---------------------------------------------------------------------------

def riccati_shift_reduction(ts, c: CoefficientCurve, x1s) -> CoefficientCurve:
    """Scalar-equation coefficients after the chart shift ``z = x - x1``
    along a particular solution ``x1`` of ``dx/dt = c0 + c1 x + c2 x^2``:
    the shifted variable obeys ``dz/dt = (c1 + 2 c2 x1) z + c2 z^2``
    (constant term eliminated).  Returns the sampled triple
    ``(0, c1 + 2 c2 x1, c2)``."""
    ts = np.asarray(ts, dtype=float)
    x1s = np.asarray(x1s, dtype=float)
    if c.dim != 3:
        raise DimensionError("scalar quadratic equation has 3 coefficients")
    if x1s.shape != ts.shape:
        raise DimensionError("one particular-solution sample per node")
    out = np.empty((ts.size, 3))
    for i, t in enumerate(ts):
        c0, c1, c2 = c(t)
        out[i] = (0.0, c1 + 2.0 * c2 * x1s[i], c2)
    return CoefficientCurve.from_samples(ts, out)


def riccati_reciprocal_reduction(ts, c: CoefficientCurve, x1s
                                 ) -> CoefficientCurve:
    """Scalar-equation coefficients after the reciprocal-shift chart
    ``x_new = x x1 / (x1 - x)`` (i.e. ``1/x_new = 1/x - 1/x1``) along a
    nowhere-zero particular solution ``x1``: the new variable obeys the
    inhomogeneous linear equation
    ``dx_new/dt = (2 c0 / x1 + c1) x_new + c0`` (quadratic term
    eliminated).  Returns the sampled triple
    ``(c0, 2 c0 / x1 + c1, 0)``."""
    ts = np.asarray(ts, dtype=float)
    x1s = np.asarray(x1s, dtype=float)
    if c.dim != 3:
        raise DimensionError("scalar quadratic equation has 3 coefficients")
    if x1s.shape != ts.shape:
        raise DimensionError("one particular-solution sample per node")
    if np.any(np.abs(x1s) < 1e-12):
        raise ChartExitError(
            "particular solution hits 0; the reciprocal-shift chart is "
            "singular there")
    out = np.empty((ts.size, 3))
    for i, t in enumerate(ts):
        c0, c1, c2 = c(t)
        out[i] = (c0, 2.0 * c0 / x1s[i] + c1, 0.0)
    return CoefficientCurve.from_samples(ts, out)
