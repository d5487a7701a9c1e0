"""Product-of-exponentials (canonical second-kind) coordinates.

The group solution of ``dg/dt = -sum_a b_a(t) M_a g`` is factored as

    g(t) = exp(-v_{s0}(t) M_{s0}) exp(-v_{s1}(t) M_{s1}) ... ,

where ``(s0, s1, ...)`` is a chosen permutation of the basis indices and
every coordinate starts at zero.  Differentiating the product turns the
group equation into the coordinate system ``M(v) dv/dt = b(t)`` where
``M(v)`` depends only on the adjoint matrices, so the coordinates can be
integrated with a small dense RK4 — or, when the dependency structure
allows, peeled off as iterated quadratures.

The factorization is a local coordinate chart: ``M(v)`` may become
singular along the way (:class:`CoordinateBreakdownError`), which is a
property of the chosen order, not of the underlying group flow.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import kernels
from .algebra import LieAlgebra, MatrixRep
from .curves import CoefficientCurve
from .errors import (
    CoordinateBreakdownError,
    DegenerateInputError,
    DimensionError,
    DivergenceError,
    NotQuadratureReducibleError,
)
from .groupflow import GroupTrajectory, uniform_grid

DET_TOL = 1e-10
_PROBE_TOL = 1e-9
_PROBE_SCALE = 0.3
_PROBE_SEED = 20260816

__all__ = [
    "CanonicalCoords",
    "wn_step_matrix",
    "solve_wei_norman",
    "quadrature_solve",
    "reconstruct",
    "cumulative_integral_half_grid",
]


def _check_order(algebra: LieAlgebra, order: Sequence[int] | None
                 ) -> tuple[int, ...]:
    if order is None:
        return tuple(range(algebra.dim))
    order = tuple(int(i) for i in order)
    if sorted(order) != list(range(algebra.dim)):
        raise DimensionError(
            f"order {order} is not a permutation of 0..{algebra.dim - 1}")
    return order


class CanonicalCoords:
    """Sampled product-of-exponentials coordinates.

    Attributes
    ----------
    algebra:
        The underlying algebra.
    order:
        Factor order: position k of the product carries basis index
        ``order[k]``.
    ts:
        Time grid, shape ``(N,)``.
    vs:
        Coordinate samples indexed by basis index (not factor position),
        shape ``(N, r)``; ``vs[0] = 0``.
    meta:
        Optional solver details (method, quadrature plan).
    """

    def __init__(self, algebra: LieAlgebra, order, ts, vs,
                 meta: dict | None = None):
        self.algebra = algebra
        self.order = _check_order(algebra, order)
        self.ts = np.asarray(ts, dtype=float)
        self.vs = np.asarray(vs, dtype=float)
        if self.vs.shape != (self.ts.size, algebra.dim):
            raise DimensionError("coordinate array shape mismatch")
        self.meta = dict(meta or {})

    def __len__(self) -> int:
        return self.ts.size

    def final(self) -> np.ndarray:
        return self.vs[-1]

    def to_csv(self, path) -> None:
        from .fileio import write_coords_csv
        write_coords_csv(path, self)

    def __repr__(self) -> str:
        return (f"<CanonicalCoords order={self.order} {len(self)} samples "
                f"t in [{self.ts[0]:g}, {self.ts[-1]:g}]>")


def wn_step_matrix(algebra: LieAlgebra, order, v) -> np.ndarray:
    """Coefficient matrix ``M(v)`` of the coordinate system
    ``M(v) dv/dt = b``.

    Column ``order[k]`` is the product of ``exp(-v_{order[j]}
    ad(order[j]))`` over the factors ``j < k`` applied to the basis vector
    ``order[k]``.  At ``v = 0`` this is the identity.
    """
    order = _check_order(algebra, order)
    v = np.asarray(v, dtype=float)
    if v.shape != (algebra.dim,):
        raise DimensionError(
            f"coordinate vector must have length {algebra.dim}")
    r = algebra.dim
    m = np.empty((r, r))
    prod = np.eye(r)
    for k, alpha in enumerate(order):
        m[:, alpha] = prod[:, alpha]
        if k + 1 < r:
            prod = prod @ algebra.ad_exp(alpha, -v[alpha])
    return m


def _coordinate_rates(algebra, order, v, b_vec, t):
    """Solve ``M(v) rate = b``; raise on a singular step matrix."""
    m = wn_step_matrix(algebra, order, v)
    det = float(np.linalg.det(m))
    if abs(det) < DET_TOL:
        raise CoordinateBreakdownError(
            f"factorization-order chart became singular at t={t:g} "
            f"(step-matrix determinant {det:.3e})", t=t, v=v.copy(), det=det)
    return np.linalg.solve(m, b_vec), det


def solve_wei_norman(algebra: LieAlgebra, b: CoefficientCurve,
                     t_span: tuple[float, float], steps: int,
                     order: Sequence[int] | None = None) -> CanonicalCoords:
    """Integrate the coordinate system ``M(v) dv/dt = b(t)``, ``v(0) = 0``
    with fixed-step RK4.

    The step-matrix determinant is checked at every RK4 stage (absolute
    floor 1e-10) and across accepted steps (a sign change means the chart
    boundary was crossed between grid points); both raise
    :class:`CoordinateBreakdownError`.
    """
    order = _check_order(algebra, order)
    if b.dim != algebra.dim:
        raise DimensionError(
            f"coefficient curve has dim {b.dim}, algebra needs "
            f"{algebra.dim}")
    ts = uniform_grid(t_span, steps)
    dt = float(ts[1] - ts[0])
    half_ts = np.linspace(ts[0], ts[-1], 2 * steps + 1)
    b_nodes = b.sample(half_ts)

    r = algebra.dim
    vs = np.zeros((ts.size, r))
    v = np.zeros(r)
    # The end-of-step determinant check doubles as the next step's first
    # stage (same coordinates, time, and coefficient node).
    k1, det_prev = _coordinate_rates(algebra, order, v, b_nodes[0], ts[0])
    for i in range(steps):
        t = ts[i]
        bm, b1 = b_nodes[2 * i + 1], b_nodes[2 * i + 2]
        k2, _ = _coordinate_rates(algebra, order, v + 0.5 * dt * k1, bm,
                                  t + 0.5 * dt)
        k3, _ = _coordinate_rates(algebra, order, v + 0.5 * dt * k2, bm,
                                  t + 0.5 * dt)
        k4, _ = _coordinate_rates(algebra, order, v + dt * k3, b1, t + dt)
        v = v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(v)):
            raise DivergenceError(
                f"canonical coordinates diverged at t={ts[i + 1]:g}",
                t=float(ts[i + 1]))
        k1, det_new = _coordinate_rates(algebra, order, v, b1, ts[i + 1])
        if det_new * det_prev < 0.0:
            raise CoordinateBreakdownError(
                f"factorization-order chart crossed a singularity between "
                f"t={t:g} and t={ts[i + 1]:g} (step-matrix determinant "
                f"changed sign)", t=float(ts[i + 1]), v=v.copy(),
                det=det_new)
        det_prev = det_new
        vs[i + 1] = v
    return CanonicalCoords(algebra, order, ts, vs, meta={"method": "rk4"})


def reconstruct(rep: MatrixRep, coords: CanonicalCoords) -> GroupTrajectory:
    """Multiply out the exponential factors at every sample."""
    if rep.algebra.dim != coords.algebra.dim:
        raise DimensionError("representation/coordinate dimension mismatch")
    n = rep.size
    dtype = np.complex128 if rep.is_complex else np.float64
    gs = np.empty((len(coords), n, n), dtype=dtype)
    mats = rep.mats
    for i, v in enumerate(coords.vs):
        g = np.eye(n, dtype=dtype)
        for alpha in coords.order:
            g = g @ kernels.expm(-v[alpha] * mats[alpha])
        gs[i] = g
    return GroupTrajectory(rep, coords.ts, gs)


# ---------------------------------------------------------------------------
# Quadrature reduction
# ---------------------------------------------------------------------------

def cumulative_integral_half_grid(y: np.ndarray, dt: float) -> np.ndarray:
    """Cumulative integral of samples on a uniform half grid.

    ``y`` has ``2N + 1`` values spaced ``dt / 2`` apart.  Even nodes are
    advanced with Simpson's rule over each full panel; odd nodes use the
    matching half-panel three-point rule.  Both are locally fourth order.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size < 3 or y.size % 2 == 0:
        raise DimensionError("half-grid samples must number 2N + 1")
    out = np.empty_like(y)
    out[0] = 0.0
    panels = (y.size - 1) // 2
    for k in range(panels):
        y0, y1, y2 = y[2 * k], y[2 * k + 1], y[2 * k + 2]
        out[2 * k + 1] = out[2 * k] + (dt / 24.0) * (5.0 * y0 + 8.0 * y1 - y2)
        out[2 * k + 2] = out[2 * k] + (dt / 6.0) * (y0 + 4.0 * y1 + y2)
    return out


def _rate_row(algebra, order, alpha, v):
    """Row ``alpha`` of the inverse step matrix at coordinates ``v``."""
    m = wn_step_matrix(algebra, order, v)
    rhs = np.zeros(algebra.dim)
    rhs[alpha] = 1.0
    return np.linalg.solve(m.T, rhs)


def _probe_structure(algebra, order, b_probe):
    """Determine, per coordinate, which coordinates its rate depends on and
    whether any self-dependence is affine.

    Returns ``(deps, self_affine)`` where ``deps[alpha]`` is a set of
    basis indices and ``self_affine[alpha]`` is meaningful only when
    ``alpha in deps[alpha]``.
    """
    r = algebra.dim
    rng = np.random.default_rng(_PROBE_SEED)
    draws = rng.uniform(-_PROBE_SCALE, _PROBE_SCALE, size=(4, r))
    wiggles = np.array([-_PROBE_SCALE, 0.05, 0.22])
    affine_ws = np.array([0.0, 1.0, -0.7, 0.43, 2.0])

    deps = [set() for _ in range(r)]
    self_affine = [True] * r
    for base in draws:
        for gamma in range(r):
            rows = []
            for w in wiggles:
                v = base.copy()
                v[gamma] = w
                m = wn_step_matrix(algebra, order, v)
                rows.append(np.linalg.inv(m))
            for alpha in range(r):
                rates = [h[alpha] @ b_probe.T for h in rows]  # (n_probe,)
                spread = np.max(np.abs(np.ptp(np.array(rates), axis=0)))
                scale = max(1.0, *(np.max(np.abs(x)) for x in rates))
                if spread > _PROBE_TOL * scale:
                    deps[alpha].add(gamma)
        # Affinity of each coordinate's rate in its own value.
        for alpha in range(r):
            samples = []
            for w in affine_ws:
                v = base.copy()
                v[alpha] = w
                samples.append(_rate_row(algebra, order, alpha, v)
                               @ b_probe.T)
            samples = np.array(samples)  # (n_w, n_probe)
            q = samples[0]
            s = samples[1] - samples[0]
            resid = samples - (q[None, :] + affine_ws[:, None] * s[None, :])
            scale = max(1.0, float(np.max(np.abs(samples))))
            if float(np.max(np.abs(resid))) > _PROBE_TOL * scale:
                self_affine[alpha] = False
    return deps, self_affine


def quadrature_solve(algebra: LieAlgebra, b: CoefficientCurve,
                     t_span: tuple[float, float], steps: int,
                     order: Sequence[int] | None = None) -> CanonicalCoords:
    """Solve the coordinate system by iterated quadratures when possible.

    The rate of each coordinate is probed (against the actual coefficient
    data) for dependence on the other coordinates.  Coordinates whose
    dependencies are already solved are peeled off one at a time: a rate
    free of the coordinate itself is a plain cumulative integral, and an
    affine self-dependence ``dv/dt = q(t) + s(t) v`` is solved with an
    integrating factor (two nested quadratures).  Any circular dependency
    or non-affine self-dependence raises
    :class:`NotQuadratureReducibleError`.

    Quadratures use fourth-order panel rules on the same half grid the RK4
    solver samples, so the two solvers converge at the same rate.
    """
    order = _check_order(algebra, order)
    if b.dim != algebra.dim:
        raise DimensionError(
            f"coefficient curve has dim {b.dim}, algebra needs "
            f"{algebra.dim}")
    ts = uniform_grid(t_span, steps)
    dt = float(ts[1] - ts[0])
    half_ts = np.linspace(ts[0], ts[-1], 2 * steps + 1)
    b_nodes = b.sample(half_ts)

    n_half = half_ts.size
    r = algebra.dim
    probe_idx = np.unique(np.linspace(0, n_half - 1,
                                      min(9, n_half)).astype(int))
    deps, self_affine = _probe_structure(algebra, order, b_nodes[probe_idx])

    solved: dict[int, np.ndarray] = {}
    plan: list[tuple[int, str]] = []
    pending = set(range(r))
    while pending:
        ready = [a for a in sorted(pending)
                 if (deps[a] - {a}) <= set(solved)]
        if not ready:
            raise NotQuadratureReducibleError(
                f"coordinates {sorted(pending)} have circular dependencies "
                f"for factor order {order}; use the RK4 coordinate solver")
        alpha = ready[0]
        if alpha in deps[alpha] and not self_affine[alpha]:
            raise NotQuadratureReducibleError(
                f"coordinate {alpha} enters its own rate non-affinely for "
                f"factor order {order}; use the RK4 coordinate solver")

        def rate_at(i: int, w: float) -> float:
            v = np.zeros(r)
            for g, vals in solved.items():
                v[g] = vals[i]
            v[alpha] = w
            return float(_rate_row(algebra, order, alpha, v) @ b_nodes[i])

        if alpha not in deps[alpha]:
            q = np.array([rate_at(i, 0.0) for i in range(n_half)])
            solved[alpha] = cumulative_integral_half_grid(q, dt)
            plan.append((alpha, "integral"))
        else:
            q = np.array([rate_at(i, 0.0) for i in range(n_half)])
            s = np.array([rate_at(i, 1.0) for i in range(n_half)]) - q
            big_s = cumulative_integral_half_grid(s, dt)
            inner = cumulative_integral_half_grid(q * np.exp(-big_s), dt)
            solved[alpha] = np.exp(big_s) * inner
            plan.append((alpha, "linear"))
        pending.discard(alpha)

    vs = np.zeros((ts.size, r))
    for alpha, vals in solved.items():
        vs[:, alpha] = vals[::2]
    if not np.all(np.isfinite(vs)):
        raise DivergenceError("quadrature solution overflowed")
    return CanonicalCoords(algebra, order, ts, vs,
                           meta={"method": "quadrature", "plan": plan})
