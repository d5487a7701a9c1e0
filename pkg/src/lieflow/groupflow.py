"""Direct integration of matrix group equations dg/dt = A(t) g.

Given algebra coefficients ``b(t)`` and a matrix representation, the
generator is ``A(t) = -sum_a b_a(t) M_a`` and the flow starts at the
identity.  Solutions through other initial elements follow by right
translation, so only the identity flow is ever integrated.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .algebra import MatrixRep
from .curves import CoefficientCurve
from .errors import DegenerateInputError, DimensionError, DivergenceError

__all__ = [
    "GroupTrajectory",
    "solve_group_direct",
    "generator_matrix",
    "uniform_grid",
]


def uniform_grid(t_span: tuple[float, float], steps: int) -> np.ndarray:
    """Uniform time grid with ``steps`` intervals (``steps + 1`` points)."""
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not np.isfinite([t0, t1]).all() or t1 <= t0:
        raise DegenerateInputError(
            f"invalid time span ({t0}, {t1}); need finite t1 > t0")
    if steps < 1:
        raise DegenerateInputError("need at least one time step")
    return np.linspace(t0, t1, int(steps) + 1)


def generator_matrix(rep: MatrixRep, b: np.ndarray) -> np.ndarray:
    """Right-hand-side matrix ``A = -sum_a b_a M_a`` for coefficients b."""
    return -rep.matrix_of(b)


class GroupTrajectory:
    """A sampled curve in a matrix group.

    Attributes
    ----------
    rep:
        The representation whose group the samples live in.
    ts:
        Time grid, shape ``(N,)``.
    gs:
        Group elements, shape ``(N, n, n)``; solver output has
        ``gs[0] = I``.
    """

    def __init__(self, rep: MatrixRep, ts, gs):
        ts = np.asarray(ts, dtype=float)
        gs = np.asarray(gs)
        if ts.ndim != 1 or gs.ndim != 3 or gs.shape[0] != ts.size:
            raise DimensionError("need one group matrix per time sample")
        if gs.shape[1:] != (rep.size, rep.size):
            raise DimensionError("matrix size does not match representation")
        self.rep = rep
        self.ts = ts
        self.gs = gs

    def __len__(self) -> int:
        return self.ts.size

    def at_index(self, k: int) -> np.ndarray:
        return self.gs[k]

    def final(self) -> np.ndarray:
        return self.gs[-1]

    def right_translate(self, g0: np.ndarray) -> "GroupTrajectory":
        """The trajectory through ``g0``: every sample multiplied by ``g0``
        on the right (the flow equation is right-invariant)."""
        g0 = np.asarray(g0)
        if g0.shape != (self.rep.size, self.rep.size):
            raise DimensionError("initial element shape mismatch")
        return GroupTrajectory(self.rep, self.ts, self.gs @ g0)

    # -- drift metrics ------------------------------------------------------

    def det_drift(self) -> float:
        """Max deviation of det(g) from det(g(0)) along the curve."""
        dets = np.linalg.det(self.gs)
        return float(np.max(np.abs(dets - dets[0])))

    def orthogonality_drift(self) -> float:
        """Max entrywise deviation of g^T g from its initial value."""
        gram = np.transpose(self.gs, (0, 2, 1)) @ self.gs
        return float(np.max(np.abs(gram - gram[0])))

    def unitarity_drift(self) -> float:
        """Max entrywise deviation of g^dagger g from its initial value."""
        gram = np.conj(np.transpose(self.gs, (0, 2, 1))) @ self.gs
        return float(np.max(np.abs(gram - gram[0])))

    # -- CSV ----------------------------------------------------------------

    def to_csv(self, path) -> None:
        """Write ``t, g00, g01, ...`` rows (row-major entries); complex
        matrices are written as alternating real/imaginary columns."""
        from .fileio import write_trajectory_csv
        write_trajectory_csv(path, self)

    def __repr__(self) -> str:
        return (f"<GroupTrajectory {len(self)} samples "
                f"{self.rep.size}x{self.rep.size} "
                f"t in [{self.ts[0]:g}, {self.ts[-1]:g}]>")


def solve_group_direct(rep: MatrixRep, b: CoefficientCurve,
                       t_span: tuple[float, float], steps: int
                       ) -> GroupTrajectory:
    """Integrate ``dg/dt = A(t) g``, ``g(t0) = I`` with fixed-step RK4.

    ``A(t) = -sum_a b_a(t) M_a``.  No projection or re-normalization is
    applied; structural drift (determinant, orthogonality, unitarity) is a
    direct measure of integration error via the trajectory's drift metrics.
    """
    if b.dim != rep.algebra.dim:
        raise DimensionError(
            f"coefficient curve has dim {b.dim}, representation needs "
            f"{rep.algebra.dim}")
    ts = uniform_grid(t_span, steps)
    half_ts = np.linspace(ts[0], ts[-1], 2 * steps + 1)
    n = rep.size
    a_stack = np.empty((half_ts.size, n, n), dtype=np.complex128)
    for i, t in enumerate(half_ts):
        a_stack[i] = generator_matrix(rep, b(t))
    dt = float(ts[1] - ts[0])
    gs = kernels.rk4_group_stack(a_stack, dt)
    bad = ~np.isfinite(gs).all(axis=(1, 2))
    if bad.any():
        k = int(np.argmax(bad))
        raise DivergenceError(
            f"group flow diverged (non-finite entries at t={ts[k]:g})",
            t=float(ts[k]))
    if not rep.is_complex:
        gs = gs.real.copy()
    return GroupTrajectory(rep, ts, gs)
