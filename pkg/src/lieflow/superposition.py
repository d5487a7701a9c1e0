"""Explicit superposition rules and constant fitting.

Each rule expresses the general solution of a family of first-order
systems as a fixed function of finitely many particular solutions and
constants: linear combinations (linear systems), affine combinations
(inhomogeneous linear scalar/vector equations), the projective three-ial
formula for scalar Riccati equations, and the two-constant planar rule
for the plane realization of the same underlying three-dimensional
algebra.

Scalar Riccati arithmetic is projective throughout: points live on the
compactified line as homogeneous pairs, so the distinguished value
``k = infinity`` and solutions passing through a pole are handled exactly
rather than by large-float approximation.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import (
    DegenerateInputError,
    DimensionError,
    NumericalBreakdownError,
    PoleError,
)

PROJECTIVE_EQ_TOL = 1e-12
GRAM_TOL = 1e-12
POLE_TOL = 1e-12
NEWTON_TOL = 1e-10
NEWTON_MAX_ITERS = 100

__all__ = [
    "ProjectivePoint",
    "SuperpositionRule",
    "superpose_linear",
    "superpose_affine",
    "superpose_riccati",
    "superpose_planar_sl2",
    "cross_ratio",
    "fit_constants",
    "planar_parts",
]


class ProjectivePoint:
    """A point of the compactified real line as a homogeneous pair.

    ``(p, q)`` represents ``x = p / q``; the pair is canonicalized to
    ``(x, 1)`` for finite points and ``(1, 0)`` for the point at infinity.
    """

    __slots__ = ("p", "q")

    def __init__(self, p: float, q: float = 1.0):
        p = float(p)
        q = float(q)
        if not (math.isfinite(p) and math.isfinite(q)):
            raise DegenerateInputError(
                "projective coordinates must be finite floats")
        if p == 0.0 and q == 0.0:
            raise DegenerateInputError(
                "(0, 0) is not a projective point")
        if q != 0.0:
            x = p / q
            if math.isfinite(x):
                object.__setattr__(self, "p", x)
                object.__setattr__(self, "q", 1.0)
                return
        object.__setattr__(self, "p", 1.0)
        object.__setattr__(self, "q", 0.0)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("ProjectivePoint is immutable")

    @classmethod
    def infinity(cls) -> "ProjectivePoint":
        return cls(1.0, 0.0)

    @classmethod
    def from_value(cls, value) -> "ProjectivePoint":
        """Coerce a float, the string ``"inf"``, or an existing point."""
        if isinstance(value, ProjectivePoint):
            return value
        if isinstance(value, str):
            if value.strip().lower() in ("inf", "+inf", "infinity"):
                return cls.infinity()
            return cls(float(value))
        value = float(value)
        if math.isinf(value):
            return cls.infinity()
        return cls(value)

    @property
    def is_infinite(self) -> bool:
        return self.q == 0.0

    def value(self) -> float:
        """The affine value; ``inf`` for the point at infinity."""
        return math.inf if self.q == 0.0 else self.p

    def same_point(self, other, tol: float = PROJECTIVE_EQ_TOL) -> bool:
        """Scale-invariant equality: ``|p1 q2 - p2 q1|`` against the
        largest coordinate magnitude (floored at 1)."""
        other = ProjectivePoint.from_value(other)
        cross = abs(self.p * other.q - other.p * self.q)
        scale = max(1.0, abs(self.p), abs(self.q),
                    abs(other.p), abs(other.q))
        return cross <= tol * scale

    def transform(self, mat) -> "ProjectivePoint":
        """Apply an invertible 2x2 matrix to the homogeneous pair (the
        fractional-linear action on the line)."""
        mat = np.asarray(mat, dtype=float)
        if mat.shape != (2, 2):
            raise DimensionError("fractional-linear transform needs 2x2")
        p = mat[0, 0] * self.p + mat[0, 1] * self.q
        q = mat[1, 0] * self.p + mat[1, 1] * self.q
        if p == 0.0 and q == 0.0:
            raise DegenerateInputError(
                "transform by a singular matrix annihilated the point")
        return ProjectivePoint(p, q)

    def __eq__(self, other) -> bool:
        if not isinstance(other, (ProjectivePoint, int, float, str)):
            return NotImplemented
        return self.same_point(other)

    def __hash__(self):
        return hash((round(self.p, 9), self.q))

    def __repr__(self) -> str:
        return "ProjectivePoint(inf)" if self.is_infinite \
            else f"ProjectivePoint({self.p!r})"


class SuperpositionRule:
    """Record of a superposition family: how many particular solutions it
    consumes (``m``) and how many constants parameterize it (``n``)."""

    _FAMILIES = ("linear", "affine", "riccati", "planar-sl2")

    def __init__(self, family: str, m: int, n: int):
        if family not in self._FAMILIES:
            raise DimensionError(
                f"unknown superposition family {family!r}")
        m, n = int(m), int(n)
        consistent = {
            "linear": m == n and n >= 1,
            "affine": m == n + 1 and n >= 1,
            "riccati": (m, n) == (3, 1),
            "planar-sl2": (m, n) == (3, 2),
        }[family]
        if not consistent:
            raise DimensionError(
                f"inconsistent rule: family {family!r} with m={m}, n={n}")
        self.family = family
        self.m = m
        self.n = n

    @classmethod
    def linear(cls, n: int) -> "SuperpositionRule":
        return cls("linear", n, n)

    @classmethod
    def affine(cls, n: int) -> "SuperpositionRule":
        return cls("affine", n + 1, n)

    @classmethod
    def riccati(cls) -> "SuperpositionRule":
        return cls("riccati", 3, 1)

    @classmethod
    def planar_sl2(cls) -> "SuperpositionRule":
        return cls("planar-sl2", 3, 2)

    @property
    def tag(self) -> str:
        if self.family in ("linear", "affine"):
            return f"{self.family}-{self.n}"
        return self.family

    def __repr__(self) -> str:
        return f"<SuperpositionRule {self.tag} m={self.m} n={self.n}>"


# ---------------------------------------------------------------------------
# Rule evaluation
# ---------------------------------------------------------------------------

def superpose_linear(solutions, k) -> np.ndarray:
    """Linear combination ``sum_a k_a x_(a)`` of ``n`` independent
    solutions of an ``n``-dimensional linear system."""
    xs = np.asarray(solutions, dtype=float)
    k = np.asarray(k, dtype=float)
    if xs.ndim != 2 or xs.shape[0] != xs.shape[1]:
        raise DimensionError(
            "need n particular solutions of length n (rows)")
    if k.shape != (xs.shape[0],):
        raise DimensionError("one constant per particular solution")
    gram = np.linalg.det(xs @ xs.T)
    if abs(gram) < GRAM_TOL:
        raise DegenerateInputError(
            f"particular solutions are linearly dependent "
            f"(Gram determinant {gram:.3e})")
    return k @ xs


def superpose_affine(solutions, k) -> np.ndarray:
    """Affine combination ``x_(1) + sum_j k_j (x_(j+1) - x_(1))`` of
    ``n + 1`` solutions of an inhomogeneous linear system."""
    xs = np.asarray(solutions, dtype=float)
    if xs.ndim == 1:
        xs = xs[:, None]
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if xs.shape[0] != xs.shape[1] + 1:
        raise DimensionError(
            "need n+1 particular solutions of length n (rows)")
    if k.shape != (xs.shape[1],):
        raise DimensionError("need n constants for n+1 solutions")
    diffs = xs[1:] - xs[0]
    gram = np.linalg.det(diffs @ diffs.T)
    if abs(gram) < GRAM_TOL:
        raise DegenerateInputError(
            f"solution differences are linearly dependent "
            f"(Gram determinant {gram:.3e})")
    return xs[0] + k @ diffs


def _as_points(*values):
    return tuple(ProjectivePoint.from_value(v) for v in values)


def _require_distinct(points) -> None:
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if points[i].same_point(points[j]):
                raise DegenerateInputError(
                    f"particular solutions {i + 1} and {j + 1} coincide")


def superpose_riccati(x1, x2, x3, k) -> ProjectivePoint:
    """General Riccati solution from three distinct particular solutions.

    Affinely, ``x = [x1 (x3 - x2) + k x2 (x1 - x3)] /
    [(x3 - x2) + k (x1 - x3)]``; evaluated on homogeneous pairs with the
    constant itself projective, so ``k = inf`` returns ``x2`` exactly and
    solutions are followed through poles.  ``k = 0`` and ``k = 1`` return
    ``x1`` and ``x3``.
    """
    p1, p2, p3 = _as_points(x1, x2, x3)
    _require_distinct((p1, p2, p3))
    kp = ProjectivePoint.from_value(k)
    # Homogeneous differences: (x3 - x2) ~ p3 q2 - p2 q3, etc.
    a = p3.p * p2.q - p2.p * p3.q
    b = p1.p * p3.q - p3.p * p1.q
    num = kp.q * p1.p * a + kp.p * p2.p * b
    den = kp.q * p1.q * a + kp.p * p2.q * b
    if num == 0.0 and den == 0.0:
        raise DegenerateInputError(
            "superposition is indeterminate for these inputs")
    return ProjectivePoint(num, den)


def cross_ratio(x, x1, x2, x3) -> ProjectivePoint:
    """The constant ``k`` pairing a Riccati solution ``x`` with three
    particular solutions: ``[(x - x1)(x3 - x2)] / [(x - x2)(x3 - x1)]``
    evaluated projectively (inverse of :func:`superpose_riccati`)."""
    px, p1, p2, p3 = _as_points(x, x1, x2, x3)
    _require_distinct((p1, p2, p3))
    num = (px.p * p1.q - p1.p * px.q) * (p3.p * p2.q - p2.p * p3.q)
    den = (px.p * p2.q - p2.p * px.q) * (p3.p * p1.q - p1.p * p3.q)
    if num == 0.0 and den == 0.0:
        raise DegenerateInputError(
            "cross-ratio is indeterminate for these inputs")
    return ProjectivePoint(num, den)


def planar_parts(s1, s2, s3, k1: float, k2: float):
    """The two numerators and the denominator of the planar two-constant
    rule, exactly as the closed formula states them (term by term).

    Returns ``(n_x, n_y, d)``.
    """
    x1, y1 = float(s1[0]), float(s1[1])
    x2, y2 = float(s2[0]), float(s2[1])
    x3, y3 = float(s3[0]), float(s3[1])
    k1 = float(k1)
    k2 = float(k2)
    ksq = k1 * k1 + k2 * k2

    sep23 = (x2 - x3) ** 2 + (y2 - y3) ** 2
    sep13 = (x1 - x3) ** 2 + (y1 - y3) ** 2

    n_x = (
        x1 * sep23
        + k1 * (x2 ** 2 * x3 + (x3 - x2) * x1 ** 2 + (y1 - y2) ** 2 * x3
                - x2 * (x3 ** 2 + (y1 - y3) ** 2)
                - x1 * sep23)
        + k2 * (x3 ** 2 * (y2 - y1) + x2 ** 2 * (y1 - y3)
                + (y3 - y2) * (x1 ** 2 + (y1 - y2) * (y1 - y3)))
        + ksq * x2 * sep13
    )
    n_y = (
        y1 * sep23
        + k1 * (x2 ** 2 * (y3 - y1) - x3 ** 2 * (y1 + y2)
                + 2.0 * x2 * (x3 * y1 - x1 * y3) + 2.0 * x1 * x3 * y2
                - (x1 ** 2 + (y1 + y2) * (y1 - y3)) * (y2 - y3))
        + k2 * (x1 ** 2 * (x2 - x3) + x2 ** 2 * x3 + x3 * (y2 ** 2 - y1 ** 2)
                - x2 * (x3 ** 2 + y3 ** 2 - y1 ** 2)
                + x1 * (x3 ** 2 - x2 ** 2 + y3 ** 2 - y2 ** 2))
        + ksq * y2 * sep13
    )
    d = (
        sep23
        - 2.0 * k1 * ((x1 - x3) * (x2 - x3) + (y1 - y3) * (y2 - y3))
        + 2.0 * k2 * (x3 * (y2 - y1) + x2 * (y1 - y3) + x1 * (y3 - y2))
        + ksq * sep13
    )
    return n_x, n_y, d


def superpose_planar_sl2(s1, s2, s3, k1: float, k2: float) -> np.ndarray:
    """Two-constant planar rule from three particular plane solutions.

    ``(k1, k2) = (0, 0)`` returns ``s1``; ``(1, 0)`` returns ``s3``; on
    the ``y = 0`` slice with ``k2 = 0`` the x-component agrees with the
    scalar Riccati rule.  A vanishing denominator (``|d| < 1e-12``) is a
    pole of the formula and raises :class:`PoleError`.
    """
    n_x, n_y, d = planar_parts(s1, s2, s3, k1, k2)
    if abs(d) < POLE_TOL:
        raise PoleError(
            f"planar superposition denominator vanished (|D|={abs(d):.3e})")
    return np.array([n_x / d, n_y / d])


# ---------------------------------------------------------------------------
# Constant fitting
# ---------------------------------------------------------------------------

def _planar_quadratic_coeffs(s1, s2, s3):
    """Coefficients of ``F(k1, k2) = A + k1 B + k2 C + (k1^2 + k2^2) E``
    for the stacked vector ``F = (N_x, N_y, D)``."""
    def stack(k1, k2):
        return np.array(planar_parts(s1, s2, s3, k1, k2))

    f00 = stack(0.0, 0.0)
    fp = stack(1.0, 0.0)
    fm = stack(-1.0, 0.0)
    f01 = stack(0.0, 1.0)
    a = f00
    e = 0.5 * (fp + fm) - f00
    b = 0.5 * (fp - fm)
    c = f01 - f00 - e
    return a, b, c, e


def fit_constants(rule: SuperpositionRule, solutions, target):
    """Constants reproducing ``target`` when superposing ``solutions``.

    linear/affine: direct linear solve.  riccati: closed-form cross-ratio
    (returned as a :class:`ProjectivePoint`, since the constant may be
    infinite).  planar-sl2: damped Newton on the residuals
    ``(N_x - x D, N_y - y D)`` started from ``(0, 0)``.
    """
    if rule.family == "linear":
        xs = np.asarray(solutions, dtype=float)
        t = np.asarray(target, dtype=float)
        if xs.shape != (rule.m, rule.n) or t.shape != (rule.n,):
            raise DimensionError("solution/target shapes do not match rule")
        gram = np.linalg.det(xs @ xs.T)
        if abs(gram) < GRAM_TOL:
            raise DegenerateInputError(
                "particular solutions are linearly dependent")
        return np.linalg.solve(xs.T, t)

    if rule.family == "affine":
        xs = np.asarray(solutions, dtype=float)
        if xs.ndim == 1:
            xs = xs[:, None]
        t = np.atleast_1d(np.asarray(target, dtype=float))
        if xs.shape != (rule.m, rule.n) or t.shape != (rule.n,):
            raise DimensionError("solution/target shapes do not match rule")
        diffs = xs[1:] - xs[0]
        gram = np.linalg.det(diffs @ diffs.T)
        if abs(gram) < GRAM_TOL:
            raise DegenerateInputError(
                "solution differences are linearly dependent")
        return np.linalg.solve(diffs.T, t - xs[0])

    if rule.family == "riccati":
        if len(solutions) != 3:
            raise DimensionError("riccati rule takes three solutions")
        x1, x2, x3 = solutions
        return cross_ratio(target, x1, x2, x3)

    if rule.family == "planar-sl2":
        if len(solutions) != 3:
            raise DimensionError("planar rule takes three solutions")
        target = np.asarray(target, dtype=float)
        if target.shape != (2,):
            raise DimensionError("planar target must be a plane point")
        a, b, c, e = _planar_quadratic_coeffs(*solutions)
        # Residual of the cleared-denominator equations; row 2 of the
        # stacked coefficients is D.
        d_weight = np.array([target[0], target[1]])

        def residual(k):
            k1, k2 = k
            f = a + k1 * b + k2 * c + (k1 * k1 + k2 * k2) * e
            return f[:2] - d_weight * f[2]

        def jacobian(k):
            k1, k2 = k
            d1 = b + 2.0 * k1 * e
            d2 = c + 2.0 * k2 * e
            j = np.empty((2, 2))
            j[:, 0] = d1[:2] - d_weight * d1[2]
            j[:, 1] = d2[:2] - d_weight * d2[2]
            return j

        def run_newton(k0):
            k = np.asarray(k0, dtype=float).copy()
            r = residual(k)
            for _iter in range(NEWTON_MAX_ITERS):
                if np.linalg.norm(r) <= NEWTON_TOL:
                    return k
                try:
                    step = np.linalg.solve(jacobian(k), -r)
                except np.linalg.LinAlgError:
                    return None
                lam = 1.0
                while lam > 1e-8:
                    trial = k + lam * step
                    r_trial = residual(trial)
                    if np.linalg.norm(r_trial) < np.linalg.norm(r):
                        k, r = trial, r_trial
                        break
                    lam *= 0.5
                else:
                    return None
            return k if np.linalg.norm(r) <= NEWTON_TOL else None

        def reproduces_target(k):
            # Clearing the denominator introduced one spurious root: the
            # point where the denominator itself vanishes.  A fitted
            # constant only counts if superposing with it actually lands
            # on the target.
            n_x, n_y, d = planar_parts(*solutions, k[0], k[1])
            if abs(d) < POLE_TOL:
                return False
            scale = 1.0 + float(np.max(np.abs(target)))
            return (abs(n_x / d - target[0]) <= 1e-6 * scale
                    and abs(n_y / d - target[1]) <= 1e-6 * scale)

        k = run_newton(np.zeros(2))
        if k is not None and reproduces_target(k):
            return k

        # Restart from the Moebius-combination estimate of the constant
        # (plane points read as complex numbers), which sits in the true
        # root's basin.
        z1, z2, z3 = (complex(float(s[0]), float(s[1])) for s in solutions)
        z = complex(target[0], target[1])
        den = (z - z2) * (z3 - z1)
        if den == 0.0:
            raise DegenerateInputError(
                "planar target coincides with a particular solution that "
                "only an infinite constant could reach")
        seed = ((z - z1) * (z3 - z2)) / den
        k = run_newton(np.array([seed.real, seed.imag]))
        if k is not None and reproduces_target(k):
            return k
        raise NumericalBreakdownError(
            f"constant fit did not converge in {NEWTON_MAX_ITERS} "
            f"iterations to a root that reproduces the target")

    raise DimensionError(f"unknown rule family {rule.family!r}")
