"""Gauge transformations, lift sections along particular solutions,
subgroup reduction with leakage certification, and reassembly."""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.linalg import expm as scipy_expm

from lieflow import (
    AffineLineAction,
    ChartExitError,
    CoefficientCurve,
    DegenerateInputError,
    GaugeCurve,
    HeisenbergPlaneAction,
    InvalidLiftError,
    SetupError,
    Sl2HomographyAction,
    builtin_representation,
    gauge_transform_coefficients,
    lift_solution,
    reassemble,
    reduce_to_subgroup,
    riccati_reciprocal_reduction,
    riccati_shift_reduction,
    riccati_to_group_coefficients,
    right_log_rates,
    sl2_two_solution_lift,
    solve_group_direct,
)

REP = builtin_representation("sl2-defining")


# ---------------------------------------------------------------------------
# Logarithmic rates and gauge curves
# ---------------------------------------------------------------------------

def test_right_log_rates_constant_generator():
    """g(t) = exp(tA) has right rate A for every t."""
    coeffs = np.array([0.4, -0.8, 0.3])
    a = sum(c * m for c, m in zip(coeffs, REP.mats))
    ts = np.linspace(0.0, 1.0, 501)
    gs = np.array([scipy_expm(t * a) for t in ts])
    rates = right_log_rates(REP, ts, gs)
    assert np.max(np.abs(rates - REP.decompose(a))) <= 1e-5


def test_gauge_curve_exact_derivatives_beat_differences():
    a = REP.mats[0] - 0.5 * REP.mats[2]
    ts = np.linspace(0.0, 1.0, 101)
    gs = np.array([scipy_expm(t * a) for t in ts])
    dgs = np.array([a @ g for g in gs])
    exact = GaugeCurve(REP, ts, gs, dgs=dgs).coefficient_rates()
    assert np.max(np.abs(exact - REP.decompose(a))) <= 1e-12


def test_gauge_curve_rejects_singular_samples():
    ts = np.array([0.0, 1.0])
    gs = np.array([np.eye(2), np.array([[1.0, 1.0], [1.0, 1.0]])])
    with pytest.raises(DegenerateInputError):
        GaugeCurve(REP, ts, gs)


def test_gauge_inverse_rates():
    """Right rate of the inverse curve is minus the adjoint-moved rate."""
    a = 0.6 * REP.mats[1] + 0.2 * REP.mats[2]
    ts = np.linspace(0.0, 1.0, 51)
    gs = np.array([scipy_expm(t * a) for t in ts])
    dgs = np.array([a @ g for g in gs])
    gauge = GaugeCurve(REP, ts, gs, dgs=dgs)
    inv_rates = gauge.inverse().coefficient_rates()
    for i in range(len(ts)):
        want = -REP.adjoint(np.linalg.inv(gs[i])) @ REP.decompose(a)
        assert np.max(np.abs(inv_rates[i] - want)) <= 1e-10


def test_product_rate_cocycle():
    """rate(g1 g2) = rate(g1) + Ad(g1) rate(g2) on sampled smooth curves."""
    ts = np.linspace(0.0, 1.0, 801)
    a1 = REP.mats[0] + 0.3 * REP.mats[1]
    a2 = 0.5 * REP.mats[2] - 0.2 * REP.mats[0]
    g1 = np.array([scipy_expm(math.sin(t) * a1) for t in ts])
    g2 = np.array([scipy_expm((t + 0.2 * t * t) * a2) for t in ts])
    r1 = right_log_rates(REP, ts, g1)
    r2 = right_log_rates(REP, ts, g2)
    r12 = right_log_rates(REP, ts, g1 @ g2)
    for i in range(0, len(ts), 80):
        want = r1[i] + REP.adjoint(g1[i]) @ r2[i]
        assert np.max(np.abs(r12[i] - want)) <= 1e-5


# ---------------------------------------------------------------------------
# Gauge-transformed coefficients
# ---------------------------------------------------------------------------

def test_constant_gauge_is_pure_adjoint():
    gp = scipy_expm(0.7 * REP.mats[0] - 0.2 * REP.mats[1])
    ts = np.linspace(0.0, 1.0, 11)
    gauge = GaugeCurve(REP, ts, np.tile(gp, (11, 1, 1)),
                       dgs=np.zeros((11, 2, 2)))
    b = CoefficientCurve.from_tokens(["cos", "0.3", "sin"])
    moved = gauge_transform_coefficients(gauge, b)
    ad = REP.adjoint(gp)
    for t in (0.0, 0.5, 1.0):  # grid nodes: no interpolation error
        assert np.allclose(moved(t), ad @ b(t), atol=1e-12)


def test_gauge_transform_moves_solutions():
    """Solutions of the transformed system are the gauge-moved solutions
    of the original one: the transformed trajectory from the identity is
    g'(t) g(t) g'(0)^{-1}."""
    steps = 1000
    ts = np.linspace(0.0, 1.0, steps + 1)
    direction = REP.mats[0] - 0.4 * REP.mats[2]

    def phase(t):
        return 0.3 * math.sin(t)

    def dphase(t):
        return 0.3 * math.cos(t)

    gs = np.array([scipy_expm(phase(t) * direction) for t in ts])
    dgs = np.array([dphase(t) * direction @ g for t, g in zip(ts, gs)])
    gauge = GaugeCurve(REP, ts, gs, dgs=dgs)

    b = CoefficientCurve.from_tokens(["1", "0", "1"])
    moved_b = gauge_transform_coefficients(gauge, b)

    orig = solve_group_direct(REP, b, (0.0, 1.0), steps)
    moved = solve_group_direct(REP, moved_b, (0.0, 1.0), steps)
    g0_inv = np.linalg.inv(gs[0])
    want = gs @ orig.gs @ g0_inv
    assert np.max(np.abs(moved.gs - want)) <= 1e-6

    # and on the homogeneous space: act(g'(t), x(t)) solves the new system
    action = Sl2HomographyAction()
    x_orig = action.propagate(orig, 0.2)
    x_moved = action.propagate(moved, action.act(gs[0], 0.2))
    for i in range(0, steps + 1, 100):
        manual = action.act(gs[i], x_orig.points[i])
        assert x_moved.points[i].same_point(manual, tol=1e-6)


# ---------------------------------------------------------------------------
# Lift sections
# ---------------------------------------------------------------------------

def test_homography_lift_base_zero():
    ts = np.linspace(0.0, 0.9, 91)
    xs = np.tan(ts)
    lift = lift_solution(Sl2HomographyAction(), (ts, xs),
                         x_dot=1.0 + xs ** 2)
    action = Sl2HomographyAction()
    assert np.allclose(np.linalg.det(lift.gs), 1.0)
    for i in (0, 45, 90):
        assert action.act(lift.gs[i], 0.0).same_point(xs[i])


def test_homography_lift_base_infinity():
    ts = np.linspace(0.1, 0.9, 81)
    xs = np.tan(ts)
    lift = lift_solution(Sl2HomographyAction(), (ts, xs),
                         x_dot=1.0 + xs ** 2, base_point="inf")
    action = Sl2HomographyAction()
    for i in (0, 40, 80):
        assert action.act(lift.gs[i], "inf").same_point(xs[i])


def test_homography_lift_chart_exits():
    ts = np.linspace(0.0, 1.0, 5)
    with pytest.raises(ChartExitError):
        lift_solution(Sl2HomographyAction(),
                      (ts, [0.0, 1.0, np.inf, 1.0, 0.0]))
    with pytest.raises(ChartExitError):
        lift_solution(Sl2HomographyAction(), (ts, [0.5, 0.2, 0.0, 0.2, 0.5]),
                      base_point="inf")
    with pytest.raises(SetupError):
        lift_solution(Sl2HomographyAction(), (ts, np.ones(5)),
                      base_point=2.0)


def test_affine_lift_translation():
    ts = np.linspace(0.0, 1.0, 11)
    xs = np.sin(ts)
    lift = lift_solution(AffineLineAction(), (ts, xs), x_dot=np.cos(ts))
    action = AffineLineAction()
    for i in (0, 5, 10):
        assert action.act(lift.gs[i], 0.0) == pytest.approx(xs[i])
    with pytest.raises(SetupError):
        lift_solution(AffineLineAction(), (ts, xs), base_point=1.0)


def test_plane_lift_translation():
    ts = np.linspace(0.0, 1.0, 11)
    xs = np.stack([np.sin(ts), np.cos(ts)], axis=1)
    lift = lift_solution(HeisenbergPlaneAction(), (ts, xs))
    action = HeisenbergPlaneAction()
    for i in (0, 5, 10):
        assert np.allclose(action.act(lift.gs[i], (0.0, 0.0)), xs[i])


def test_two_solution_section():
    ts = np.linspace(0.0, 0.8, 81)
    x1 = np.tan(ts)
    x2 = np.tan(ts) + 1.0 / (1.0 + ts)
    lift = sl2_two_solution_lift(ts, x1, x2)
    action = Sl2HomographyAction()
    assert np.max(np.abs(np.linalg.det(lift.gs) - 1.0)) <= 1e-12
    for i in (0, 40, 80):
        assert action.act(lift.gs[i], 0.0).same_point(x1[i])
        assert action.act(lift.gs[i], "inf").same_point(x2[i])
    with pytest.raises(DegenerateInputError):
        sl2_two_solution_lift(ts, x2, x1)


# ---------------------------------------------------------------------------
# Subgroup reduction and reassembly
# ---------------------------------------------------------------------------

def _tan_setup(t0=0.0, t1=1.2, steps=1200):
    """dx/dt = 1 + x^2 with x1 = tan(t): grids, coefficients, exact lift."""
    ts = np.linspace(t0, t1, steps + 1)
    c = np.array([1.0, 0.0, 1.0])
    b = CoefficientCurve.constant(riccati_to_group_coefficients(c))
    xs = np.tan(ts)
    return ts, b, xs


def test_reduce_shift_chart_and_reassemble():
    """Splitting off tan(t) leaves a lower-triangular-group equation whose
    coefficients match the scalar shift-chart formula; the product of the
    lift with the reduced solution recovers the full solution."""
    ts, b, xs = _tan_setup()
    lift = lift_solution(Sl2HomographyAction(), (ts, xs),
                         x_dot=1.0 + xs ** 2)
    reduced = reduce_to_subgroup(REP, b, lift, (1, 2))
    assert reduced.leakage <= 1e-9
    assert reduced.subgroup_indices == (1, 2)
    # group-equation coefficients of dz/dt = 2 tan(t) z + z^2 are
    # (0, -2 tan t, -1)
    assert np.max(np.abs(reduced.samples[:, 0] + 2.0 * xs)) <= 1e-9
    assert np.max(np.abs(reduced.samples[:, 1] + 1.0)) <= 1e-9

    full = np.zeros((ts.size, 3))
    full[:, [1, 2]] = reduced.samples
    b_sub = CoefficientCurve.from_samples(ts, full)
    h = solve_group_direct(REP, b_sub, (ts[0], ts[-1]), ts.size - 1)
    assert np.max(np.abs(h.gs[:, 0, 1])) <= 1e-8  # stays in the stabilizer

    direct = solve_group_direct(REP, b, (ts[0], ts[-1]), ts.size - 1)
    glued = reassemble(lift, h)
    # the subgroup equation was solved from sampled (piecewise-linear)
    # coefficients, so the recombination carries interpolation error
    assert np.max(np.abs(glued.gs - direct.gs)) <= 1e-5


def test_reduce_reciprocal_chart():
    """Base point at infinity: the residual equation lives on the
    upper-triangular indices (0, 1) and matches the scalar formula."""
    ts, b, xs = _tan_setup(0.1, 1.2, 1100)
    lift = lift_solution(Sl2HomographyAction(), (ts, xs),
                         x_dot=1.0 + xs ** 2, base_point="inf")
    reduced = reduce_to_subgroup(REP, b, lift, (0, 1))
    assert reduced.leakage <= 1e-9
    # scalar reciprocal chart: dw/dt = (2/tan t) w + 1, so the group
    # coefficients on (e0, e1) are (-1, -2/tan t)
    assert np.max(np.abs(reduced.samples[:, 0] + 1.0)) <= 1e-9
    assert np.max(np.abs(reduced.samples[:, 1] + 2.0 / xs)) <= 1e-8


def test_reduce_rejects_wrong_coefficients():
    """A lift along tan(t) paired with a different system's coefficients
    leaks outside the subalgebra and must be refused."""
    ts, _, xs = _tan_setup()
    lift = lift_solution(Sl2HomographyAction(), (ts, xs),
                         x_dot=1.0 + xs ** 2)
    wrong_b = CoefficientCurve.constant([-1.0, 0.0, 0.0])
    with pytest.raises(InvalidLiftError):
        reduce_to_subgroup(REP, wrong_b, lift, (1, 2))


def test_reduce_rejects_non_subalgebra_indices():
    ts, b, xs = _tan_setup()
    lift = lift_solution(Sl2HomographyAction(), (ts, xs),
                         x_dot=1.0 + xs ** 2)
    with pytest.raises(SetupError):
        reduce_to_subgroup(REP, b, lift, (0, 2))


def test_reassemble_requires_covered_window():
    ts, b, xs = _tan_setup(0.0, 1.0, 100)
    lift = lift_solution(Sl2HomographyAction(), (ts, xs),
                         x_dot=1.0 + xs ** 2)
    short = solve_group_direct(REP, b, (0.0, 0.5), 50)
    with pytest.raises(SetupError):
        reassemble(lift, short)


# ---------------------------------------------------------------------------
# Scalar chart formulas against independent integration
# ---------------------------------------------------------------------------

def test_shift_chart_scalar_formula():
    """For two integrated solutions, z = x - x1 must satisfy the shifted
    equation with the returned coefficients: the derivative residual
    dz/dt - (s1 z + s2 z^2) vanishes to integrator accuracy."""
    c = CoefficientCurve.from_tokens(["1", "0.2", "cos"])
    ts = np.linspace(0.0, 1.0, 101)

    def rhs(t, x):
        c0, c1, c2 = c(t)
        return c0 + c1 * x[0] + c2 * x[0] ** 2

    x1 = solve_ivp(rhs, (0.0, 1.0), [0.1], t_eval=ts,
                   rtol=1e-12, atol=1e-14).y[0]
    x = solve_ivp(rhs, (0.0, 1.0), [0.6], t_eval=ts,
                  rtol=1e-12, atol=1e-14).y[0]
    shifted = riccati_shift_reduction(ts, c, x1).sample(ts)
    assert np.max(np.abs(shifted[:, 0])) == 0.0

    z = x - x1
    z_dot = np.array([rhs(t, [xv]) - rhs(t, [x1v])
                      for t, xv, x1v in zip(ts, x, x1)])
    residual = z_dot - (shifted[:, 1] * z + shifted[:, 2] * z * z)
    assert np.max(np.abs(residual)) <= 1e-9


def test_reciprocal_chart_scalar_formula():
    """Along the analytic tangent flow, w = x x1 / (x1 - x) satisfies the
    inhomogeneous linear equation with the returned coefficients
    (derivative residual at machine precision)."""
    c = CoefficientCurve.constant([1.0, 0.0, 1.0])
    ts = np.linspace(0.0, 0.8, 81)
    x1 = np.tan(ts + 0.2)
    x = np.tan(ts + 0.5)
    reduced = riccati_reciprocal_reduction(ts, c, x1).sample(ts)
    assert np.max(np.abs(reduced[:, 2])) == 0.0

    w = x * x1 / (x1 - x)
    x_dot = 1.0 + x ** 2
    x1_dot = 1.0 + x1 ** 2
    w_dot = ((x_dot * x1 + x * x1_dot) * (x1 - x)
             - x * x1 * (x1_dot - x_dot)) / (x1 - x) ** 2
    residual = w_dot - (reduced[:, 1] * w + reduced[:, 0])
    assert np.max(np.abs(residual)) <= 1e-10 * np.max(np.abs(w_dot))


def test_reciprocal_chart_rejects_zero_crossing():
    c = CoefficientCurve.constant([1.0, 0.0, 1.0])
    ts = np.linspace(0.0, 0.5, 6)
    with pytest.raises(ChartExitError):
        riccati_reciprocal_reduction(ts, c, np.tan(ts))  # tan(0) = 0
