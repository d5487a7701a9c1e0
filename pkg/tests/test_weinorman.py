"""Product-of-exponentials coordinates: the step matrix, the RK4 and
iterated-quadrature solvers, breakdown detection, and reconstruction."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lieflow import (
    CanonicalCoords,
    CoefficientCurve,
    CoordinateBreakdownError,
    NotQuadratureReducibleError,
    SetupError,
    builtin_algebra,
    builtin_representation,
    cumulative_integral_half_grid,
    quadrature_solve,
    reconstruct,
    solve_group_direct,
    solve_wei_norman,
    wn_step_matrix,
)


def test_step_matrix_is_identity_at_origin():
    for tag in ("sl2", "affine", "heisenberg", "heisenberg-extended"):
        algebra = builtin_algebra(tag)
        order = tuple(range(algebra.dim))
        m = wn_step_matrix(algebra, order, np.zeros(algebra.dim))
        assert np.allclose(m, np.eye(algebra.dim))


def test_step_matrix_column_structure_sl2():
    """Column order[k] is the product of the earlier factors' adjoint
    exponentials applied to that basis vector."""
    algebra = builtin_algebra("sl2")
    v = np.array([0.4, -0.3, 0.2])
    order = (0, 1, 2)
    m = wn_step_matrix(algebra, order, v)
    e = np.eye(3)
    # first factor: column 0 untouched
    assert np.allclose(m[:, 0], e[:, 0])
    # second column: exp(-v0 ad(e0)) e1
    expected1 = algebra.ad_exp(0, -v[0]) @ e[:, 1]
    assert np.allclose(m[:, 1], expected1)
    # third column: exp(-v0 ad(e0)) exp(-v1 ad(e1)) e2
    expected2 = algebra.ad_exp(0, -v[0]) @ algebra.ad_exp(1, -v[1]) @ e[:, 2]
    assert np.allclose(m[:, 2], expected2)


def test_order_must_be_permutation():
    algebra = builtin_algebra("sl2")
    b = CoefficientCurve.constant([1.0, 0.0, 0.0])
    with pytest.raises(SetupError):
        solve_wei_norman(algebra, b, (0.0, 1.0), 10, order=(0, 1))
    with pytest.raises(SetupError):
        solve_wei_norman(algebra, b, (0.0, 1.0), 10, order=(0, 0, 1))


@pytest.mark.parametrize("tag,b_tokens", [
    ("sl2", ["cos", "0.3", "sin"]),
    ("affine", ["1", "0.5"]),
    ("heisenberg", ["1", "sin", "0"]),
    ("heisenberg-extended", ["1", "cos:0.5:2", "0", "0"]),
])
def test_rk4_coordinates_reconstruct_direct_solution(tag, b_tokens):
    algebra = builtin_algebra(tag)
    rep = builtin_representation({
        "sl2": "sl2-defining", "affine": "affine-defining",
        "heisenberg": "heisenberg-3x3",
        "heisenberg-extended": "heisenberg-extended-4x4"}[tag], algebra)
    b = CoefficientCurve.from_tokens(b_tokens)
    coords = solve_wei_norman(algebra, b, (0.0, 1.2), 1200)
    direct = solve_group_direct(rep, b, (0.0, 1.2), 1200)
    recon = reconstruct(rep, coords)
    assert np.max(np.abs(recon.gs - direct.gs)) <= 1e-8
    assert np.allclose(coords.vs[0], 0.0)


def test_coordinates_are_basis_indexed_not_factor_indexed():
    algebra = builtin_algebra("affine")
    b = CoefficientCurve.constant([1.0, 0.0])
    swapped = solve_wei_norman(algebra, b, (0.0, 1.0), 100, order=(1, 0))
    # column 0 still stores the coordinate of basis element 0
    assert swapped.vs[-1, 0] == pytest.approx(1.0, abs=1e-10)


def test_breakdown_detected_near_chart_boundary():
    """The all-positive quadratic drive pushes the leading coordinate to
    a tangent-style pole; the solver must stop with the breakdown time."""
    algebra = builtin_algebra("sl2")
    b = CoefficientCurve.constant([-1.0, 0.0, -1.0])
    with pytest.raises(CoordinateBreakdownError) as err:
        solve_wei_norman(algebra, b, (0.0, 2.0), 2000)
    assert err.value.t == pytest.approx(np.pi / 2, abs=2e-3)


def test_breakdown_not_triggered_inside_chart():
    algebra = builtin_algebra("sl2")
    b = CoefficientCurve.constant([-1.0, 0.0, -1.0])
    coords = solve_wei_norman(algebra, b, (0.0, 1.4), 1400)
    assert np.isfinite(coords.vs).all()


def test_quadrature_affine_both_orders_match_rk4():
    algebra = builtin_algebra("affine")
    b = CoefficientCurve.from_tokens(["1", "0.5"])
    for order in ((0, 1), (1, 0)):
        quad = quadrature_solve(algebra, b, (0.0, 2.0), 400, order=order)
        rk = solve_wei_norman(algebra, b, (0.0, 2.0), 400, order=order)
        assert quad.meta["method"] == "quadrature"
        assert np.max(np.abs(quad.vs - rk.vs)) <= 1e-9


def test_quadrature_rejects_full_sl2():
    algebra = builtin_algebra("sl2")
    b = CoefficientCurve.from_tokens(["cos", "0.3", "sin"])
    with pytest.raises(NotQuadratureReducibleError):
        quadrature_solve(algebra, b, (0.0, 1.0), 100)


def test_quadrature_heisenberg_classical_coordinates():
    """Constant force: the first two coordinates are plain integrals and
    the central one picks up a sign that depends on the factor order."""
    algebra = builtin_algebra("heisenberg")
    m, f0 = 1.0, 1.0
    b = CoefficientCurve.constant([1.0 / m, -f0, 0.0])
    for order, central_sign in (((0, 1, 2), +1.0), ((2, 1, 0), -1.0)):
        coords = quadrature_solve(algebra, b, (0.0, 2.0), 200, order=order)
        t = coords.ts[-1]
        assert coords.vs[-1, 0] == pytest.approx(t / m, abs=1e-12)
        assert coords.vs[-1, 1] == pytest.approx(-f0 * t, abs=1e-12)
        assert coords.vs[-1, 2] == pytest.approx(
            central_sign * f0 * t * t / (2 * m), abs=1e-12)


def test_quadrature_extended_heisenberg_both_orders():
    algebra = builtin_algebra("heisenberg-extended")
    rep = builtin_representation("heisenberg-extended-4x4", algebra)
    b = CoefficientCurve.from_tokens(["1", "cos:0.5:2", "0", "0"])
    gu = reconstruct(rep, quadrature_solve(algebra, b, (0.0, 2.0), 2000,
                                           order=(3, 2, 1, 0)))
    gv = reconstruct(rep, quadrature_solve(algebra, b, (0.0, 2.0), 2000,
                                           order=(3, 1, 2, 0)))
    assert np.max(np.abs(gu.gs - gv.gs)) <= 1e-9


def test_quadrature_matches_rk4_on_time_dependent_drive():
    algebra = builtin_algebra("heisenberg")
    b = CoefficientCurve.from_tokens(["1", "sin:2:3", "0"])
    quad = quadrature_solve(algebra, b, (0.0, 1.5), 1500)
    rk = solve_wei_norman(algebra, b, (0.0, 1.5), 1500)
    assert np.max(np.abs(quad.vs - rk.vs)) <= 1e-10


def test_cumulative_integral_exact_for_quadratics():
    steps = 37
    dt = 0.1
    half = np.linspace(0.0, steps * dt, 2 * steps + 1)
    y = 3.0 - 2.0 * half + 0.25 * half ** 2
    exact = 3.0 * half - half ** 2 + 0.25 * half ** 3 / 3.0
    got = cumulative_integral_half_grid(y, dt)
    assert got.shape == half.shape
    assert np.max(np.abs(got - exact)) <= 1e-12


def test_cumulative_integral_fourth_order_on_whole_steps():
    def err(steps):
        half = np.linspace(0.0, 2.0, 2 * steps + 1)
        got = cumulative_integral_half_grid(np.sin(half), 2.0 / steps)
        return np.max(np.abs(got[::2] - (1.0 - np.cos(half[::2]))))

    assert err(40) / err(80) > 12.0


@settings(max_examples=25, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_constant_drive_reconstruction_property(b0, b1, b2):
    """For any constant sl2 drive of modest size, the factored and direct
    solutions agree on a short window."""
    algebra = builtin_algebra("sl2")
    rep = builtin_representation("sl2-defining", algebra)
    b = CoefficientCurve.constant([b0, b1, b2])
    try:
        coords = solve_wei_norman(algebra, b, (0.0, 0.5), 100)
    except CoordinateBreakdownError:
        return  # chart boundary inside the window: a legal outcome
    recon = reconstruct(rep, coords)
    direct = solve_group_direct(rep, b, (0.0, 0.5), 100)
    assert np.max(np.abs(recon.gs - direct.gs)) <= 1e-9


def test_coords_csv_roundtrip(tmp_path):
    algebra = builtin_algebra("affine")
    b = CoefficientCurve.from_tokens(["1", "0.3"])
    coords = solve_wei_norman(algebra, b, (0.0, 1.0), 50)
    path = tmp_path / "coords.csv"
    coords.to_csv(str(path))
    from lieflow.fileio import read_coords_csv
    order, ts, vs = read_coords_csv(str(path))
    assert order == coords.order
    assert np.array_equal(ts, coords.ts)
    assert np.array_equal(vs, coords.vs)


def test_meta_records_method():
    algebra = builtin_algebra("heisenberg")
    b = CoefficientCurve.constant([1.0, 1.0, 0.0])
    assert quadrature_solve(algebra, b, (0.0, 1.0), 10).meta["method"] \
        == "quadrature"
    assert solve_wei_norman(algebra, b, (0.0, 1.0), 10).meta["method"] \
        == "rk4"
