"""Top-level acceptance checks for the whole toolkit.

Each test exercises one end-to-end behaviour at its stated tolerance and
prints a single ``ACCEPTANCE NN PASS|FAIL`` line with the measured
numbers before asserting, so a transcript of this module doubles as a
scorecard.  Every check runs in a few seconds on a laptop.
"""

import math

import numpy as np
from scipy.linalg import expm as scipy_expm

from lieflow.algebra import (
    BUILTIN_ALGEBRAS,
    builtin_algebra,
    builtin_representation,
    default_representation_name,
)
from lieflow.curves import CoefficientCurve
from lieflow.groupflow import solve_group_direct
from lieflow.homogeneous import (
    Sl2HomographyAction,
    action_by_tag,
    riccati_to_group_coefficients,
)
from lieflow.physics import (
    LinearPotentialDrive,
    MagneticDrive,
    MomentumWavefunction,
    classical_linear_potential,
    propagator_factors,
    quantum_linear_potential,
    spin_evolution,
)
from lieflow.reduction import (
    GaugeCurve,
    gauge_transform_coefficients,
    lift_solution,
    reassemble,
    reduce_to_subgroup,
    right_log_rates,
)
from lieflow.superposition import (
    ProjectivePoint,
    cross_ratio,
    superpose_planar_sl2,
    superpose_riccati,
)
from lieflow.weinorman import quadrature_solve, reconstruct, solve_wei_norman


def _verdict(num: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'} {detail}")


def _chordal(a: ProjectivePoint, b: ProjectivePoint) -> float:
    """Fully scale-invariant distance between projective points (the sine
    of the angle between their homogeneous vectors), uniform across the
    chart including near infinity."""
    num = abs(a.p * b.q - b.p * a.q)
    return num / (math.hypot(a.p, a.q) * math.hypot(b.p, b.q))


# ---------------------------------------------------------------------------
# 1. Product-of-exponentials coordinates against the direct group solve
# ---------------------------------------------------------------------------

def test_acceptance_01_factorized_sl2_solve_matches_direct():
    algebra = builtin_algebra("sl2")
    rep = builtin_representation("sl2-defining", algebra)
    b = CoefficientCurve.from_tokens(["cos", "0.3", "sin"])
    coords = solve_wei_norman(algebra, b, (0.0, 2.0), 2000, order=(0, 1, 2))
    recon = reconstruct(rep, coords)
    direct = solve_group_direct(rep, b, (0.0, 2.0), 2000)
    frob = float(np.max(np.sqrt(
        np.sum((recon.gs - direct.gs) ** 2, axis=(1, 2)))))
    det_drift = max(recon.det_drift(), direct.det_drift())
    ok = frob <= 1e-6 and det_drift <= 1e-8
    _verdict(1, ok, f"frobenius={frob:.3e} (tol 1e-6) "
                    f"det_drift={det_drift:.3e} (tol 1e-8)")
    assert frob <= 1e-6
    assert det_drift <= 1e-8


# ---------------------------------------------------------------------------
# 2. Affine group: both factor orders agree; scalar flow has a closed form
# ---------------------------------------------------------------------------

def test_acceptance_02_affine_factor_orders_and_scalar_closed_form():
    algebra = builtin_algebra("affine")
    rep = builtin_representation("affine-defining", algebra)
    c = 0.5
    b = CoefficientCurve.constant([1.0, c])
    recon = {
        order: reconstruct(
            rep, quadrature_solve(algebra, b, (0.0, 2.0), 2000, order=order))
        for order in ((0, 1), (1, 0))}
    order_gap = float(np.max(np.abs(recon[(0, 1)].gs - recon[(1, 0)].gs)))

    traj = solve_group_direct(rep, b, (0.0, 2.0), 2000)
    curve = action_by_tag("affine-line").propagate(traj, 1.0)
    decay = np.exp(-c * curve.ts)
    analytic = decay * 1.0 - (1.0 - decay) / c
    scalar_dev = float(np.max(np.abs(curve.values() - analytic)))
    ok = order_gap <= 1e-8 and scalar_dev <= 1e-8
    _verdict(2, ok, f"order_gap={order_gap:.3e} (tol 1e-8) "
                    f"scalar_vs_analytic={scalar_dev:.3e} (tol 1e-8)")
    assert order_gap <= 1e-8
    assert scalar_dev <= 1e-8


# ---------------------------------------------------------------------------
# 3. Scalar quadratic flow: constant anharmonic ratio and degenerations
# ---------------------------------------------------------------------------

def test_acceptance_03_riccati_superposition_invariant_and_degenerations():
    rep = builtin_representation("sl2-defining")
    b = CoefficientCurve.constant(
        riccati_to_group_coefficients([1.0, 0.0, 1.0]))
    action = action_by_tag("sl2-homography")
    traj = solve_group_direct(rep, b, (0.0, 0.9), 900)
    # the fourth seed's flow crosses its pole inside the window
    pts = [action.propagate(traj, x0).points
           for x0 in (0.0, 0.3, 0.7, 1.1)]
    n = len(traj)
    ratio0 = cross_ratio(pts[3][0], pts[0][0], pts[1][0], pts[2][0])
    ratio_dev = max(
        _chordal(cross_ratio(pts[3][i], pts[0][i], pts[1][i], pts[2][i]),
                 ratio0)
        for i in range(n))
    degen_dev = 0.0
    for k_val, target in ((0.0, 0), ("inf", 1), (1.0, 2)):
        k = ProjectivePoint.from_value(k_val)
        degen_dev = max(degen_dev, max(
            _chordal(superpose_riccati(pts[0][i], pts[1][i], pts[2][i], k),
                     pts[target][i])
            for i in range(n)))
    ok = ratio_dev <= 1e-6 and degen_dev <= 1e-9
    _verdict(3, ok, f"ratio_constancy={ratio_dev:.3e} (tol 1e-6) "
                    f"degenerations={degen_dev:.3e} (tol 1e-9)")
    assert ratio_dev <= 1e-6
    assert degen_dev <= 1e-9


# ---------------------------------------------------------------------------
# 4. Planar quadratic flow: two-constant combination formula
# ---------------------------------------------------------------------------

def _plane_rhs(t: float, z: complex) -> complex:
    return 1.0 + 0.2 * z + math.cos(t) * z * z


def _rk4_complex(z0: complex, ts: np.ndarray) -> np.ndarray:
    zs = [complex(z0)]
    for i in range(ts.size - 1):
        h = ts[i + 1] - ts[i]
        t, z = ts[i], zs[-1]
        k1 = _plane_rhs(t, z)
        k2 = _plane_rhs(t + h / 2, z + h / 2 * k1)
        k3 = _plane_rhs(t + h / 2, z + h / 2 * k2)
        k4 = _plane_rhs(t + h, z + h * k3)
        zs.append(z + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4))
    return np.array(zs)


def test_acceptance_04_planar_combination_solves_same_equation():
    dt = 1e-3
    ts = np.linspace(0.0, 1.0, 1001)
    sols = [_rk4_complex(z0, ts) for z0 in (1j, 0.5 + 0.8j, -0.4 + 1.3j)]
    stack = np.stack([np.column_stack([s.real, s.imag]) for s in sols],
                     axis=1)
    combo = np.array([
        superpose_planar_sl2(stack[i, 0], stack[i, 1], stack[i, 2], 0.4, 0.7)
        for i in range(ts.size)])
    w = combo[:, 0] + 1j * combo[:, 1]
    deriv = (w[2:] - w[:-2]) / (2 * dt)
    rhs = np.array([_plane_rhs(ts[i], w[i]) for i in range(1, ts.size - 1)])
    residual = float(np.max(np.abs(deriv - rhs)))

    degen_dev = 0.0
    for kk, target in (((0.0, 0.0), 0), ((1.0, 0.0), 2)):
        degen_dev = max(degen_dev, max(
            float(np.max(np.abs(np.asarray(
                superpose_planar_sl2(stack[i, 0], stack[i, 1],
                                     stack[i, 2], *kk))
                - stack[i, target])))
            for i in range(ts.size)))

    # on the invariant real axis the planar formula collapses to the
    # scalar one
    ts_r = np.linspace(0.0, 0.9, 901)
    real_sols = [np.array([z.real for z in _rk4_complex(x0, ts_r)])
                 for x0 in (0.0, 0.3, 0.7)]
    k_scalar = ProjectivePoint.from_value(0.4)
    slice_dev = 0.0
    for i in range(ts_r.size):
        planar = superpose_planar_sl2(
            np.array([real_sols[0][i], 0.0]),
            np.array([real_sols[1][i], 0.0]),
            np.array([real_sols[2][i], 0.0]), 0.4, 0.0)
        scalar = superpose_riccati(
            ProjectivePoint.from_value(real_sols[0][i]),
            ProjectivePoint.from_value(real_sols[1][i]),
            ProjectivePoint.from_value(real_sols[2][i]), k_scalar).value()
        slice_dev = max(slice_dev, abs(planar[0] - scalar), abs(planar[1]))

    ok = (residual <= 10 * dt * dt and degen_dev <= 1e-9
          and slice_dev <= 1e-9)
    _verdict(4, ok, f"ode_residual={residual:.3e} (tol {10 * dt * dt:.0e}) "
                    f"degenerations={degen_dev:.3e} (tol 1e-9) "
                    f"real_slice={slice_dev:.3e} (tol 1e-9)")
    assert residual <= 10 * dt * dt
    assert degen_dev <= 1e-9
    assert slice_dev <= 1e-9


# ---------------------------------------------------------------------------
# 5. Splitting a known particular solution off the group equation
# ---------------------------------------------------------------------------

def test_acceptance_05_reduction_by_tangent_particular_solution():
    rep = builtin_representation("sl2-defining")
    action = Sl2HomographyAction()
    b = CoefficientCurve.constant(
        riccati_to_group_coefficients([1.0, 0.0, 1.0]))

    ts = np.linspace(0.0, 1.2, 1201)
    xs = np.tan(ts)
    lift = lift_solution(action, (ts, xs), x_dot=1.0 + xs ** 2)
    reduced = reduce_to_subgroup(rep, b, lift, (1, 2))

    full = np.zeros((ts.size, 3))
    full[:, [1, 2]] = reduced.samples
    h = solve_group_direct(rep, CoefficientCurve.from_samples(ts, full),
                           (0.0, 1.2), ts.size - 1)
    direct = solve_group_direct(rep, b, (0.0, 1.2), ts.size - 1)
    reassembly_dev = float(np.max(np.abs(reassemble(lift, h).gs
                                         - direct.gs)))

    # moving the base point to infinity instead exposes the scalar-chart
    # coefficient pair (2 c0 / x1 + c1, c0); with the sign convention of
    # the group equation the residual components are their negatives
    ts2 = np.linspace(0.1, 1.2, 1101)
    xs2 = np.tan(ts2)
    lift2 = lift_solution(action, (ts2, xs2), x_dot=1.0 + xs2 ** 2,
                          base_point=math.inf)
    reduced2 = reduce_to_subgroup(rep, b, lift2, (0, 1))
    chart_dev = max(
        float(np.max(np.abs(reduced2.samples[:, 0] + 1.0))),
        float(np.max(np.abs(reduced2.samples[:, 1] + 2.0 / np.tan(ts2)))))

    leakage = max(reduced.leakage, reduced2.leakage)
    ok = (leakage <= 1e-6 and reassembly_dev <= 1e-5
          and chart_dev <= 1e-6)
    _verdict(5, ok, f"leakage={leakage:.3e} (tol 1e-6) "
                    f"reassembly={reassembly_dev:.3e} (tol 1e-5) "
                    f"chart_coefficients={chart_dev:.3e} (tol 1e-6)")
    assert leakage <= 1e-6
    assert reassembly_dev <= 1e-5
    assert chart_dev <= 1e-6


# ---------------------------------------------------------------------------
# 6. Gauge moves: transformed system integrates to the conjugated solution
# ---------------------------------------------------------------------------

def test_acceptance_06_gauge_covariance_and_rate_cocycle():
    rep = builtin_representation("sl2-defining")
    action = Sl2HomographyAction()
    b = CoefficientCurve.constant(
        riccati_to_group_coefficients([1.0, 0.0, 1.0]))
    rng = np.random.default_rng(0)

    a_mat = rep.matrix_of(rng.uniform(-1.0, 1.0, size=3))
    ts = np.linspace(0.0, 2.0, 2001)
    angle = 0.2 + 0.3 * np.sin(ts) + 0.1 * ts
    rate = 0.3 * np.cos(ts) + 0.1
    gs = np.array([scipy_expm(s * a_mat) for s in angle])
    dgs = rate[:, None, None] * (np.einsum("ij,njk->nik", a_mat, gs))
    gauge = GaugeCurve(rep, ts, gs, dgs=dgs)

    b_bar = gauge_transform_coefficients(gauge, b)
    transformed = solve_group_direct(rep, b_bar, (0.0, 2.0), 2000)
    original = solve_group_direct(rep, b, (0.0, 2.0), 2000)
    expected = gs @ original.gs @ np.linalg.inv(gs[0])
    group_dev = float(np.max(np.abs(transformed.gs - expected)))

    # the moved flow on the line solves the transformed system
    x0 = ProjectivePoint.from_value(0.2)
    moved0 = action.apply(gs[0], x0)
    orig_curve = action.propagate(original, x0)
    moved_curve = action.propagate(transformed, moved0.value())
    point_dev = max(
        _chordal(moved_curve.points[i],
                 action.apply(gs[i], orig_curve.points[i]))
        for i in range(ts.size))

    # product rule for right-logarithmic rates, by centered differences
    b_mat = rep.matrix_of(rng.uniform(-1.0, 1.0, size=3))
    angle2 = 0.4 * np.cos(0.7 * ts) - 0.4
    gs2 = np.array([scipy_expm(s * b_mat) for s in angle2])
    r12 = right_log_rates(rep, ts, gs @ gs2)
    r1 = right_log_rates(rep, ts, gs)
    r2 = right_log_rates(rep, ts, gs2)
    cocycle_dev = max(
        float(np.max(np.abs(r12[i] - r1[i] - rep.adjoint(gs[i]) @ r2[i])))
        for i in range(0, ts.size, 40))

    ok = (group_dev <= 1e-6 and point_dev <= 1e-6
          and cocycle_dev <= 1e-5)
    _verdict(6, ok, f"group={group_dev:.3e} (tol 1e-6) "
                    f"moved_points={point_dev:.3e} (tol 1e-6) "
                    f"cocycle={cocycle_dev:.3e} (tol 1e-5)")
    assert group_dev <= 1e-6
    assert point_dev <= 1e-6
    assert cocycle_dev <= 1e-5


# ---------------------------------------------------------------------------
# 7. Spin-1/2: unitarity, orthogonality, and the double cover
# ---------------------------------------------------------------------------

def test_acceptance_07_spin_half_constant_and_rotating_fields():
    unitarity = orthogonality = covering = 0.0
    for tokens in (["0", "0", "1"], ["cos:0.4:2", "sin:0.4:2", "1"]):
        drive = MagneticDrive(CoefficientCurve.from_tokens(tokens), mu=1.0)
        ev = spin_evolution(drive, 2.0, 1e-3)
        report = ev.report()
        unitarity = max(unitarity, report["spinor_unitarity_drift"])
        orthogonality = max(orthogonality,
                            report["rotation_orthogonality_drift"])
        covering = max(covering, report["covering_mismatch"])
    ok = unitarity <= 1e-8 and orthogonality <= 1e-8 and covering <= 1e-6
    _verdict(7, ok, f"unitarity={unitarity:.3e} (tol 1e-8) "
                    f"orthogonality={orthogonality:.3e} (tol 1e-8) "
                    f"covering={covering:.3e} (tol 1e-6)")
    assert unitarity <= 1e-8
    assert orthogonality <= 1e-8
    assert covering <= 1e-6


# ---------------------------------------------------------------------------
# 8. Classical particle in a cosine-modulated uniform force
# ---------------------------------------------------------------------------

def test_acceptance_08_classical_linear_potential_invariants():
    drive = LinearPotentialDrive.monochromatic(m=1.0, q=1.0, e0=0.5,
                                               e_cos=1.0, omega=2.0)
    x0, p0 = 0.3, 1.1
    motion = classical_linear_potential(drive, x0, p0, 10.0, 1e-3)
    drift = max(motion.momentum_invariant_drift,
                motion.position_invariant_drift)
    ts = motion.ts
    force_int = 0.5 * ts + np.sin(2.0 * ts) / 2.0          # integral of f
    force_int2 = 0.25 * ts ** 2 + (1.0 - np.cos(2.0 * ts)) / 4.0
    traj_dev = max(
        float(np.max(np.abs(motion.momenta - (p0 - force_int)))),
        float(np.max(np.abs(motion.positions
                            - (x0 + p0 * ts - force_int2)))))
    ok = drift <= 1e-8 and traj_dev <= 1e-7
    _verdict(8, ok, f"invariant_drift={drift:.3e} (tol 1e-8) "
                    f"trajectory_vs_quadratures={traj_dev:.3e} (tol 1e-7)")
    assert drift <= 1e-8
    assert traj_dev <= 1e-7


# ---------------------------------------------------------------------------
# 9. Quantum particle: momentum-space evolution and factor tables
# ---------------------------------------------------------------------------

def test_acceptance_09_quantum_linear_potential_and_factor_tables():
    drive = LinearPotentialDrive.monochromatic(m=1.0, q=1.0, e0=0.5,
                                               e_cos=1.0, omega=2.0)
    psi0 = MomentumWavefunction.gaussian(-30.0, 60.0 / 1024, 1024,
                                         center=2.0, sigma=1.0)
    norm_drift = 0.0
    momentum_dev = 0.0
    for t_end in (0.5, 1.0, 1.5, 2.0):
        motion = quantum_linear_potential(drive, psi0, t_end, 1e-3)
        norm_drift = max(norm_drift,
                         abs(motion.wavefunction.norm() - 1.0))
        classical_p = 2.0 - (0.5 * t_end + math.sin(2.0 * t_end) / 2.0)
        momentum_dev = max(
            momentum_dev,
            abs(motion.wavefunction.expectation_momentum() - classical_p))

    # both factor orders rebuild the same group element for the same drive
    factors = propagator_factors(drive, 2.0, dt=1e-3)
    rebuild_gap = factors.reconstruction_mismatch

    # for a constant force every factor coordinate has a polynomial form
    const = LinearPotentialDrive(CoefficientCurve.constant([1.0]), m=1.0)
    fc = propagator_factors(const, 2.0, dt=1e-3)
    ts = fc.ts
    table_dev = max(
        float(np.max(np.abs(fc.descending.vs - np.column_stack(
            [ts, -ts, ts ** 2 / 2.0, ts ** 3 / 3.0])))),
        float(np.max(np.abs(fc.interleaved.vs - np.column_stack(
            [ts, -ts, ts ** 2 / 2.0, -ts ** 3 / 6.0])))))

    ok = (norm_drift <= 1e-8 and momentum_dev <= 1e-6
          and rebuild_gap <= 1e-8 and table_dev <= 1e-9)
    _verdict(9, ok, f"norm_drift={norm_drift:.3e} (tol 1e-8) "
                    f"momentum_vs_classical={momentum_dev:.3e} (tol 1e-6) "
                    f"factor_rebuild_gap={rebuild_gap:.3e} (tol 1e-8) "
                    f"constant_force_tables={table_dev:.3e} (tol 1e-9)")
    assert norm_drift <= 1e-8
    assert momentum_dev <= 1e-6
    assert rebuild_gap <= 1e-8
    assert table_dev <= 1e-9


# ---------------------------------------------------------------------------
# 10. Structure suite: bracket tables and matrix models of every builtin
# ---------------------------------------------------------------------------

def test_acceptance_10_structure_suite_all_builtins():
    jacobi_worst = 0.0
    rep_worst = 0.0
    for tag in BUILTIN_ALGEBRAS:
        algebra = builtin_algebra(tag)
        algebra.validate()  # antisymmetry + Jacobi, raises on failure
        f = algebra.structure
        jac = (np.einsum("abm,mcn->abcn", f, f)
               + np.einsum("bcm,man->abcn", f, f)
               + np.einsum("cam,mbn->abcn", f, f))
        jacobi_worst = max(jacobi_worst,
                           float(np.max(np.abs(jac))) if algebra.dim else 0.0)
        rep = builtin_representation(default_representation_name(tag),
                                     algebra)
        rep.validate()  # commutators match the bracket table
        mats = rep.mats
        comm_dev = 0.0
        for i in range(algebra.dim):
            for j in range(algebra.dim):
                target = sum(f[i, j, k] * mats[k]
                             for k in range(algebra.dim))
                comm_dev = max(comm_dev, float(np.max(np.abs(
                    mats[i] @ mats[j] - mats[j] @ mats[i] - target))))
        rep_worst = max(rep_worst, comm_dev)
    # the complex 2x2 model of the rotation algebra is a second model
    builtin_representation("su2-spinor").validate()

    # general-linear bracket table equals the elementary-matrix identity,
    # integer for integer
    gl_exact = True
    for n in (2, 3):
        algebra = builtin_algebra(f"gl{n}")
        r = n * n
        expected = np.zeros((r, r, r))
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    for l in range(n):
                        a, bb = i * n + j, k * n + l
                        if j == k:
                            expected[a, bb, i * n + l] += 1.0
                        if i == l:
                            expected[a, bb, k * n + j] -= 1.0
        gl_exact = gl_exact and np.array_equal(algebra.structure, expected)

    ok = jacobi_worst <= 1e-10 and rep_worst <= 1e-10 and gl_exact
    _verdict(10, ok, f"jacobi={jacobi_worst:.3e} (tol 1e-10) "
                     f"rep_homomorphism={rep_worst:.3e} (tol 1e-10) "
                     f"gl_table_exact={gl_exact}")
    assert jacobi_worst <= 1e-10
    assert rep_worst <= 1e-10
    assert gl_exact
