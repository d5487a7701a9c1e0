"""Spin precession and the uniform-force particle, end to end.

Two worked systems exercise every layer of the toolkit:

* **Spin-1/2 in a time-varying magnetic field** — the same coefficient
  curve is integrated in the rotation group (3x3 real) and in its double
  cover (2x2 unitary), and :func:`covering_map` ties the two trajectories
  together.

* **A particle in a spatially uniform, time-dependent force field** —
  classically the phase-plane motion is carried by a nilpotent 3x3 group
  action with two constants of motion; quantum mechanically the
  momentum-space propagator factors into four explicit exponentials whose
  coordinates are iterated quadratures of the force.

Conventions: ``hbar = 1`` throughout, and the magnetic coupling ``mu``
absorbs all physical prefactors.

Sign bridge between the two quantum entry points:
:func:`propagator_factors` tabulates factor coordinates for the
coefficient set ``(1/m, -f, 0, 0)`` — the direct extension of the
classical phase-plane coefficient set ``(1/m, -f, 0)`` — while
:func:`quantum_linear_potential` evolves wavefunctions with the negated
set ``(-1/m, +f, 0, 0)``, which is the flow whose momentum expectation
follows the classical momentum.  The two sets generate different flows
whose coordinates differ only by explicit signs; the factor tables carry
their own exact matrix-reconstruction cross-check either way.
"""

from __future__ import annotations

import numpy as np

from .algebra import _PAULI, builtin_algebra, builtin_representation
from .curves import CoefficientCurve
from .errors import (
    DegenerateInputError,
    DimensionError,
    NumericalBreakdownError,
    SetupError,
)
from .groupflow import GroupTrajectory, solve_group_direct
from .homogeneous import HeisenbergPlaneAction, PointCurve
from .weinorman import (
    CanonicalCoords,
    cumulative_integral_half_grid,
    quadrature_solve,
    reconstruct,
)

NORM_TOL = 1e-10
TAIL_MASS_TOL = 1e-8
FACTOR_CHECK_TOL = 1e-8
_UNITARY_TOL = 1e-6

#: Factor order multiplying the extended phase-space basis in reverse
#: index order (central, momentum, position, kinetic from left to right).
FACTOR_ORDER_DESCENDING = (3, 2, 1, 0)

#: Factor order with the middle two factors swapped (central, position,
#: momentum, kinetic).  This is the order whose action on momentum-space
#: amplitudes is closed-form: global phase, grid shift, linear phase,
#: quadratic phase.
FACTOR_ORDER_INTERLEAVED = (3, 1, 2, 0)

__all__ = [
    "MagneticDrive",
    "SpinEvolution",
    "spin_evolution",
    "covering_map",
    "LinearPotentialDrive",
    "ClassicalMotion",
    "classical_linear_potential",
    "MomentumWavefunction",
    "QuantumMotion",
    "quantum_linear_potential",
    "PropagatorFactors",
    "propagator_factors",
    "FACTOR_ORDER_DESCENDING",
    "FACTOR_ORDER_INTERLEAVED",
]


def _steps_for(t_end: float, dt: float) -> int:
    """Number of uniform steps covering ``[0, t_end]`` at target ``dt``."""
    t_end = float(t_end)
    dt = float(dt)
    if not np.isfinite(t_end) or t_end <= 0.0:
        raise SetupError("t_end must be positive")
    if not np.isfinite(dt) or dt <= 0.0:
        raise SetupError("dt must be positive")
    steps = max(1, int(round(t_end / dt)))
    if steps > 50_000_000:
        raise SetupError(
            f"window/dt asks for {steps} steps; refusing (check units)")
    return steps


def _as_curve(value, dim: int, what: str) -> CoefficientCurve:
    """Coerce a curve / constant vector / callable into a curve."""
    if isinstance(value, CoefficientCurve):
        if value.dim != dim:
            raise DimensionError(
                f"{what} must have dimension {dim}, got {value.dim}")
        return value
    if callable(value):
        return CoefficientCurve.from_function(dim, value, description=what)
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.shape != (dim,):
        raise DimensionError(
            f"{what} must be a curve, callable, or length-{dim} constant")
    return CoefficientCurve.constant(arr)


# ---------------------------------------------------------------------------
# Spin-1/2 in a magnetic field
# ---------------------------------------------------------------------------

class MagneticDrive:
    """A time-dependent magnetic field with coupling ``mu``.

    ``field`` may be a dimension-3 :class:`CoefficientCurve`, a callable
    ``t -> (B1, B2, B3)``, or a constant 3-vector.  The group-equation
    coefficients are ``mu * B(t)``.
    """

    def __init__(self, field, mu: float = 1.0):
        self.field = _as_curve(field, 3, "magnetic field")
        self.mu = float(mu)
        if not np.isfinite(self.mu):
            raise SetupError("coupling mu must be finite")

    @classmethod
    def constant(cls, b1: float, b2: float, b3: float,
                 mu: float = 1.0) -> "MagneticDrive":
        return cls(np.array([b1, b2, b3], dtype=float), mu=mu)

    def group_coefficients(self) -> CoefficientCurve:
        """Coefficient curve ``mu * B(t)`` driving both group equations."""
        field = self.field
        mu = self.mu
        return CoefficientCurve(
            3, lambda t: mu * field(t), domain=field.domain,
            description=f"mu*B (mu={mu:g})")

    def __repr__(self) -> str:
        return f"<MagneticDrive mu={self.mu:g} {self.field.description}>"


class SpinEvolution:
    """Paired rotation-group and double-cover trajectories of a spin.

    Attributes
    ----------
    rotations:
        3x3 orthogonal trajectory (the observable frame rotation).
    spinor_frames:
        2x2 unitary trajectory in the double cover.
    spinors:
        ``(N, 2)`` complex samples ``spinor_frames[i] @ spinor0`` when an
        initial spinor was supplied, else ``None``.
    """

    def __init__(self, rotations: GroupTrajectory,
                 spinor_frames: GroupTrajectory,
                 spinors: np.ndarray | None = None):
        self.rotations = rotations
        self.spinor_frames = spinor_frames
        self.spinors = spinors

    @property
    def ts(self) -> np.ndarray:
        return self.rotations.ts

    def covering_mismatch(self) -> float:
        """Largest deviation between the rotation trajectory and the one
        induced from the double cover via :func:`covering_map`."""
        worst = 0.0
        for g2, g3 in zip(self.spinor_frames.gs, self.rotations.gs):
            worst = max(worst, float(np.max(np.abs(covering_map(g2) - g3))))
        return worst

    def report(self) -> dict:
        return {
            "samples": len(self.rotations),
            "t_end": float(self.ts[-1]),
            "rotation_orthogonality_drift":
                self.rotations.orthogonality_drift(),
            "spinor_unitarity_drift":
                self.spinor_frames.unitarity_drift(),
            "covering_mismatch": self.covering_mismatch(),
        }

    def __repr__(self) -> str:
        return (f"<SpinEvolution {len(self.rotations)} samples "
                f"t_end={self.ts[-1]:g}>")


def covering_map(u: np.ndarray) -> np.ndarray:
    """Rotation matrix induced by a 2x2 special-unitary matrix.

    Entry ``(i, j)`` is ``Re tr(sigma_i u sigma_j u^dagger) / 2``; the map
    is two-to-one (``u`` and ``-u`` give the same rotation).
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise DimensionError("double-cover elements are 2x2 matrices")
    if np.max(np.abs(u.conj().T @ u - np.eye(2))) > _UNITARY_TOL:
        raise SetupError("matrix is not unitary; not in the double cover")
    out = np.empty((3, 3))
    conj = [u @ s @ u.conj().T for s in _PAULI]
    for i, si in enumerate(_PAULI):
        for j in range(3):
            out[i, j] = 0.5 * np.trace(si @ conj[j]).real
    return out


def spin_evolution(drive: MagneticDrive, t_end: float, dt: float = 1e-3,
                   spinor0=None) -> SpinEvolution:
    """Integrate the spin equations in the rotation group and its double
    cover over ``[0, t_end]``.

    Both solves use the same coefficient curve ``mu * B(t)`` with the
    matched basis pair (rotation generators / ``-i sigma / 2``), so the
    covering map carries one trajectory onto the other.  If ``spinor0``
    is given (complex pair), the evolved spinors are returned as well.
    """
    steps = _steps_for(t_end, dt)
    b = drive.group_coefficients()
    so3 = solve_group_direct(builtin_representation("so3-defining"), b,
                             (0.0, float(t_end)), steps)
    su2 = solve_group_direct(builtin_representation("su2-spinor"), b,
                             (0.0, float(t_end)), steps)
    spinors = None
    if spinor0 is not None:
        s0 = np.asarray(spinor0, dtype=complex)
        if s0.shape != (2,):
            raise DimensionError("initial spinor must be a complex pair")
        spinors = su2.gs @ s0
    return SpinEvolution(so3, su2, spinors)


# ---------------------------------------------------------------------------
# Classical particle in a uniform time-dependent force
# ---------------------------------------------------------------------------

class LinearPotentialDrive:
    """A spatially uniform, time-dependent force ``f(t)`` on a particle of
    mass ``m``.

    ``force`` may be a dimension-1 :class:`CoefficientCurve`, a callable
    ``t -> f``, or a constant.
    """

    def __init__(self, force, m: float = 1.0):
        self.force_curve = _as_curve(force, 1, "force")
        self.mass = float(m)
        if not np.isfinite(self.mass) or self.mass <= 0.0:
            raise SetupError("mass must be positive")

    @classmethod
    def monochromatic(cls, m: float = 1.0, q: float = 1.0,
                      e0: float = 0.0, e_cos: float = 0.0,
                      omega: float = 1.0) -> "LinearPotentialDrive":
        """Charge ``q`` in a constant-plus-cosine field:
        ``f(t) = q * (e0 + e_cos * cos(omega t))``."""
        def force(t: float) -> float:
            return q * (e0 + e_cos * np.cos(omega * t))
        return cls(CoefficientCurve.from_function(
            1, lambda t: [force(t)],
            description=f"q(E0+E cos wt) q={q:g} E0={e0:g} "
                        f"E={e_cos:g} w={omega:g}"), m=m)

    def force_at(self, t: float) -> float:
        return float(self.force_curve(t)[0])

    def classical_coefficients(self) -> CoefficientCurve:
        """Phase-plane group-equation coefficients ``(1/m, -f(t), 0)``."""
        fc, m = self.force_curve, self.mass
        return CoefficientCurve(
            3, lambda t: np.array([1.0 / m, -fc(t)[0], 0.0]),
            domain=fc.domain, description="phase-plane coefficients")

    def quantum_coefficients(self) -> CoefficientCurve:
        """Extended-algebra coefficients ``(-1/m, f(t), 0, 0)`` for the
        momentum-space wavefunction evolution."""
        fc, m = self.force_curve, self.mass
        return CoefficientCurve(
            4, lambda t: np.array([-1.0 / m, fc(t)[0], 0.0, 0.0]),
            domain=fc.domain, description="wavefunction coefficients")

    def extended_classical_coefficients(self) -> CoefficientCurve:
        """Extended-algebra coefficients ``(1/m, -f(t), 0, 0)`` — the
        classical set padded with zeros; used by the factor tables."""
        fc, m = self.force_curve, self.mass
        return CoefficientCurve(
            4, lambda t: np.array([1.0 / m, -fc(t)[0], 0.0, 0.0]),
            domain=fc.domain, description="factor-table coefficients")

    def __repr__(self) -> str:
        return (f"<LinearPotentialDrive m={self.mass:g} "
                f"{self.force_curve.description}>")


class ClassicalMotion:
    """Phase-plane trajectory of the uniform-force particle plus its two
    constants of motion evaluated at every grid time.

    The constants are ``p(t) + F1(t)`` and
    ``x(t) - (p(t) + F1(t)) t / m + F2(t) / m`` where ``F1`` and ``F2``
    are the running first and second integrals of the force, computed by
    panel quadrature independently of the group flow, so the reported
    drifts measure genuine agreement between two integration routes.
    """

    def __init__(self, drive: LinearPotentialDrive, group: GroupTrajectory,
                 phase_curve: PointCurve, force_integral: np.ndarray,
                 force_double_integral: np.ndarray):
        self.drive = drive
        self.group = group
        self.phase_curve = phase_curve
        self.ts = group.ts
        self.positions = phase_curve.points[:, 0].copy()
        self.momenta = phase_curve.points[:, 1].copy()
        self.force_integral = force_integral
        self.force_double_integral = force_double_integral
        m = drive.mass
        self.momentum_invariant = self.momenta + force_integral
        self.position_invariant = (
            self.positions
            - self.momentum_invariant * self.ts / m
            + force_double_integral / m)

    @property
    def momentum_invariant_drift(self) -> float:
        inv = self.momentum_invariant
        return float(np.max(np.abs(inv - inv[0])))

    @property
    def position_invariant_drift(self) -> float:
        inv = self.position_invariant
        return float(np.max(np.abs(inv - inv[0])))

    def report(self) -> dict:
        return {
            "samples": len(self.ts),
            "t_end": float(self.ts[-1]),
            "x_final": float(self.positions[-1]),
            "p_final": float(self.momenta[-1]),
            "momentum_invariant_drift": self.momentum_invariant_drift,
            "position_invariant_drift": self.position_invariant_drift,
        }

    def __repr__(self) -> str:
        return (f"<ClassicalMotion {len(self.ts)} samples "
                f"x_final={self.positions[-1]:g} "
                f"p_final={self.momenta[-1]:g}>")


def classical_linear_potential(drive: LinearPotentialDrive, x0: float,
                               p0: float, t_end: float,
                               dt: float = 1e-3) -> ClassicalMotion:
    """Integrate the classical uniform-force motion from ``(x0, p0)``.

    The phase-plane flow is the group solution of the nilpotent 3x3
    equation with coefficients ``(1/m, -f(t), 0)`` acting on ``(x, p)``;
    the running force integrals used by the invariants are computed by
    independent panel quadrature on the same half grid.
    """
    steps = _steps_for(t_end, dt)
    span = (0.0, float(t_end))
    b = drive.classical_coefficients()
    rep = builtin_representation("heisenberg-3x3")
    traj = solve_group_direct(rep, b, span, steps)
    action = HeisenbergPlaneAction(rep)
    curve = action.propagate(traj, (float(x0), float(p0)))

    half_ts = np.linspace(span[0], span[1], 2 * steps + 1)
    dt_actual = float(traj.ts[1] - traj.ts[0])
    f_half = drive.force_curve.sample(half_ts)[:, 0]
    f1_half = cumulative_integral_half_grid(f_half, dt_actual)
    f2_half = cumulative_integral_half_grid(f1_half, dt_actual)
    return ClassicalMotion(drive, traj, curve,
                           f1_half[::2], f2_half[::2])


# ---------------------------------------------------------------------------
# Quantum particle in a uniform time-dependent force
# ---------------------------------------------------------------------------

class MomentumWavefunction:
    """A wavefunction sampled on a uniform momentum grid.

    The grid is ``p_j = p_min + j * dp`` for ``j = 0 .. n-1`` with ``n`` a
    power of two (the spectral shift needs it); amplitudes are complex and
    unit-normalized in the discrete sense ``dp * sum |psi|^2 = 1`` within
    1e-10 (pass ``normalize=True`` to rescale on construction).
    """

    def __init__(self, p_min: float, dp: float, amplitudes, *,
                 mass: float | None = None, normalize: bool = False):
        self.p_min = float(p_min)
        self.dp = float(dp)
        if not np.isfinite(self.dp) or self.dp <= 0.0:
            raise SetupError("grid spacing dp must be positive")
        amps = np.asarray(amplitudes, dtype=complex).copy()
        if amps.ndim != 1:
            raise DimensionError("amplitudes must be a flat complex array")
        n = amps.size
        if n < 2 or (n & (n - 1)) != 0:
            raise DimensionError(
                f"grid size must be a power of two >= 2, got {n}")
        if not np.all(np.isfinite(amps)):
            raise DegenerateInputError("amplitudes contain non-finite values")
        norm = self.dp * float(np.sum(np.abs(amps) ** 2))
        if normalize:
            if norm <= 0.0:
                raise DegenerateInputError("cannot normalize a zero state")
            amps = amps / np.sqrt(norm)
        elif abs(norm - 1.0) > NORM_TOL:
            raise DegenerateInputError(
                f"amplitudes are not unit-normalized (dp*sum|psi|^2 = "
                f"{norm:.12g}); pass normalize=True to rescale")
        amps.setflags(write=False)
        self.amplitudes = amps
        self.mass = None if mass is None else float(mass)

    @classmethod
    def gaussian(cls, p_min: float, dp: float, n: int, *,
                 center: float = 0.0, sigma: float = 1.0,
                 mass: float | None = None) -> "MomentumWavefunction":
        """Normalized Gaussian with probability-density standard deviation
        ``sigma`` centered at ``center``."""
        if sigma <= 0.0:
            raise SetupError("sigma must be positive")
        ps = float(p_min) + float(dp) * np.arange(int(n))
        amps = np.exp(-((ps - center) ** 2) / (4.0 * sigma ** 2))
        return cls(p_min, dp, amps.astype(complex), mass=mass,
                   normalize=True)

    @property
    def n(self) -> int:
        return self.amplitudes.size

    @property
    def ps(self) -> np.ndarray:
        return self.p_min + self.dp * np.arange(self.n)

    @property
    def half_width(self) -> float:
        return 0.5 * self.n * self.dp

    def norm(self) -> float:
        """Discrete norm ``dp * sum |psi|^2``."""
        return self.dp * float(np.sum(np.abs(self.amplitudes) ** 2))

    def probability_density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def expectation_momentum(self) -> float:
        return self.dp * float(np.sum(self.ps * self.probability_density()))

    def tail_mass(self, edge_points: int = 2) -> float:
        """Probability mass sitting on the outermost grid points (an
        aliasing indicator for the spectral shift)."""
        k = int(edge_points)
        dens = self.probability_density()
        return self.dp * float(np.sum(dens[:k]) + np.sum(dens[-k:]))

    def shifted(self, s: float) -> "MomentumWavefunction":
        """Band-limited resampling of the state at ``p + s``.

        Implemented spectrally: forward FFT, multiply by the linear phase
        of the shift, inverse FFT.  Exact for band-limited data and
        norm-preserving to machine precision; the grid itself is
        unchanged.
        """
        freqs = np.fft.fftfreq(self.n, d=self.dp)
        spectrum = np.fft.fft(self.amplitudes)
        moved = np.fft.ifft(spectrum * np.exp(2j * np.pi * freqs * float(s)))
        return MomentumWavefunction(self.p_min, self.dp, moved,
                                    mass=self.mass)

    def to_csv(self, path) -> None:
        from .fileio import write_wavefunction_csv
        write_wavefunction_csv(path, self)

    def __repr__(self) -> str:
        return (f"<MomentumWavefunction n={self.n} "
                f"p in [{self.p_min:g}, {self.p_min + self.n * self.dp:g})>")


class QuantumMotion:
    """Result of a momentum-space evolution: the final state, the factor
    coordinates that produced it, and aliasing diagnostics."""

    def __init__(self, wavefunction: MomentumWavefunction,
                 coords: CanonicalCoords, momentum_shift: float,
                 tail_mass: float):
        self.wavefunction = wavefunction
        self.coords = coords
        self.momentum_shift = float(momentum_shift)
        self.tail_mass = float(tail_mass)
        self.aliasing_warning = bool(self.tail_mass > TAIL_MASS_TOL)

    def report(self) -> dict:
        return {
            "t_end": float(self.coords.ts[-1]),
            "norm": self.wavefunction.norm(),
            "expectation_momentum":
                self.wavefunction.expectation_momentum(),
            "momentum_shift": self.momentum_shift,
            "tail_mass": self.tail_mass,
            "aliasing_warning": self.aliasing_warning,
        }

    def __repr__(self) -> str:
        return (f"<QuantumMotion t_end={self.coords.ts[-1]:g} "
                f"shift={self.momentum_shift:g} "
                f"aliasing={self.aliasing_warning}>")


def quantum_linear_potential(drive: LinearPotentialDrive,
                             psi0: MomentumWavefunction, t_end: float,
                             dt: float = 1e-3) -> QuantumMotion:
    """Evolve a momentum-space state under kinetic energy plus a uniform
    time-dependent force.

    The four factor coordinates of the propagator are obtained by
    iterated quadratures (order :data:`FACTOR_ORDER_INTERLEAVED`, basis
    indices kinetic/position/momentum/central); the final state is then
    assembled in closed form: band-limited shift of the grid by the
    accumulated impulse, a linear-plus-quadratic phase in the shifted
    momentum, and a global phase.

    Preconditions: the accumulated impulse must stay within a quarter of
    the grid half-width (raises :class:`DegenerateInputError` otherwise);
    probability mass on the outermost grid points above 1e-8 sets the
    ``aliasing_warning`` flag on the result.
    """
    if not isinstance(psi0, MomentumWavefunction):
        raise SetupError("psi0 must be a MomentumWavefunction")
    steps = _steps_for(t_end, dt)
    algebra = builtin_algebra("heisenberg-extended")
    coords = quadrature_solve(algebra, drive.quantum_coefficients(),
                              (0.0, float(t_end)), steps,
                              order=FACTOR_ORDER_INTERLEAVED)
    quad_coef, shift, lin_coef, global_phase = coords.final()
    limit = psi0.half_width / 4.0
    if abs(shift) > limit:
        raise DegenerateInputError(
            f"momentum grid too narrow: accumulated impulse {shift:.6g} "
            f"exceeds a quarter of the grid half-width ({limit:.6g}); "
            f"enlarge the grid")
    moved = psi0.shifted(shift)
    q = moved.ps + shift
    phase = lin_coef * q + 0.5 * quad_coef * q ** 2 - global_phase
    amps = np.exp(1j * phase) * moved.amplitudes
    final = MomentumWavefunction(psi0.p_min, psi0.dp, amps, mass=psi0.mass)
    return QuantumMotion(final, coords, shift, final.tail_mass())


class PropagatorFactors:
    """The factor coordinates of the uniform-force propagator in the two
    standard orders, with their matrix cross-check.

    Attributes
    ----------
    descending:
        Coordinates for :data:`FACTOR_ORDER_DESCENDING`.
    interleaved:
        Coordinates for :data:`FACTOR_ORDER_INTERLEAVED`.
    reconstruction_mismatch:
        Largest entrywise difference between the two product
        reconstructions in the faithful 4x4 representation, over the
        whole window.
    """

    def __init__(self, descending: CanonicalCoords,
                 interleaved: CanonicalCoords,
                 reconstruction_mismatch: float):
        self.descending = descending
        self.interleaved = interleaved
        self.reconstruction_mismatch = float(reconstruction_mismatch)

    @property
    def ts(self) -> np.ndarray:
        return self.descending.ts

    def report(self) -> dict:
        return {
            "t_end": float(self.ts[-1]),
            "descending_order": list(self.descending.order),
            "descending_final": [float(x) for x in self.descending.final()],
            "interleaved_order": list(self.interleaved.order),
            "interleaved_final": [float(x) for x in self.interleaved.final()],
            "reconstruction_mismatch": self.reconstruction_mismatch,
        }

    def __repr__(self) -> str:
        return (f"<PropagatorFactors t_end={self.ts[-1]:g} "
                f"mismatch={self.reconstruction_mismatch:.3e}>")


def propagator_factors(drive: LinearPotentialDrive, t_end: float,
                       dt: float = 1e-2,
                       check_tol: float = FACTOR_CHECK_TOL
                       ) -> PropagatorFactors:
    """Tabulate the propagator factor coordinates in both standard orders
    for the coefficient set ``(1/m, -f(t), 0, 0)``.

    Both coordinate sets come from iterated quadratures; they are then
    multiplied back out in the faithful 4x4 representation and compared
    sample by sample.  A mismatch above ``check_tol`` raises
    :class:`NumericalBreakdownError` (it indicates a quadrature grid far
    too coarse for the drive).
    """
    steps = _steps_for(t_end, dt)
    algebra = builtin_algebra("heisenberg-extended")
    b = drive.extended_classical_coefficients()
    span = (0.0, float(t_end))
    desc = quadrature_solve(algebra, b, span, steps,
                            order=FACTOR_ORDER_DESCENDING)
    inter = quadrature_solve(algebra, b, span, steps,
                             order=FACTOR_ORDER_INTERLEAVED)
    rep = builtin_representation("heisenberg-extended-4x4", algebra)
    g_desc = reconstruct(rep, desc)
    g_inter = reconstruct(rep, inter)
    mismatch = float(np.max(np.abs(g_desc.gs - g_inter.gs)))
    if mismatch > check_tol:
        raise NumericalBreakdownError(
            f"the two factor orders reconstruct different group elements "
            f"(mismatch {mismatch:.3e} > {check_tol:g}); refine dt",
            t=float(t_end))
    return PropagatorFactors(desc, inter, mismatch)
