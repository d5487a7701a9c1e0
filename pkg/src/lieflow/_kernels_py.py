"""Pure NumPy implementations of the numerical hot kernels.

These are the reference implementations; `lieflow._kernels` (optional
compiled extension) provides drop-in replacements selected at import time
by :mod:`lieflow.kernels`.  Both must produce bitwise-comparable results
at double precision for the same inputs (same algorithm, same operation
order up to BLAS reductions).
"""

from __future__ import annotations

import numpy as np

# Padé order-13 numerator coefficients for the matrix exponential
# (scaling-and-squaring; the classic double-precision kernel).
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
)
_THETA13 = 5.371920351148152  # scaling threshold for the order-13 kernel


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring with a Padé order-13 kernel.

    Accepts a square real or complex matrix; returns the same dtype kind.
    Relative accuracy is near machine precision for modest norms
    (``||m|| <= 10`` comfortably).
    """
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expm expects a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("expm expects finite entries")
    dtype = np.complex128 if np.iscomplexobj(a) else np.float64
    a = a.astype(dtype, copy=True)
    n = a.shape[0]
    ident = np.eye(n, dtype=dtype)

    norm = np.linalg.norm(a, 1) if n else 0.0
    s = 0
    if norm > _THETA13:
        s = int(np.ceil(np.log2(norm / _THETA13)))
        a /= 2.0 ** s

    b = _PADE13
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
    r = np.linalg.solve(v - u, v + u)
    for _ in range(s):
        r = r @ r
    return r


def rk4_group_stack(a_half: np.ndarray, dt: float) -> np.ndarray:
    """Integrate ``g' = A(t) g`` from the identity by classical RK4.

    Parameters
    ----------
    a_half:
        Array of shape ``(2*steps + 1, n, n)`` holding ``A`` sampled on the
        half-step grid ``t_j = j*dt/2`` (so index ``2i`` is a full grid
        node and ``2i+1`` the midpoint used by the middle RK4 stages).
    dt:
        Full step size.

    Returns
    -------
    Array of shape ``(steps + 1, n, n)`` with the trajectory, ``out[0]`` the
    identity.  Raises no error on overflow; callers check finiteness.
    """
    a_half = np.asarray(a_half)
    steps = (a_half.shape[0] - 1) // 2
    n = a_half.shape[1]
    out = np.empty((steps + 1, n, n), dtype=a_half.dtype)
    g = np.eye(n, dtype=a_half.dtype)
    out[0] = g
    h = dt
    for i in range(steps):
        a0 = a_half[2 * i]
        am = a_half[2 * i + 1]
        a1 = a_half[2 * i + 2]
        k1 = a0 @ g
        k2 = am @ (g + (0.5 * h) * k1)
        k3 = am @ (g + (0.5 * h) * k2)
        k4 = a1 @ (g + h * k3)
        g = g + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        out[i + 1] = g
    return out
