# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels: drop-in replacements for
``lieflow._kernels_py`` (same functions, same algorithms).

The matrices here are small (group representations of dimension 2-6), so
hand-written loops beat vendor BLAS calls on dispatch overhead alone.
Both kernels are generated for float64 and complex128 via fused types.
"""

import numpy as np

from numpy.linalg import LinAlgError

from libc.math cimport ceil, log2, pow

ctypedef double complex cplx

ctypedef fused scalar:
    double
    cplx

cdef double _THETA13 = 5.371920351148152

cdef double _PADE13[14]
_PADE13[0] = 64764752532480000.0
_PADE13[1] = 32382376266240000.0
_PADE13[2] = 7771770303897600.0
_PADE13[3] = 1187353796428800.0
_PADE13[4] = 129060195264000.0
_PADE13[5] = 10559470521600.0
_PADE13[6] = 670442572800.0
_PADE13[7] = 33522128640.0
_PADE13[8] = 1323241920.0
_PADE13[9] = 40840800.0
_PADE13[10] = 960960.0
_PADE13[11] = 16380.0
_PADE13[12] = 182.0
_PADE13[13] = 1.0


cdef void _matmul(scalar[:, ::1] a, scalar[:, ::1] b, scalar[:, ::1] out,
                  Py_ssize_t n) noexcept:
    cdef Py_ssize_t i, j, k
    cdef scalar acc
    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = acc + a[i, k] * b[k, j]
            out[i, j] = acc


cdef int _solve_inplace(scalar[:, ::1] a, scalar[:, ::1] b,
                        Py_ssize_t n) except -1:
    """Solve ``a @ x = b`` by Gaussian elimination with partial pivoting,
    overwriting ``b`` with ``x`` (and destroying ``a``)."""
    cdef Py_ssize_t i, j, k, piv
    cdef double best, cand
    cdef scalar factor, tmp
    for k in range(n):
        piv = k
        best = abs(a[k, k])
        for i in range(k + 1, n):
            cand = abs(a[i, k])
            if cand > best:
                best = cand
                piv = i
        if best == 0.0:
            raise LinAlgError("singular matrix in expm denominator")
        if piv != k:
            for j in range(n):
                tmp = a[k, j]
                a[k, j] = a[piv, j]
                a[piv, j] = tmp
                tmp = b[k, j]
                b[k, j] = b[piv, j]
                b[piv, j] = tmp
        for i in range(k + 1, n):
            factor = a[i, k] / a[k, k]
            if factor != 0:
                for j in range(k, n):
                    a[i, j] = a[i, j] - factor * a[k, j]
                for j in range(n):
                    b[i, j] = b[i, j] - factor * b[k, j]
    for k in range(n - 1, -1, -1):
        for j in range(n):
            b[k, j] = b[k, j] / a[k, k]
        for i in range(k):
            factor = a[i, k]
            if factor != 0:
                for j in range(n):
                    b[i, j] = b[i, j] - factor * b[k, j]
    return 0


def _expm_impl(scalar[:, ::1] a):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, s, sq
    cdef double norm, colsum, scale
    if scalar is double:
        dtype = np.float64
    else:
        dtype = np.complex128

    # 1-norm (max column absolute sum) drives the scaling power.
    norm = 0.0
    for j in range(n):
        colsum = 0.0
        for i in range(n):
            colsum += abs(a[i, j])
        if colsum > norm:
            norm = colsum
    s = 0
    if norm > _THETA13:
        s = <Py_ssize_t>ceil(log2(norm / _THETA13))

    buf_arr = np.empty((n, n), dtype=dtype)
    cdef scalar[:, ::1] buf = buf_arr
    scale = pow(2.0, <double>s)
    for i in range(n):
        for j in range(n):
            buf[i, j] = a[i, j] / scale

    a2_arr = np.empty((n, n), dtype=dtype)
    a4_arr = np.empty((n, n), dtype=dtype)
    a6_arr = np.empty((n, n), dtype=dtype)
    t1_arr = np.empty((n, n), dtype=dtype)
    t2_arr = np.empty((n, n), dtype=dtype)
    u_arr = np.empty((n, n), dtype=dtype)
    v_arr = np.empty((n, n), dtype=dtype)
    cdef scalar[:, ::1] a2 = a2_arr
    cdef scalar[:, ::1] a4 = a4_arr
    cdef scalar[:, ::1] a6 = a6_arr
    cdef scalar[:, ::1] t1 = t1_arr
    cdef scalar[:, ::1] t2 = t2_arr
    cdef scalar[:, ::1] u = u_arr
    cdef scalar[:, ::1] v = v_arr

    _matmul(buf, buf, a2, n)
    _matmul(a2, a2, a4, n)
    _matmul(a2, a4, a6, n)

    # u = a @ (a6 @ (b13 a6 + b11 a4 + b9 a2) + b7 a6 + b5 a4 + b3 a2 + b1)
    for i in range(n):
        for j in range(n):
            t1[i, j] = (_PADE13[13] * a6[i, j] + _PADE13[11] * a4[i, j]
                        + _PADE13[9] * a2[i, j])
    _matmul(a6, t1, t2, n)
    for i in range(n):
        for j in range(n):
            t2[i, j] = (t2[i, j] + _PADE13[7] * a6[i, j]
                        + _PADE13[5] * a4[i, j] + _PADE13[3] * a2[i, j])
        t2[i, i] = t2[i, i] + _PADE13[1]
    _matmul(buf, t2, u, n)

    # v = a6 @ (b12 a6 + b10 a4 + b8 a2) + b6 a6 + b4 a4 + b2 a2 + b0
    for i in range(n):
        for j in range(n):
            t1[i, j] = (_PADE13[12] * a6[i, j] + _PADE13[10] * a4[i, j]
                        + _PADE13[8] * a2[i, j])
    _matmul(a6, t1, v, n)
    for i in range(n):
        for j in range(n):
            v[i, j] = (v[i, j] + _PADE13[6] * a6[i, j]
                       + _PADE13[4] * a4[i, j] + _PADE13[2] * a2[i, j])
        v[i, i] = v[i, i] + _PADE13[0]

    # r = solve(v - u, v + u); t1 <- v - u, t2 <- v + u
    for i in range(n):
        for j in range(n):
            t1[i, j] = v[i, j] - u[i, j]
            t2[i, j] = v[i, j] + u[i, j]
    _solve_inplace(t1, t2, n)

    result_arr = t2_arr
    other_arr = t1_arr
    cdef scalar[:, ::1] res = t2
    cdef scalar[:, ::1] oth = t1
    cdef scalar[:, ::1] swap_view
    for sq in range(s):
        _matmul(res, res, oth, n)
        swap_view = res
        res = oth
        oth = swap_view
        result_arr, other_arr = other_arr, result_arr
    return result_arr


def expm(m):
    """Matrix exponential by scaling-and-squaring with a Padé order-13
    kernel (float64 or complex128)."""
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expm expects a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("expm expects finite entries")
    if a.shape[0] == 0:
        return np.eye(0, dtype=np.complex128 if np.iscomplexobj(a)
                      else np.float64)
    if np.iscomplexobj(a):
        return _expm_impl(np.ascontiguousarray(a, dtype=np.complex128))
    return _expm_impl(np.ascontiguousarray(a, dtype=np.float64))


def _rk4_impl(scalar[:, :, ::1] a_half, double dt):
    cdef Py_ssize_t steps = (a_half.shape[0] - 1) // 2
    cdef Py_ssize_t n = a_half.shape[1]
    cdef Py_ssize_t step, i, j
    cdef double h = dt
    if scalar is double:
        dtype = np.float64
    else:
        dtype = np.complex128

    out_arr = np.empty((steps + 1, n, n), dtype=dtype)
    g_arr = np.eye(n, dtype=dtype)
    k1_arr = np.empty((n, n), dtype=dtype)
    k2_arr = np.empty((n, n), dtype=dtype)
    k3_arr = np.empty((n, n), dtype=dtype)
    k4_arr = np.empty((n, n), dtype=dtype)
    st_arr = np.empty((n, n), dtype=dtype)
    cdef scalar[:, :, ::1] out = out_arr
    cdef scalar[:, ::1] g = g_arr
    cdef scalar[:, ::1] k1 = k1_arr
    cdef scalar[:, ::1] k2 = k2_arr
    cdef scalar[:, ::1] k3 = k3_arr
    cdef scalar[:, ::1] k4 = k4_arr
    cdef scalar[:, ::1] stage = st_arr
    cdef scalar[:, ::1] a0
    cdef scalar[:, ::1] am
    cdef scalar[:, ::1] a1

    for i in range(n):
        for j in range(n):
            out[0, i, j] = g[i, j]

    for step in range(steps):
        a0 = a_half[2 * step]
        am = a_half[2 * step + 1]
        a1 = a_half[2 * step + 2]
        _matmul(a0, g, k1, n)
        for i in range(n):
            for j in range(n):
                stage[i, j] = g[i, j] + (0.5 * h) * k1[i, j]
        _matmul(am, stage, k2, n)
        for i in range(n):
            for j in range(n):
                stage[i, j] = g[i, j] + (0.5 * h) * k2[i, j]
        _matmul(am, stage, k3, n)
        for i in range(n):
            for j in range(n):
                stage[i, j] = g[i, j] + h * k3[i, j]
        _matmul(a1, stage, k4, n)
        for i in range(n):
            for j in range(n):
                g[i, j] = g[i, j] + (h / 6.0) * (
                    k1[i, j] + 2.0 * (k2[i, j] + k3[i, j]) + k4[i, j])
                out[step + 1, i, j] = g[i, j]
    return out_arr


def rk4_group_stack(a_half, dt):
    """Integrate ``g' = A(t) g`` from the identity by classical RK4 over
    a half-grid stack of coefficient matrices (see the pure-Python
    reference for the layout contract)."""
    a = np.asarray(a_half)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError("rk4_group_stack expects a (2*steps+1, n, n) stack")
    if np.iscomplexobj(a):
        return _rk4_impl(np.ascontiguousarray(a, dtype=np.complex128),
                         float(dt))
    return _rk4_impl(np.ascontiguousarray(a, dtype=np.float64), float(dt))
