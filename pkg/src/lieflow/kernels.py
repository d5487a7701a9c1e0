"""Kernel selection: compiled extension if available, NumPy fallback otherwise.

The compiled module `lieflow._kernels` (built from ``_kernels.pyx`` when
Cython and a C compiler are present) implements the same two functions as
:mod:`lieflow._kernels_py`:

* ``expm(m)`` — dense matrix exponential,
* ``rk4_group_stack(a_half, dt)`` — fixed-step RK4 for ``g' = A(t) g``
  over a precomputed half-grid stack of coefficient matrices.

Importing this module never fails because of a missing extension; the
package is fully functional in pure Python.  ``USING_COMPILED_KERNELS``
records which implementation was selected.
"""

from __future__ import annotations

from . import _kernels_py

try:  # pragma: no cover - depends on build environment
    from . import _kernels as _impl  # type: ignore[attr-defined]

    USING_COMPILED_KERNELS = True
except ImportError:  # pragma: no cover
    _impl = _kernels_py
    USING_COMPILED_KERNELS = False

expm = _impl.expm
rk4_group_stack = _impl.rk4_group_stack

# Always-available references for benchmarking / cross-checking.
expm_python = _kernels_py.expm
rk4_group_stack_python = _kernels_py.rk4_group_stack
