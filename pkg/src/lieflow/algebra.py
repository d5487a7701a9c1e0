"""Lie algebra structure data, adjoint maps, and matrix representations.

A :class:`LieAlgebra` is a dense rank-3 tensor of structure constants
``f[a][b][c]`` meaning ``[e_a, e_b] = sum_c f[a][b][c] e_c`` over a basis
``e_0 .. e_{r-1}`` (all indices 0-based).  A :class:`MatrixRep` assigns an
``n x n`` matrix to each basis element and is checked to satisfy the same
bracket table.

Conventions
-----------
* ``ad_matrix(b)`` is the r x r matrix of ``x -> [e_b, x]`` in the basis:
  entry ``(c, a)`` is ``f[b][a][c]``.
* ``adjoint(g)`` (conjugation by a group element) is expressed in the same
  basis by least squares over the vectorized representation matrices.
* All tolerances for structural checks are absolute 1e-10: the shipped
  tables contain small exact decimals, so any violation is a data bug,
  not roundoff.
"""

from __future__ import annotations

import json
from typing import Sequence

import numpy as np

from . import kernels
from .errors import (
    DimensionError,
    RepresentationError,
    SetupError,
    StructureError,
)

STRUCTURE_TOL = 1e-10
AD_DECOMPOSE_TOL = 1e-8

__all__ = [
    "LieAlgebra",
    "MatrixRep",
    "expm",
    "builtin_algebra",
    "builtin_representation",
    "default_representation_name",
    "load_algebra_json",
    "load_representation_json",
    "BUILTIN_ALGEBRAS",
    "BUILTIN_REPRESENTATIONS",
]


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential (scaling-and-squaring, Padé kernel)."""
    return kernels.expm(m)


class LieAlgebra:
    """A finite-dimensional real Lie algebra given by structure constants.

    Parameters
    ----------
    structure:
        Array of shape ``(r, r, r)``; ``structure[a, b, c]`` is the
        ``e_c``-coefficient of ``[e_a, e_b]``.
    labels:
        Optional list of ``r`` short strings naming the basis elements.
    solvable_hint:
        Optional flag recording that the algebra is known to be solvable
        (enables the quadrature fast path without re-deriving it).
    validate:
        Check antisymmetry and the Jacobi identity on construction.
    """

    def __init__(self, structure, labels: Sequence[str] | None = None,
                 *, name: str | None = None,
                 solvable_hint: bool | None = None, validate: bool = True):
        f = np.asarray(structure, dtype=float)
        if f.ndim != 3 or len(set(f.shape)) != 1:
            raise DimensionError(
                "structure constants must form an (r, r, r) tensor")
        self._f = f
        self._f.setflags(write=False)
        self.dim = f.shape[0]
        if labels is None:
            labels = [f"a{idx}" for idx in range(self.dim)]
        if len(labels) != self.dim:
            raise DimensionError("need one label per basis element")
        self.labels = tuple(str(s) for s in labels)
        self.name = name
        self.solvable_hint = solvable_hint
        self._ad = None
        self._ad_powers: list | None = None
        if validate:
            self.validate()

    @property
    def structure(self) -> np.ndarray:
        return self._f

    def validate(self) -> None:
        """Check antisymmetry and the Jacobi identity (absolute 1e-10)."""
        f = self._f
        anti = np.max(np.abs(f + np.swapaxes(f, 0, 1))) if self.dim else 0.0
        if anti > STRUCTURE_TOL:
            raise StructureError(
                f"structure constants are not antisymmetric "
                f"(violation {anti:.3e})")
        # jac[a,b,c,n] = sum_m f[a,b,m] f[m,c,n] + cyclic in (a,b,c)
        fabm_fmcn = np.einsum("abm,mcn->abcn", f, f)
        jac = (fabm_fmcn
               + np.einsum("bcm,man->abcn", f, f)
               + np.einsum("cam,mbn->abcn", f, f))
        worst = np.max(np.abs(jac)) if self.dim else 0.0
        if worst > STRUCTURE_TOL:
            raise StructureError(
                f"structure constants violate the Jacobi identity "
                f"(violation {worst:.3e})")

    def bracket(self, x, y) -> np.ndarray:
        """Bracket of two coefficient vectors: ``z_c = x_a y_b f[a,b,c]``."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != (self.dim,) or y.shape != (self.dim,):
            raise DimensionError(
                f"coefficient vectors must have length {self.dim}")
        return np.einsum("a,b,abc->c", x, y, self._f)

    def ad_matrix(self, beta: int) -> np.ndarray:
        """Matrix of ``ad(e_beta): x -> [e_beta, x]``; entry (c, a) is
        ``f[beta, a, c]``."""
        if not 0 <= beta < self.dim:
            raise DimensionError(f"basis index {beta} out of range")
        return self._ad_table()[beta]

    def _ad_table(self) -> np.ndarray:
        if self._ad is None:
            ad = np.transpose(self._f, (0, 2, 1)).copy()  # ad[b][c][a]
            ad.setflags(write=False)
            self._ad = ad
        return self._ad

    def ad_exp(self, beta: int, s: float) -> np.ndarray:
        """``exp(s * ad(e_beta))``.

        When ``ad(e_beta)`` is nilpotent (detected once and cached) the
        exponential is the exact finite power series; otherwise it falls
        back to the general matrix exponential.
        """
        powers = self._nilpotent_ad_powers(beta)
        if powers is None:
            return kernels.expm(s * self.ad_matrix(beta))
        out = powers[0].copy()
        term = 1.0
        for j in range(1, len(powers)):
            term *= s / j
            out += term * powers[j]
        return out

    def _nilpotent_ad_powers(self, beta: int):
        if self._ad_powers is None:
            self._ad_powers = [self._powers_if_nilpotent(b)
                               for b in range(self.dim)]
        return self._ad_powers[int(beta)]

    def _powers_if_nilpotent(self, beta: int):
        ad = self.ad_matrix(beta)
        powers = [np.eye(self.dim)]
        cur = ad
        for _ in range(self.dim):
            if np.max(np.abs(cur)) <= STRUCTURE_TOL:
                return powers
            powers.append(cur)
            cur = cur @ ad
        return None

    def is_subalgebra(self, indices: Sequence[int]) -> bool:
        """Whether the span of the given basis elements closes under the
        bracket (brackets have no components outside the index set)."""
        idx = sorted(set(int(i) for i in indices))
        if any(not 0 <= i < self.dim for i in idx):
            raise DimensionError("subalgebra index out of range")
        outside = [i for i in range(self.dim) if i not in idx]
        if not outside:
            return True
        sub = self._f[np.ix_(idx, idx, outside)]
        return bool(np.max(np.abs(sub)) <= STRUCTURE_TOL) if sub.size else True

    def __repr__(self) -> str:
        tag = self.name or "LieAlgebra"
        return f"<{tag} dim={self.dim}>"


class MatrixRep:
    """A matrix representation of a :class:`LieAlgebra`.

    ``mats[a]`` is the ``n x n`` matrix assigned to basis element ``e_a``.
    On construction the commutator table is checked against the algebra's
    structure constants.
    """

    def __init__(self, algebra: LieAlgebra, mats,
                 *, name: str | None = None, validate: bool = True):
        self.algebra = algebra
        arr = np.asarray(mats)
        if arr.ndim != 3 or arr.shape[0] != algebra.dim \
                or arr.shape[1] != arr.shape[2]:
            raise DimensionError(
                "representation needs one square matrix per basis element")
        self.is_complex = bool(np.iscomplexobj(arr))
        dtype = np.complex128 if self.is_complex else np.float64
        self._mats = arr.astype(dtype)
        self._mats.setflags(write=False)
        self.size = arr.shape[1]
        self.name = name
        # Pseudo-inverse of the (n^2, r) matrix of vectorized basis mats,
        # shared by decompose() and adjoint().
        self._basis_flat = self._mats.reshape(algebra.dim, -1).T
        if validate:
            self.validate()

    @property
    def mats(self) -> np.ndarray:
        return self._mats

    def validate(self) -> None:
        """Check ``[M_a, M_b] = sum_c f[a,b,c] M_c`` for all pairs."""
        m = self._mats
        f = self.algebra.structure
        norms = np.array([np.linalg.norm(x) for x in m])
        comm = np.einsum("aij,bjk->abik", m, m)
        comm = comm - np.transpose(comm, (1, 0, 2, 3))
        target = np.einsum("abc,cik->abik", f, m)
        err = np.abs(comm - target).max(axis=(2, 3))
        scale = 1.0 + np.outer(norms, norms)
        worst = np.max(err / scale) if m.size else 0.0
        if worst > STRUCTURE_TOL:
            raise RepresentationError(
                f"matrices do not represent the bracket table "
                f"(violation {worst:.3e})")

    def matrix_of(self, coeffs) -> np.ndarray:
        """The matrix ``sum_a coeffs[a] * M_a``."""
        c = np.asarray(coeffs)
        if c.shape != (self.algebra.dim,):
            raise DimensionError(
                f"coefficient vector must have length {self.algebra.dim}")
        return np.tensordot(c, self._mats, axes=(0, 0))

    def decompose(self, m: np.ndarray, *, tol: float = AD_DECOMPOSE_TOL):
        """Express an algebra-valued matrix in the basis by least squares.

        Returns the real coefficient vector ``c`` with
        ``m ~= sum_a c[a] M_a``; raises :class:`RepresentationError` if the
        residual exceeds ``tol`` relative to ``max(1, ||m||)``.
        """
        m = np.asarray(m)
        if m.shape != (self.size, self.size):
            raise DimensionError("matrix shape does not match representation")
        rhs = m.reshape(-1)
        coeffs, *_ = np.linalg.lstsq(self._basis_flat, rhs, rcond=None)
        resid = np.linalg.norm(self._basis_flat @ coeffs - rhs)
        if resid > tol * max(1.0, np.linalg.norm(rhs)):
            raise RepresentationError(
                f"matrix does not lie in the algebra's span "
                f"(residual {resid:.3e})")
        if self.is_complex:
            if np.max(np.abs(coeffs.imag)) > tol:
                raise RepresentationError(
                    "matrix decomposes with non-real coefficients")
            coeffs = coeffs.real
        return coeffs

    def adjoint(self, g: np.ndarray, *, tol: float = AD_DECOMPOSE_TOL
                ) -> np.ndarray:
        """Conjugation by ``g`` expressed in the basis: the r x r matrix
        ``A`` with ``g M_a g^{-1} = sum_c A[c, a] M_c``."""
        g = np.asarray(g)
        if g.shape != (self.size, self.size):
            raise DimensionError("group element shape mismatch")
        try:
            ginv = np.linalg.inv(g)
        except np.linalg.LinAlgError as exc:
            raise SetupError("group element is singular") from exc
        cols = [self.decompose(g @ m @ ginv, tol=tol) for m in self._mats]
        return np.column_stack(cols)

    def exp(self, coeffs) -> np.ndarray:
        """Group element ``exp(sum_a coeffs[a] M_a)``."""
        return expm(self.matrix_of(coeffs))

    def __repr__(self) -> str:
        tag = self.name or "MatrixRep"
        kind = "complex" if self.is_complex else "real"
        return f"<{tag} {self.size}x{self.size} {kind}>"


# ---------------------------------------------------------------------------
# Builtin algebras and representations
# ---------------------------------------------------------------------------

def _structure_from_table(dim: int, table) -> np.ndarray:
    """Build the dense tensor from ``{(a, b): [(c, coeff), ...]}`` entries
    for ``a < b``; antisymmetric completion is applied."""
    f = np.zeros((dim, dim, dim))
    for (a, b), terms in table.items():
        for c, coeff in terms:
            f[a, b, c] += coeff
            f[b, a, c] -= coeff
    return f


def _gl_structure(n: int) -> np.ndarray:
    """gl(n) in the elementary-matrix basis ``E_{ij}`` at index ``i*n + j``:
    ``[E_ij, E_kl] = delta_jk E_il - delta_il E_kj``."""
    r = n * n
    f = np.zeros((r, r, r))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    a, b = i * n + j, k * n + l
                    if j == k:
                        f[a, b, i * n + l] += 1.0
                    if i == l:
                        f[a, b, k * n + j] -= 1.0
    return f


def _gl_labels(n: int):
    return [f"E{i}{j}" for i in range(n) for j in range(n)]


def _e(n: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((n, n))
    m[i, j] = 1.0
    return m


_PAULI = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)


def _builtin_algebra_specs():
    specs = {}

    # Traceless 2x2 real matrices: [e0,e1] = -e0, [e0,e2] = -2 e1,
    # [e1,e2] = -e2 (the basis used by the fractional-linear action).
    specs["sl2"] = dict(
        structure=_structure_from_table(3, {
            (0, 1): [(0, -1.0)],
            (0, 2): [(1, -2.0)],
            (1, 2): [(2, -1.0)],
        }),
        labels=["e0", "e1", "e2"],
        solvable_hint=False,
    )

    # Affine transformations of the line: [e0, e1] = -e0
    # (e0 generates translations, e1 dilations).
    specs["affine"] = dict(
        structure=_structure_from_table(2, {(0, 1): [(0, -1.0)]}),
        labels=["trans", "dil"],
        solvable_hint=True,
    )

    # Rotations: [e0,e1] = e2 cyclically.
    specs["so3"] = dict(
        structure=_structure_from_table(3, {
            (0, 1): [(2, 1.0)],
            (1, 2): [(0, 1.0)],
            (2, 0): [(1, 1.0)],
        }),
        labels=["x", "y", "z"],
        solvable_hint=False,
    )

    # Nilpotent 3-dimensional algebra of the phase-plane translations and
    # shears: [e0, e1] = -e2, center e2.
    specs["heisenberg"] = dict(
        structure=_structure_from_table(3, {(0, 1): [(2, -1.0)]}),
        labels=["shear", "p-trans", "x-trans"],
        solvable_hint=True,
    )

    # One-dimensional central extension used by the quantum linear
    # potential: [e0, e1] = e2, [e1, e2] = e3, center e3.
    specs["heisenberg-extended"] = dict(
        structure=_structure_from_table(4, {
            (0, 1): [(2, 1.0)],
            (1, 2): [(3, 1.0)],
        }),
        labels=["kinetic", "position", "momentum", "central"],
        solvable_hint=True,
    )

    for n in (2, 3):
        specs[f"gl{n}"] = dict(
            structure=_gl_structure(n),
            labels=_gl_labels(n),
            solvable_hint=False,
        )
    return specs


_ALGEBRA_SPECS = _builtin_algebra_specs()
BUILTIN_ALGEBRAS = tuple(sorted(_ALGEBRA_SPECS))


def builtin_algebra(tag: str) -> LieAlgebra:
    """Construct a builtin algebra by tag (see ``BUILTIN_ALGEBRAS``)."""
    try:
        spec = _ALGEBRA_SPECS[tag]
    except KeyError:
        raise SetupError(
            f"unknown builtin algebra {tag!r}; available: "
            f"{', '.join(BUILTIN_ALGEBRAS)}") from None
    return LieAlgebra(spec["structure"], spec["labels"], name=tag,
                      solvable_hint=spec["solvable_hint"])


def _builtin_rep_specs():
    specs = {}

    specs["sl2-defining"] = dict(
        algebra="sl2",
        mats=[
            np.array([[0.0, 1.0], [0.0, 0.0]]),
            np.array([[0.5, 0.0], [0.0, -0.5]]),
            np.array([[0.0, 0.0], [-1.0, 0.0]]),
        ],
    )

    # exp(-u0*e0): x -> x - u0 ; exp(-u1*e1): x -> exp(-u1) x, realized on
    # column vectors (x, 1).
    specs["affine-defining"] = dict(
        algebra="affine",
        mats=[_e(2, 0, 1), _e(2, 0, 0)],
    )

    specs["so3-defining"] = dict(
        algebra="so3",
        mats=[
            np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]),
            np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]),
            np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
        ],
    )

    specs["su2-spinor"] = dict(
        algebra="so3",
        mats=[-0.5j * s for s in _PAULI],
    )

    # Unit upper-triangular 3x3 matrices acting on (x, p, 1); chosen so the
    # associated vector fields are (p d/dx), (d/dp), (d/dx) with the
    # standard minus convention.
    specs["heisenberg-3x3"] = dict(
        algebra="heisenberg",
        mats=[-_e(3, 0, 1), -_e(3, 1, 2), -_e(3, 0, 2)],
    )

    # Faithful nilpotent 4x4 companion: e1 must appear in two slots so that
    # both brackets [e0,e1]=e2 and [e1,e2]=e3 are realized.
    specs["heisenberg-extended-4x4"] = dict(
        algebra="heisenberg-extended",
        mats=[
            _e(4, 0, 1),
            _e(4, 1, 2) + _e(4, 2, 3),
            _e(4, 0, 2),
            -_e(4, 0, 3),
        ],
    )

    for n in (2, 3):
        specs[f"gl{n}-defining"] = dict(
            algebra=f"gl{n}",
            mats=[_e(n, i, j) for i in range(n) for j in range(n)],
        )
    return specs


_REP_SPECS = _builtin_rep_specs()
BUILTIN_REPRESENTATIONS = tuple(sorted(_REP_SPECS))

_DEFAULT_REP = {
    "sl2": "sl2-defining",
    "affine": "affine-defining",
    "so3": "so3-defining",
    "heisenberg": "heisenberg-3x3",
    "heisenberg-extended": "heisenberg-extended-4x4",
    "gl2": "gl2-defining",
    "gl3": "gl3-defining",
}


def default_representation_name(algebra_tag: str) -> str:
    """The defining/default representation tag for a builtin algebra."""
    try:
        return _DEFAULT_REP[algebra_tag]
    except KeyError:
        raise SetupError(
            f"no default representation for algebra {algebra_tag!r}"
        ) from None


def builtin_representation(tag: str, algebra: LieAlgebra | None = None
                           ) -> MatrixRep:
    """Construct a builtin representation by tag.

    If ``algebra`` is omitted, the matching builtin algebra is built too.
    """
    try:
        spec = _REP_SPECS[tag]
    except KeyError:
        raise SetupError(
            f"unknown builtin representation {tag!r}; available: "
            f"{', '.join(BUILTIN_REPRESENTATIONS)}") from None
    if algebra is None:
        algebra = builtin_algebra(spec["algebra"])
    mats = np.asarray(spec["mats"])
    return MatrixRep(algebra, mats, name=tag)


# ---------------------------------------------------------------------------
# JSON definition files
# ---------------------------------------------------------------------------

def load_algebra_json(source) -> LieAlgebra:
    """Load an algebra definition from a JSON file path, file object, or
    already-parsed dict.

    Format::

        { "dim": r,
          "brackets": [ {"i": a, "j": b, "coeffs": [[c, value], ...]}, ... ],
          "labels": [...] }           # labels optional

    Omitted pairs have zero bracket; each listed pair is completed
    antisymmetrically, so only one orientation of (i, j) should appear.
    """
    data = _load_json(source)
    try:
        dim = int(data["dim"])
        entries = data.get("brackets", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise SetupError(f"malformed algebra definition: {exc}") from exc
    f = np.zeros((dim, dim, dim))
    for entry in entries:
        try:
            a, b = int(entry["i"]), int(entry["j"])
            coeffs = entry["coeffs"]
        except (KeyError, TypeError, ValueError) as exc:
            raise SetupError(f"malformed bracket entry: {entry!r}") from exc
        if not (0 <= a < dim and 0 <= b < dim):
            raise SetupError(f"bracket indices out of range: {entry!r}")
        if a == b:
            raise SetupError(f"bracket of an element with itself: {entry!r}")
        for c, value in coeffs:
            c = int(c)
            if not 0 <= c < dim:
                raise SetupError(f"bracket target out of range: {entry!r}")
            f[a, b, c] += float(value)
            f[b, a, c] -= float(value)
    labels = data.get("labels")
    return LieAlgebra(f, labels, name=data.get("name"))


def load_representation_json(source, algebra: LieAlgebra) -> MatrixRep:
    """Load a representation from JSON: ``{"size": n, "scalars": "real" |
    "complex", "mats": [row-major n*n arrays, one per basis element]}``.

    Complex entries are written as two-element ``[re, im]`` pairs.
    """
    data = _load_json(source)
    try:
        n = int(data["size"])
        scalars = data.get("scalars", "real")
        raw = data["mats"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SetupError(f"malformed representation definition: {exc}") from exc
    if scalars not in ("real", "complex"):
        raise SetupError(f"unknown scalar field {scalars!r}")
    if len(raw) != algebra.dim:
        raise SetupError(
            f"expected {algebra.dim} matrices, got {len(raw)}")
    mats = []
    for flat in raw:
        if len(flat) != n * n:
            raise SetupError(
                f"each matrix needs {n * n} row-major entries")
        if scalars == "complex":
            vals = [complex(x[0], x[1]) if isinstance(x, (list, tuple))
                    else complex(x) for x in flat]
            mats.append(np.array(vals, dtype=complex).reshape(n, n))
        else:
            mats.append(np.array([float(x) for x in flat]).reshape(n, n))
    return MatrixRep(algebra, np.asarray(mats), name=data.get("name"))


def _load_json(source):
    if isinstance(source, dict):
        return source
    if hasattr(source, "read"):
        return json.load(source)
    with open(source, "r", encoding="utf-8") as fh:
        return json.load(fh)
