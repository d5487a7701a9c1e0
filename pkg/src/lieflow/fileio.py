"""CSV readers and writers for trajectories, coordinates, point curves,
and wavefunctions.

All floats are printed with ``%.17g`` so every file round-trips float64
exactly and identical runs produce byte-identical outputs.  Structural
metadata travels in ``#``-prefixed ``key=value`` comment lines above the
header row.
"""

from __future__ import annotations

import csv
import math

import numpy as np

from .errors import SetupError

__all__ = [
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_coords_csv",
    "read_coords_csv",
    "write_point_curve_csv",
    "read_point_curve_csv",
    "write_wavefunction_csv",
    "read_wavefunction_csv",
    "write_samples_csv",
    "read_samples_csv",
]


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _open_maybe(path, mode: str):
    if hasattr(path, "write") or hasattr(path, "read"):
        return path, False
    return open(path, mode, encoding="utf-8", newline=""), True


def _write_rows(path, comments: list[str], header: list[str], rows) -> None:
    fh, owned = _open_maybe(path, "w")
    try:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if owned:
            fh.close()


def _read_rows(path) -> tuple[dict, list[str], list[list[str]]]:
    """Parse comments (as a key=value dict), the header, and data rows."""
    fh, owned = _open_maybe(path, "r")
    try:
        meta: dict[str, str] = {}
        header: list[str] | None = None
        rows: list[list[str]] = []
        for raw in csv.reader(fh):
            if not raw:
                continue
            if raw[0].lstrip().startswith("#"):
                text = ",".join(raw).lstrip()[1:].strip()
                for token in text.split():
                    if "=" in token:
                        key, _, value = token.partition("=")
                        meta[key] = value
                continue
            if header is None:
                header = [c.strip() for c in raw]
            else:
                rows.append([c.strip() for c in raw])
        if header is None:
            raise SetupError("CSV file has no header row")
        return meta, header, rows
    finally:
        if owned:
            fh.close()


# ---------------------------------------------------------------------------
# Generic sampled tables
# ---------------------------------------------------------------------------

def write_samples_csv(path, ts, columns, names,
                      comments: tuple[str, ...] = ()) -> None:
    """A plain time-indexed table: column ``t`` then one named real
    column per entry of ``names``."""
    ts = np.asarray(ts, dtype=float)
    cols = np.asarray(columns, dtype=float)
    if cols.ndim == 1:
        cols = cols[:, None]
    if cols.shape[0] != ts.size or cols.shape[1] != len(names):
        raise SetupError("samples table shape does not match names/grid")
    header = ["t"] + [str(s) for s in names]

    def rows():
        for t, row in zip(ts, cols):
            yield [_fmt(t)] + [_fmt(x) for x in row]

    _write_rows(path, list(comments), header, rows())


def read_samples_csv(path) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Read a samples table back as ``(names, ts, columns)``."""
    _, header, rows = _read_rows(path)
    if len(header) < 2 or header[0] != "t":
        raise SetupError("samples table needs a leading t column")
    ts = np.array([float(r[0]) for r in rows])
    cols = np.array([[float(x) for x in r[1:]] for r in rows])
    if rows and cols.shape[1] != len(header) - 1:
        raise SetupError("samples table rows do not match the header")
    return header[1:], ts, cols


# ---------------------------------------------------------------------------
# Group trajectories
# ---------------------------------------------------------------------------

def write_trajectory_csv(path, traj) -> None:
    """Columns ``t`` then the matrix entries row-major; complex entries
    become adjacent ``_re``/``_im`` column pairs."""
    n = traj.gs.shape[1]
    is_complex = bool(np.iscomplexobj(traj.gs))
    header = ["t"]
    for i in range(n):
        for j in range(n):
            if is_complex:
                header += [f"g{i}{j}_re", f"g{i}{j}_im"]
            else:
                header.append(f"g{i}{j}")
    scalars = "complex" if is_complex else "real"
    rep_name = getattr(traj.rep, "name", None) or "custom"
    comments = [f"size={n} scalars={scalars} rep={rep_name}"]

    def rows():
        for t, g in zip(traj.ts, traj.gs):
            row = [_fmt(t)]
            for value in g.reshape(-1):
                if is_complex:
                    row += [_fmt(value.real), _fmt(value.imag)]
                else:
                    row.append(_fmt(value))
            yield row

    _write_rows(path, comments, header, rows())


def read_trajectory_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a trajectory file back as ``(ts, gs)`` arrays."""
    meta, header, rows = _read_rows(path)
    try:
        n = int(meta["size"])
        scalars = meta.get("scalars", "real")
    except (KeyError, ValueError) as exc:
        raise SetupError(f"trajectory file lacks size metadata: {exc}") \
            from exc
    per = 2 if scalars == "complex" else 1
    want = 1 + per * n * n
    ts = np.empty(len(rows))
    dtype = np.complex128 if scalars == "complex" else np.float64
    gs = np.empty((len(rows), n, n), dtype=dtype)
    for k, row in enumerate(rows):
        if len(row) != want:
            raise SetupError(
                f"trajectory row {k} has {len(row)} fields, expected {want}")
        ts[k] = float(row[0])
        vals = np.array([float(x) for x in row[1:]])
        if scalars == "complex":
            gs[k] = (vals[0::2] + 1j * vals[1::2]).reshape(n, n)
        else:
            gs[k] = vals.reshape(n, n)
    return ts, gs


# ---------------------------------------------------------------------------
# Canonical coordinates
# ---------------------------------------------------------------------------

def write_coords_csv(path, coords) -> None:
    """Columns ``t, v0, v1, ...`` (basis-indexed) with the factor order in
    the comment line."""
    r = coords.vs.shape[1]
    order = ",".join(str(i) for i in coords.order)
    algebra_name = coords.algebra.name or "custom"
    comments = [f"order={order} dim={r} algebra={algebra_name}"]
    header = ["t"] + [f"v{i}" for i in range(r)]

    def rows():
        for t, v in zip(coords.ts, coords.vs):
            yield [_fmt(t)] + [_fmt(x) for x in v]

    _write_rows(path, comments, header, rows())


def read_coords_csv(path) -> tuple[tuple[int, ...], np.ndarray, np.ndarray]:
    """Read a coordinates file back as ``(order, ts, vs)``."""
    meta, header, rows = _read_rows(path)
    try:
        order = tuple(int(x) for x in meta["order"].split(","))
        r = int(meta.get("dim", len(order)))
    except (KeyError, ValueError) as exc:
        raise SetupError(f"coordinates file lacks order metadata: {exc}") \
            from exc
    ts = np.empty(len(rows))
    vs = np.empty((len(rows), r))
    for k, row in enumerate(rows):
        if len(row) != 1 + r:
            raise SetupError(
                f"coordinates row {k} has {len(row)} fields, "
                f"expected {1 + r}")
        ts[k] = float(row[0])
        vs[k] = [float(x) for x in row[1:]]
    return order, ts, vs


# ---------------------------------------------------------------------------
# Point curves
# ---------------------------------------------------------------------------

def write_point_curve_csv(path, curve) -> None:
    """Line curves write ``t, x``; plane curves ``t, x, p``; projective
    curves ``t, value, hom_p, hom_q`` where ``value`` is ``inf`` at the
    point at infinity and the homogeneous pair is always finite."""
    kind = curve.kind
    comments = [f"kind={kind}"]
    if kind == "line":
        header = ["t", "x"]

        def rows():
            for t, x in zip(curve.ts, curve.points):
                yield [_fmt(t), _fmt(x)]
    elif kind == "plane":
        header = ["t", "x", "p"]

        def rows():
            for t, xp in zip(curve.ts, curve.points):
                yield [_fmt(t), _fmt(xp[0]), _fmt(xp[1])]
    elif kind == "projective-line":
        header = ["t", "value", "hom_p", "hom_q"]

        def rows():
            for t, pt in zip(curve.ts, curve.points):
                value = "inf" if pt.is_infinite else _fmt(pt.value())
                yield [_fmt(t), value, _fmt(pt.p), _fmt(pt.q)]
    else:  # pragma: no cover - PointCurve constructor rejects these
        raise SetupError(f"unknown point-curve kind {kind!r}")
    _write_rows(path, comments, header, rows())


def read_point_curve_csv(path):
    """Read a point-curve file back as a :class:`PointCurve`."""
    from .homogeneous import PointCurve
    from .superposition import ProjectivePoint

    meta, header, rows = _read_rows(path)
    kind = meta.get("kind")
    if kind is None:
        # Fall back on the column count: 2 -> line, 3 -> plane.
        kind = {2: "line", 3: "plane", 4: "projective-line"}.get(len(header))
    if kind not in ("line", "plane", "projective-line"):
        raise SetupError("point-curve file lacks a recognizable kind")
    ts = np.array([float(row[0]) for row in rows])
    if kind == "line":
        pts = np.array([float(row[1]) for row in rows])
    elif kind == "plane":
        pts = np.array([[float(row[1]), float(row[2])] for row in rows])
    else:
        pts = []
        for row in rows:
            if len(row) >= 4:
                pts.append(ProjectivePoint(float(row[2]), float(row[3])))
            elif row[1] == "inf" or not math.isfinite(float(row[1])):
                pts.append(ProjectivePoint.infinity())
            else:
                pts.append(ProjectivePoint(float(row[1])))
    return PointCurve(ts, pts, kind)


# ---------------------------------------------------------------------------
# Wavefunctions
# ---------------------------------------------------------------------------

def write_wavefunction_csv(path, wavefunction) -> None:
    """Columns ``p, re, im`` with the grid parameters in the comment."""
    comments = [
        f"p_min={_fmt(wavefunction.p_min)} dp={_fmt(wavefunction.dp)} "
        f"n={wavefunction.n}"
        + ("" if wavefunction.mass is None
           else f" mass={_fmt(wavefunction.mass)}")]
    header = ["p", "re", "im"]

    def rows():
        for p, amp in zip(wavefunction.ps, wavefunction.amplitudes):
            yield [_fmt(p), _fmt(amp.real), _fmt(amp.imag)]

    _write_rows(path, comments, header, rows())


def read_wavefunction_csv(path, *, normalize: bool = False):
    """Read a wavefunction file back as a :class:`MomentumWavefunction`.

    The grid is rebuilt from the metadata when present, otherwise from
    the first column (which must then be uniform).
    """
    from .physics import MomentumWavefunction

    meta, header, rows = _read_rows(path)
    if not rows:
        raise SetupError("wavefunction file has no samples")
    amps = np.array([complex(float(r[1]), float(r[2])) for r in rows])
    if "p_min" in meta and "dp" in meta:
        p_min, dp = float(meta["p_min"]), float(meta["dp"])
    else:
        ps = np.array([float(r[0]) for r in rows])
        diffs = np.diff(ps)
        if ps.size < 2 or np.max(np.abs(diffs - diffs[0])) > 1e-9:
            raise SetupError("wavefunction grid is not uniform")
        p_min, dp = float(ps[0]), float(diffs[0])
    mass = float(meta["mass"]) if "mass" in meta else None
    return MomentumWavefunction(p_min, dp, amps, mass=mass,
                                normalize=normalize)
