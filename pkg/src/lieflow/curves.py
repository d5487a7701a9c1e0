"""Time-dependent coefficient curves t -> R^r.

A :class:`CoefficientCurve` bundles the right-hand-side coefficients of a
group equation: calling it at time ``t`` returns the length-``r`` vector of
coefficients multiplying each algebra basis element.  Curves are built from
constants, Python callables, sampled data (linear interpolation, no
extrapolation), or compact CLI tokens such as ``"cos:0.5:2"``.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateInputError, DimensionError, SetupError

__all__ = ["CoefficientCurve", "parse_component_token"]


class CoefficientCurve:
    """A vector-valued function of time with a declared dimension.

    Use the constructors :meth:`constant`, :meth:`from_function`,
    :meth:`from_samples`, or :meth:`from_tokens`.
    """

    def __init__(self, dim: int, fn: Callable[[float], np.ndarray],
                 *, domain: tuple[float, float] | None = None,
                 description: str = "curve"):
        if dim < 1:
            raise DimensionError("coefficient curve needs dim >= 1")
        self.dim = int(dim)
        self._fn = fn
        self.domain = domain
        self.description = description

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, values) -> "CoefficientCurve":
        vals = np.atleast_1d(np.asarray(values, dtype=float)).copy()
        if vals.ndim != 1:
            raise DimensionError("constant curve needs a flat vector")
        vals.setflags(write=False)
        return cls(vals.size, lambda t: vals,
                   description=f"constant{tuple(vals)}")

    @classmethod
    def from_function(cls, dim: int, fn: Callable[[float], Sequence[float]],
                      *, domain: tuple[float, float] | None = None,
                      description: str = "function") -> "CoefficientCurve":
        def wrapped(t: float) -> np.ndarray:
            out = np.asarray(fn(t), dtype=float)
            out = np.atleast_1d(out)
            if out.shape != (dim,):
                raise DimensionError(
                    f"curve function returned shape {out.shape}, "
                    f"expected ({dim},)")
            return out
        return cls(dim, wrapped, domain=domain, description=description)

    @classmethod
    def from_samples(cls, ts, values) -> "CoefficientCurve":
        """Piecewise-linear interpolation of sampled values.

        ``ts`` must be strictly increasing; evaluation outside
        ``[ts[0], ts[-1]]`` raises :class:`DegenerateInputError` rather
        than extrapolating.
        """
        ts = np.asarray(ts, dtype=float)
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if ts.ndim != 1 or ts.size < 2:
            raise DegenerateInputError("need at least two sample times")
        if values.shape[0] != ts.size:
            raise DimensionError("one sample row per time required")
        if np.any(np.diff(ts) <= 0):
            raise DegenerateInputError("sample times must strictly increase")
        dim = values.shape[1]
        t0, t1 = float(ts[0]), float(ts[-1])
        pad = 1e-12 * max(1.0, abs(t0), abs(t1))

        def interp(t: float) -> np.ndarray:
            if t < t0 - pad or t > t1 + pad:
                raise DegenerateInputError(
                    f"time {t} outside sampled range [{t0}, {t1}]")
            t = min(max(t, t0), t1)
            return np.array([np.interp(t, ts, values[:, k])
                             for k in range(dim)])

        return cls(dim, interp, domain=(t0, t1),
                   description=f"sampled[{ts.size} pts]")

    @classmethod
    def from_tokens(cls, tokens: Sequence[str]) -> "CoefficientCurve":
        """Build a curve from one token per component (see
        :func:`parse_component_token`)."""
        fns = [parse_component_token(tok) for tok in tokens]
        dim = len(fns)
        if dim == 0:
            raise DimensionError("need at least one component token")

        def evaluate(t: float) -> np.ndarray:
            return np.array([f(t) for f in fns])

        return cls(dim, evaluate,
                   description="tokens[" + ",".join(tokens) + "]")

    # -- evaluation --------------------------------------------------------

    def __call__(self, t: float) -> np.ndarray:
        out = self._fn(float(t))
        if not np.all(np.isfinite(out)):
            raise DegenerateInputError(
                f"coefficient curve produced non-finite values at t={t}")
        return out

    def sample(self, ts) -> np.ndarray:
        """Evaluate at many times; returns shape ``(len(ts), dim)``."""
        return np.array([self(t) for t in np.asarray(ts, dtype=float)])

    def __repr__(self) -> str:
        return f"<CoefficientCurve dim={self.dim} {self.description}>"


def parse_component_token(token: str) -> Callable[[float], float]:
    """Parse one scalar-component token into a function of time.

    Grammar::

        <number>                 constant
        const:<number>           constant (explicit form)
        cos[:a[:w[:c]]]          a*cos(w*t) + c     (defaults a=1, w=1, c=0)
        sin[:a[:w[:c]]]          a*sin(w*t) + c
        poly:c0[:c1[:...]]       c0 + c1*t + c2*t^2 + ...
    """
    tok = token.strip()
    if not tok:
        raise SetupError("empty coefficient token")
    parts = tok.split(":")
    head = parts[0].lower()

    if head == "const":
        if len(parts) != 2:
            raise SetupError(f"token {token!r}: expected const:<number>")
        try:
            value = float(parts[1])
        except ValueError as exc:
            raise SetupError(f"token {token!r}: non-numeric constant") \
                from exc
        return lambda t, v=value: v

    if head in ("cos", "sin"):
        if len(parts) > 4:
            raise SetupError(
                f"token {token!r}: expected {head}[:amp[:freq[:offset]]]")
        try:
            amp = float(parts[1]) if len(parts) > 1 else 1.0
            freq = float(parts[2]) if len(parts) > 2 else 1.0
            off = float(parts[3]) if len(parts) > 3 else 0.0
        except ValueError as exc:
            raise SetupError(f"token {token!r}: non-numeric parameter") \
                from exc
        base = np.cos if head == "cos" else np.sin
        return lambda t, a=amp, w=freq, c=off: a * float(base(w * t)) + c

    if head == "poly":
        if len(parts) < 2:
            raise SetupError(f"token {token!r}: poly needs coefficients")
        try:
            coeffs = [float(p) for p in parts[1:]]
        except ValueError as exc:
            raise SetupError(f"token {token!r}: non-numeric coefficient") \
                from exc
        poly = np.polynomial.Polynomial(coeffs)
        return lambda t, p=poly: float(p(t))

    try:
        value = float(tok)
    except ValueError as exc:
        raise SetupError(
            f"unrecognized coefficient token {token!r}; expected a number, "
            f"cos[:a[:w[:c]]], sin[:a[:w[:c]]], or poly:c0:c1:...") from exc
    return lambda t, v=value: v
