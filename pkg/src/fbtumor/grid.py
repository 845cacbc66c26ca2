"""Uniform radial grid functions and cumulative quadrature."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .errors import DomainError

MIN_POINTS = 64


@dataclass(frozen=True)
class RadialGridFunction:
    """Samples of a radial function on a uniform grid over ``[0, r_max]``.

    Interpolation is piecewise cubic and C1.  When ``slopes`` are given
    the interpolant is cubic Hermite; otherwise a not-a-knot cubic
    spline.  Both reproduce the samples exactly at the nodes.
    """

    r_max: float
    values: np.ndarray
    slopes: np.ndarray | None = None
    _interp: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < MIN_POINTS:
            raise DomainError(f"need a 1-D sample array with at least {MIN_POINTS} points")
        if not (self.r_max > 0.0):
            raise DomainError("r_max must be positive")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        r = self.r
        if self.slopes is not None:
            sl = np.array(self.slopes, dtype=float)
            if sl.shape != vals.shape:
                raise DomainError("slopes must match values in shape")
            sl.setflags(write=False)
            object.__setattr__(self, "slopes", sl)
            interp = CubicHermiteSpline(r, vals, sl)
        else:
            interp = CubicSpline(r, vals)
        object.__setattr__(self, "_interp", interp)

    @property
    def n_points(self) -> int:
        return self.values.size

    @property
    def h(self) -> float:
        return self.r_max / (self.n_points - 1)

    @property
    def r(self) -> np.ndarray:
        return np.linspace(0.0, self.r_max, self.n_points)

    def __call__(self, r):
        return self._interp(r)

    def derivative(self, r, order: int = 1):
        return self._interp(r, order)

    def to_csv(self, path_or_buf=None, header=("r", "value")) -> str | None:
        """Two-column CSV; returns the text when no target is given."""
        buf = io.StringIO()
        buf.write(",".join(header) + "\n")
        for ri, vi in zip(self.r, self.values):
            buf.write(f"{ri!r},{float(vi)!r}\n")
        text = buf.getvalue()
        if path_or_buf is None:
            return text
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w", newline="\n") as fh:
                fh.write(text)
        return None

    def to_dict(self) -> dict:
        d = {"r_max": float(self.r_max), "values": self.values.tolist()}
        if self.slopes is not None:
            d["slopes"] = self.slopes.tolist()
        return d


def cumulative_simpson(y, h: float) -> np.ndarray:
    """Cumulative integral from the first node, fourth-order accurate.

    Even nodes use composite Simpson; each odd node adds a single
    interval from the preceding even node with the three-point rule
    ``h/12 (5 f0 + 8 f1 - f2)``.  With an odd interval count the last
    node is reached from the one before using the mirrored rule.
    """
    f = np.asarray(y, dtype=float)
    n = f.shape[-1] - 1
    if n < 2:
        raise DomainError("need at least two intervals")
    out = np.zeros_like(f)
    ne = n if n % 2 == 0 else n - 1  # last even node
    pair = h / 3.0 * (f[..., 0:ne - 1:2] + 4.0 * f[..., 1:ne:2] + f[..., 2:ne + 1:2])
    out[..., 2:ne + 1:2] = np.cumsum(pair, axis=-1)
    half = h / 12.0 * (5.0 * f[..., 0:ne - 1:2] + 8.0 * f[..., 1:ne:2] - f[..., 2:ne + 1:2])
    out[..., 1:ne:2] = out[..., 0:ne - 1:2] + half
    if n % 2 == 1:
        out[..., n] = out[..., n - 1] + h / 12.0 * (5.0 * f[..., n] + 8.0 * f[..., n - 1] - f[..., n - 2])
    return out


def hermite_eval(values, slopes, h: float, x):
    """Cubic Hermite interpolation on the uniform grid ``0, h, 2h, ...``.

    For batched data (leading axes on ``values``/``slopes``) ``x`` must
    have the same number of dimensions, indexing along the last axis.
    Points outside the grid use the end cell's cubic.
    """
    v = np.asarray(values, dtype=float)
    d = np.asarray(slopes, dtype=float)
    n = v.shape[-1] - 1
    s = np.asarray(x, dtype=float) / h
    i = np.clip(np.floor(s).astype(np.intp), 0, n - 1)
    t = s - i
    if v.ndim == 1:
        v0, v1, d0, d1 = v[i], v[i + 1], d[i], d[i + 1]
    else:
        v0 = np.take_along_axis(v, i, -1)
        v1 = np.take_along_axis(v, i + 1, -1)
        d0 = np.take_along_axis(d, i, -1)
        d1 = np.take_along_axis(d, i + 1, -1)
    t2 = t * t
    t3 = t2 * t
    return ((2 * t3 - 3 * t2 + 1) * v0 + h * (t3 - 2 * t2 + t) * d0
            + (3 * t2 - 2 * t3) * v1 + h * (t3 - t2) * d1)
