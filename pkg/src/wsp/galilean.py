"""Extended Galilean change of frame: absorb a spatially constant drift rate
into a moving-frame solution w(t,x) = u(t, x - E(t)) + g(t), with E the
displacement integral of g.

Shifts are interpolations on the fixed box, so the caller declares a margin
that |E| must stay within; evaluation never extrapolates, and fields carried
out of the box near the boundary are only trusted on the shrunken window
returned by valid_window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fields as F
from .errors import ParameterError, RangeError
from .fields import Grid, ScalarField, TimeSeriesField, VectorField


@dataclass(frozen=True)
class DriftCurve:
    """Sampled drift rate g(t) and its displacement E(t) = int_0^t g."""

    times: np.ndarray
    g: np.ndarray  # (frames, dim), velocity units
    E: np.ndarray  # (frames, dim), length units, E[0] = 0

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        gv = np.asarray(self.g, dtype=np.float64)
        Ev = np.asarray(self.E, dtype=np.float64)
        if t.ndim != 1 or len(t) < 1:
            raise ParameterError("drift needs a 1-d array of times")
        if np.any(np.diff(t) <= 0):
            raise ParameterError("drift times must be strictly increasing")
        if gv.shape != Ev.shape or gv.ndim != 2 or gv.shape[0] != len(t):
            raise ParameterError("drift samples must be (frames, dim) matching times")
        if not np.allclose(Ev[0], 0.0):
            raise ParameterError("displacement must start at zero")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "g", gv)
        object.__setattr__(self, "E", Ev)

    @property
    def dim(self) -> int:
        return self.g.shape[1]

    def max_displacement(self) -> float:
        return float(np.max(np.abs(self.E)))


def displacement(times, g_samples) -> DriftCurve:
    """Fill in E(t) as the cumulative trapezoid integral of g, E(0) = 0."""
    t = np.asarray(times, dtype=np.float64)
    gv = np.atleast_2d(np.asarray(g_samples, dtype=np.float64))
    if gv.shape[0] != len(t) and gv.shape[1] == len(t):
        gv = gv.T
    if np.any(np.diff(t) <= 0):
        raise ParameterError("drift times must be strictly increasing")
    E = np.zeros_like(gv)
    dt = np.diff(t)
    E[1:] = np.cumsum(0.5 * (gv[1:] + gv[:-1]) * dt[:, None], axis=0)
    return DriftCurve(t, gv, E)


def _check_margin(grid: Grid, drift: DriftCurve, margin: float):
    if margin < 0:
        raise ParameterError("margin must be nonnegative")
    if margin >= grid.extent:
        raise ParameterError("margin must be smaller than the box half-width")
    per_frame = np.max(np.abs(drift.E), axis=1)
    bad = np.nonzero(per_frame > margin + 1e-12)[0]
    if bad.size:
        listing = ", ".join(
            f"frame {k} (t={drift.times[k]:g}, |E|={per_frame[k]:.4g})" for k in bad[:8]
        )
        more = "" if bad.size <= 8 else f" and {bad.size - 8} more"
        raise RangeError(
            f"displacement exceeds the declared margin {margin:g}: {listing}{more}"
        )


def valid_window(grid: Grid, margin: float) -> tuple:
    """Index slices of the region unaffected by boundary clamping after any
    shift of size <= margin."""
    ring = int(np.ceil(margin / grid.spacing)) + 1
    return grid.interior(ring)


def _align(series: TimeSeriesField, drift: DriftCurve):
    if len(series) != len(drift.times) or not np.allclose(series.times, drift.times):
        raise ParameterError("drift samples must align with the series frames")
    if series.grid.dim != drift.dim:
        raise ParameterError("drift dimension does not match the grid")


def galilean_transform(
    u: TimeSeriesField,
    drift: DriftCurve,
    margin: float,
    order: int = 1,
    inverse: bool = False,
) -> TimeSeriesField:
    """w(t,x) = u(t, x - E(t)) + g(t); with inverse=True the round-trip map
    u(t,x) = w(t, x + E(t)) - g(t). Interpolation is multilinear by default,
    cubic with order=3."""
    _align(u, drift)
    _check_margin(u.grid, drift, margin)
    sign = -1.0 if inverse else 1.0
    frames = []
    for k in range(len(u)):
        uk = u.frames[k]
        shifted = F.shifted_field(uk, sign * drift.E[k], order=order)
        vals = shifted.array() + sign * drift.g[k].reshape(-1, *([1] * u.grid.dim))
        frames.append(VectorField.from_arrays(u.grid, vals, uk.time))
    return TimeSeriesField(tuple(frames))


def galilean_pressure(
    p: TimeSeriesField, drift: DriftCurve, margin: float, order: int = 1, inverse: bool = False
) -> TimeSeriesField:
    """q(t,x) = p(t, x - E(t)): the pressure rides along unchanged in value."""
    _align(p, drift)
    _check_margin(p.grid, drift, margin)
    sign = -1.0 if inverse else 1.0
    frames = tuple(
        F.shifted_field(p.frames[k], sign * drift.E[k], order=order) for k in range(len(p))
    )
    return TimeSeriesField(frames)
