"""Leray projection of tensor divergences, momentum residuals, and the local
energy (suitability) pairing.

The projection is only defined on inputs presented as w = div H for a tensor H
in the slow-decay class: the gradient part of w is grad q with q the pressure
of the data -H, so that Lap q = div w discretely up to quadrature. Feeding the
divergence directly would leave the Poisson data implicit, so the API takes H.

The suitability pairing mu(test) moves every derivative of the local energy
balance onto the test function; smooth exact solutions give |mu| = O(h^2+dt^2)
and distributional solutions are suitable when mu >= -tol across a battery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fields as F
from . import kernels as KK
from . import pressure as PR
from .errors import ParameterError, StructuralError
from .fields import Grid, ScalarField, TensorField, TimeSeriesField, VectorField


@dataclass(frozen=True)
class HodgeParts:
    """Split of w = div H into solenoidal + gradient_part (= grad potential)."""

    input_divergence: VectorField
    solenoidal: VectorField
    gradient_part: VectorField
    potential: ScalarField

    def reconstruction_error(self) -> float:
        diff = self.input_divergence - (self.solenoidal + self.gradient_part)
        return float(np.max(diff.magnitude()))


def leray_project(
    H: TensorField, spec: KK.CutoffSpec = KK.CutoffSpec(), workers: int = None
) -> HodgeParts:
    """Project w = div H onto divergence-free fields: w - grad q, where q is
    the pressure of the data -H (then Lap q = div w, the Hodge potential)."""
    w = F.tensor_divergence(H)
    q = PR.assemble_from_tensor(-H, spec, corrected=True, workers=workers)
    grad_q = F.gradient(q)
    return HodgeParts(w, w - grad_q, grad_q, q)


# ---------------------------------------------------------------------------
# momentum residuals

def _check_series(*series, min_frames: int = 3):
    base = series[0]
    for s in series[1:]:
        if s is None:
            continue
        if len(s) != len(base) or not np.allclose(s.times, base.times):
            raise StructuralError("time series disagree on frame times")
        if s.grid != base.grid:
            raise StructuralError("time series disagree on grids")
    if len(base) < min_frames:
        raise StructuralError(f"need at least {min_frames} frames, got {len(base)}")


def ns_residual(
    u: TimeSeriesField,
    forcing: TimeSeriesField = None,
    p: TimeSeriesField = None,
) -> TimeSeriesField:
    """Discrete momentum residual d_t u - Lap u + div(u tensor u) + grad p - div F.

    Zero (to O(h^2 + dt^2)) on exact solutions; adding a spatially constant
    vector c(t) to grad p shifts the residual by exactly c(t).
    """
    _check_series(u, forcing, p)
    dtu = F.time_derivative(u)
    frames = []
    for k in range(len(u)):
        uk = u.frames[k]
        vals = dtu.frames[k].array().copy()
        for c in range(u.grid.dim):
            vals[c] -= F.laplacian(uk.component(c)).values
        vals += F.tensor_divergence(F.outer(uk)).array()
        if p is not None:
            vals += F.gradient(p.frames[k]).array()
        if forcing is not None:
            vals -= F.tensor_divergence(forcing.frames[k]).array()
        frames.append(VectorField.from_arrays(u.grid, vals, uk.time))
    return TimeSeriesField(tuple(frames))


def mns_residual(
    u: TimeSeriesField,
    forcing: TimeSeriesField = None,
    spec: KK.CutoffSpec = KK.CutoffSpec(),
    workers: int = None,
) -> TimeSeriesField:
    """Residual of the projected formulation d_t u - Lap u + P[div(u tensor u - F)].

    For divergence-free u this equals ns_residual with p taken from the
    pressure assembly, since P[div H] = div H - grad q with q the matching
    pressure.
    """
    _check_series(u, forcing)
    dtu = F.time_derivative(u)
    frames = []
    for k in range(len(u)):
        uk = u.frames[k]
        H = F.outer(uk)
        if forcing is not None:
            H = H - forcing.frames[k]
        parts = leray_project(H, spec, workers)
        vals = dtu.frames[k].array().copy()
        for c in range(u.grid.dim):
            vals[c] -= F.laplacian(uk.component(c)).values
        vals += parts.solenoidal.array()
        frames.append(VectorField.from_arrays(u.grid, vals, uk.time))
    return TimeSeriesField(tuple(frames))


# ---------------------------------------------------------------------------
# suitability: local energy pairing

@dataclass(frozen=True)
class SuitabilityReport:
    label: str
    mu_value: float
    components: dict          # named pairing terms; they sum to mu_value
    balance_residual: float   # mu_value - sum(components), zero by construction
    support_radius: float     # largest |x| where the test function is nonzero
    time_window: tuple        # (first, last) frame time with nonzero values
    tol: float                # suitability slack used for the verdict
    suitable: bool            # mu_value >= -tol


def _battery_profile(r: np.ndarray, radius: float) -> np.ndarray:
    return KK.cutoff_profile(r, KK.CutoffSpec(0.5 * radius, radius))


def _time_bump(t: np.ndarray, t0: float, t1: float, w: float) -> np.ndarray:
    up = KK.transition((t - t0) / w)
    down = KK.transition((t1 - t) / w)
    return up * down


def make_test_function(
    grid: Grid,
    times: np.ndarray,
    center,
    radius: float,
    t_window: tuple,
    ramp: float = None,
) -> TimeSeriesField:
    """Space-time test function: radial plateau profile around the center
    times a smooth bump in t, nonnegative, compactly supported."""
    times = np.asarray(times, dtype=np.float64)
    center = np.asarray(center, dtype=np.float64)
    t0, t1 = t_window
    if not t0 < t1:
        raise ParameterError(f"empty time window {t_window}")
    ramp = ramp if ramp is not None else 0.25 * (t1 - t0)
    r = np.sqrt(sum((c - center[k]) ** 2 for k, c in enumerate(grid.coords())))
    prof = _battery_profile(r, radius)
    frames = tuple(
        ScalarField(grid, prof * _time_bump(np.array(t), t0, t1, ramp)[()], float(t))
        for t in times
    )
    return TimeSeriesField(frames)


def build_battery(grid: Grid, times: np.ndarray, seed: int = 7, n_random: int = 20):
    """The reproducible suitability battery: 3 scales at the origin, 5 shifted
    centers, and n_random seeded random test functions. Returns (label, series)
    pairs."""
    times = np.asarray(times, dtype=np.float64)
    if len(times) < 3:
        raise ParameterError("battery needs at least 3 frames")
    t0, t1 = float(times[0]), float(times[-1])
    span = t1 - t0
    window = (t0 + 0.15 * span, t1 - 0.15 * span)
    L = grid.extent
    base = 0.35 * L
    out = []
    for k, s in enumerate((0.6, 1.0, 1.4)):
        out.append(
            (f"scale-{k}", make_test_function(grid, times, np.zeros(grid.dim), s * base, window))
        )
    offsets = [0.25 * L * v for v in _unit_offsets(grid.dim)]
    for k, c in enumerate(offsets[:5]):
        out.append((f"center-{k}", make_test_function(grid, times, c, base, window)))
    rng = np.random.default_rng(seed)
    for k in range(n_random):
        c = rng.uniform(-0.25 * L, 0.25 * L, size=grid.dim)
        rad = rng.uniform(0.2 * L, 0.45 * L)
        a = rng.uniform(t0 + 0.05 * span, t0 + 0.45 * span)
        b = rng.uniform(t1 - 0.45 * span, t1 - 0.05 * span)
        out.append((f"random-{k}", make_test_function(grid, times, c, rad, (a, b))))
    return out


def _unit_offsets(d: int):
    eye = np.eye(d)
    offs = [eye[k] for k in range(d)] + [-eye[k] for k in range(d)]
    offs.append(np.ones(d) / np.sqrt(d))
    return offs


def suitability_residual(
    u: TimeSeriesField,
    p: TimeSeriesField,
    forcing: TimeSeriesField = None,
    testfn: TimeSeriesField = None,
    label: str = "",
    tol: float = None,
    boundary_ring: int = 2,
) -> SuitabilityReport:
    """Local energy pairing mu(test) with all derivatives on the test function:

      mu = int dt int dx [ (|u|^2/2)(d_t test + Lap test) - |grad u|^2 test
                           + (|u|^2/2 + p) u . grad test + u . (div F) test ].

    Nonnegative test function, compactly supported inside the box, vanishing at
    the first and last frame. Smooth exact solutions give mu = O(h^2 + dt^2);
    a suitable weak solution satisfies mu >= -tol.
    """
    if testfn is None:
        raise ParameterError("testfn is required")
    _check_series(u, p, forcing, testfn)
    g = u.grid
    d = g.dim
    for f in testfn.frames:
        if np.any(f.values < 0):
            raise ParameterError("test function must be nonnegative")
    edge = _boundary_mask(g, boundary_ring)
    sup0 = max(
        float(np.max(np.abs(f.values[edge]))) for f in testfn.frames
    )
    peak = max(float(np.max(f.values)) for f in testfn.frames)
    if peak == 0.0:
        raise ParameterError("test function is identically zero")
    if sup0 > 1e-12 * peak:
        raise ParameterError("test function support touches the box boundary")
    for k in (0, len(testfn) - 1):
        if float(np.max(testfn.frames[k].values)) > 1e-12 * peak:
            raise ParameterError("test function must vanish at the first and last frame")

    dt_test = F.time_derivative(testfn)
    measure = g.spacing**d
    times = u.times
    names = ("energy-rate", "energy-diffusion", "dissipation", "flux", "forcing-power")
    integrands = {n: np.zeros(len(times)) for n in names}
    for k in range(len(times)):
        uk = u.frames[k]
        pk = p.frames[k]
        tk = testfn.frames[k]
        e = 0.5 * np.sum(uk.array() ** 2, axis=0)
        gradsq = np.zeros(g.shape)
        for i in range(d):
            gi = F.gradient(uk.component(i))
            gradsq += np.sum(gi.array() ** 2, axis=0)
        grad_t = F.gradient(tk)
        flux = sum(
            (e + pk.values) * uk.component(c).values * grad_t.component(c).values
            for c in range(d)
        )
        integrands["energy-rate"][k] = np.sum(e * dt_test.frames[k].values) * measure
        integrands["energy-diffusion"][k] = np.sum(e * F.laplacian(tk).values) * measure
        integrands["dissipation"][k] = -np.sum(gradsq * tk.values) * measure
        integrands["flux"][k] = np.sum(flux) * measure
        if forcing is not None:
            divF = F.tensor_divergence(forcing.frames[k])
            power = sum(
                uk.component(c).values * divF.component(c).values for c in range(d)
            )
            integrands["forcing-power"][k] = np.sum(power * tk.values) * measure

    components = {n: float(np.trapezoid(integrands[n], times)) for n in names}
    mu = float(sum(components.values()))
    if tol is None:
        scale = max(abs(v) for v in components.values())
        dt = float(np.min(np.diff(times)))
        tol = (g.spacing**2 + dt**2) * max(scale, 1.0)
    support_r = 0.0
    radii = g.radii()
    nz_times = [f.time for f in testfn.frames if np.max(f.values) > 1e-12 * peak]
    for f in testfn.frames:
        live = f.values > 1e-12 * peak
        if np.any(live):
            support_r = max(support_r, float(np.max(radii[live])))
    return SuitabilityReport(
        label=label,
        mu_value=mu,
        components=components,
        balance_residual=mu - sum(components.values()),
        support_radius=support_r,
        time_window=(float(nz_times[0]), float(nz_times[-1])) if nz_times else (np.nan, np.nan),
        tol=float(tol),
        suitable=mu >= -tol,
    )


def _boundary_mask(g: Grid, ring: int) -> np.ndarray:
    mask = np.ones(g.shape, dtype=bool)
    inner = tuple(slice(ring, n - ring) for n in g.shape)
    mask[inner] = False
    return mask
