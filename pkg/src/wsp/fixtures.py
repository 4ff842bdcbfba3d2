"""Manufactured fields for tests, demos, and the verification suites.

The centerpiece is an exact decaying solution of incompressible Navier-Stokes
in d=2 with no forcing: the zero-circulation Gaussian swirl

    u(t, x) = A(t) exp(-r^2 / (4T)) (-x2, x1),   T = t + t0,  A = A0 (t0/T)^2.

Its azimuthal profile u_theta = A r exp(-r^2/4T) solves the swirl heat
equation (A' = -2A/T), the advection term is a pure radial gradient, and the
momentum balance closes with

    p(t, x) = -A(t)^2 T exp(-r^2 / (2T)),   grad p = A^2 exp(-r^2/(2T)) x.

Everything decays like a Gaussian, so box truncation is negligible and the
fixture sits firmly in the fast-decay class.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .fields import Grid, ScalarField, TensorField, TimeSeriesField, VectorField


def _coords(grid: Grid):
    return [np.broadcast_to(c, grid.shape) for c in grid.coords()]


def gaussian_scalar(grid: Grid, center=None, width: float = 1.0, amplitude: float = 1.0, time=None) -> ScalarField:
    if center is None:
        center = (0.0,) * grid.dim
    c = _coords(grid)
    r2 = sum((c[k] - center[k]) ** 2 for k in range(grid.dim))
    return ScalarField(grid, amplitude * np.exp(-r2 / width**2), time)


def bump_scalar(grid: Grid, center=None, radius: float = 1.0, amplitude: float = 1.0, time=None) -> ScalarField:
    """Compactly supported mollifier bump, identically zero outside |x-c| = radius."""
    if center is None:
        center = (0.0,) * grid.dim
    c = _coords(grid)
    s2 = sum((c[k] - center[k]) ** 2 for k in range(grid.dim)) / radius**2
    vals = np.zeros(grid.shape)
    inside = s2 < 1.0
    with np.errstate(divide="ignore", over="ignore"):
        vals[inside] = amplitude * np.exp(1.0 - 1.0 / (1.0 - s2[inside]))
    return ScalarField(grid, vals, time)


def gaussian_tensor(grid: Grid, seed: int = 0, amplitude: float = 1.0, time=None) -> TensorField:
    """Random symmetric tensor of off-center Gaussians (seeded, decaying)."""
    rng = np.random.default_rng(seed)
    d = grid.dim
    arrays = [[None] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            center = rng.uniform(-0.5, 0.5, d)
            width = rng.uniform(0.8, 1.6)
            amp = amplitude * rng.uniform(0.4, 1.0) * rng.choice([-1.0, 1.0])
            f = gaussian_scalar(grid, center, width, amp, time)
            arrays[i][j] = f.values
            arrays[j][i] = f.values
    return TensorField.from_arrays(grid, arrays, time, symmetric=True)


# exact swirl solution ---------------------------------------------------------

def swirl_amplitude(t: float, a0: float = 1.0, t0: float = 1.0) -> float:
    return a0 * (t0 / (t + t0)) ** 2


def swirl_velocity(
    grid: Grid, t: float = 0.0, a0: float = 1.0, t0: float = 1.0, center=(0.0, 0.0)
) -> VectorField:
    if grid.dim != 2:
        raise ParameterError("the exact swirl solution is two-dimensional")
    if t0 <= 0 or t < 0:
        raise ParameterError("need t0 > 0 and t >= 0")
    x, y = _coords(grid)
    x = x - center[0]
    y = y - center[1]
    T = t + t0
    prof = swirl_amplitude(t, a0, t0) * np.exp(-(x**2 + y**2) / (4.0 * T))
    return VectorField.from_arrays(grid, [-prof * y, prof * x], time=t)


def swirl_pressure(
    grid: Grid, t: float = 0.0, a0: float = 1.0, t0: float = 1.0, center=(0.0, 0.0)
) -> ScalarField:
    x, y = _coords(grid)
    x = x - center[0]
    y = y - center[1]
    T = t + t0
    a = swirl_amplitude(t, a0, t0)
    return ScalarField(grid, -(a**2) * T * np.exp(-(x**2 + y**2) / (2.0 * T)), time=t)


def swirl_pressure_gradient(
    grid: Grid, t: float = 0.0, a0: float = 1.0, t0: float = 1.0, center=(0.0, 0.0)
) -> VectorField:
    x, y = _coords(grid)
    x = x - center[0]
    y = y - center[1]
    T = t + t0
    a = swirl_amplitude(t, a0, t0)
    prof = a**2 * np.exp(-(x**2 + y**2) / (2.0 * T))
    return VectorField.from_arrays(grid, [prof * x, prof * y], time=t)


def swirl_series(grid: Grid, times, a0: float = 1.0, t0: float = 1.0):
    """(velocity series, pressure series) of the exact swirl solution."""
    u = TimeSeriesField(tuple(swirl_velocity(grid, t, a0, t0) for t in times))
    p = TimeSeriesField(tuple(swirl_pressure(grid, t, a0, t0) for t in times))
    return u, p


# solenoidal / gradient fixtures ----------------------------------------------

def solenoidal_gaussian(grid: Grid, width: float = 1.5, amplitude: float = 1.0, time=None) -> VectorField:
    """Divergence-free field from a Gaussian stream function (z-curl in 3D)."""
    c = _coords(grid)
    r2 = sum(ck**2 for ck in c)
    psi = amplitude * np.exp(-r2 / width**2)
    dpsi = [-2.0 * c[k] / width**2 * psi for k in range(grid.dim)]
    if grid.dim == 2:
        return VectorField.from_arrays(grid, [dpsi[1], -dpsi[0]], time)
    return VectorField.from_arrays(grid, [dpsi[1], -dpsi[0], np.zeros(grid.shape)], time)


def gradient_gaussian(grid: Grid, width: float = 1.5, amplitude: float = 1.0, time=None):
    """(potential, gradient field) of an analytic Gaussian potential."""
    c = _coords(grid)
    r2 = sum(ck**2 for ck in c)
    q = amplitude * np.exp(-r2 / width**2)
    grad = [-2.0 * c[k] / width**2 * q for k in range(grid.dim)]
    return ScalarField(grid, q, time), VectorField.from_arrays(grid, grad, time)


def random_smooth_scalar(grid: Grid, seed: int = 0, width: float = 2.5, modes: int = 3, time=None) -> ScalarField:
    """Seeded band-limited noise under a Gaussian envelope (smooth, decaying)."""
    rng = np.random.default_rng(seed)
    c = _coords(grid)
    r2 = sum(ck**2 for ck in c)
    vals = np.zeros(grid.shape)
    for _ in range(modes):
        k = rng.uniform(-1.5, 1.5, grid.dim)
        phase = rng.uniform(0, 2 * np.pi)
        arg = sum(k[m] * c[m] for m in range(grid.dim)) + phase
        vals += rng.uniform(0.3, 1.0) * np.cos(arg)
    vals *= np.exp(-r2 / width**2)
    return ScalarField(grid, vals, time)


def morrey_family(grid: Grid, p: float, gamma: float, seed: int = 7):
    """Ten decaying scalar fields exercising the local-norm inequalities."""
    r = grid.radii()
    border = (1.0 + r) ** ((gamma - grid.dim) / p)
    fields = [
        gaussian_scalar(grid, width=1.0),
        gaussian_scalar(grid, width=3.0),
        gaussian_scalar(grid, center=(1.5,) + (0.5,) * (grid.dim - 1), width=2.0),
        bump_scalar(grid, radius=2.5),
        ScalarField(grid, border),
        ScalarField(grid, border * (1.0 + 0.3 * np.cos(r))),
        ScalarField(grid, (1.0 + r) ** ((gamma - grid.dim) / p - 0.4)),
        ScalarField(grid, r**2 * np.exp(-r)),
        random_smooth_scalar(grid, seed=seed),
        random_smooth_scalar(grid, seed=seed + 1, width=4.0),
    ]
    return fields
