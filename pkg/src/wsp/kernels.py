"""Closed-form kernels: the free-space Poisson fundamental solution and its
derivatives, the smooth radial cutoff, heat kernels, and the heat-smoothed
third-derivative kernel with its quadrature.

Sign conventions (d = 2, 3):
    G_2(x) = -ln|x| / (2 pi),   G_3(x) = 1 / (4 pi |x|),   -Lap G_d = delta_0.
    d_i d_j G_3 = (3 x_i x_j - delta_ij |x|^2) / (4 pi |x|^5)
    d_i d_j G_2 = (2 x_i x_j - delta_ij |x|^2) / (2 pi |x|^4)
The distributional Hessian carries an extra -(delta_ij / d) delta_0 on top of
the principal value; convolution code applies that share analytically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import fldio
from .errors import ParameterError, SingularityError
from .fields import Grid, ScalarField

KERNEL_HESSIAN = 1
KERNEL_FAR = 2
KERNEL_HEAT_THIRD = 3


@dataclass(frozen=True)
class CutoffSpec:
    """Radial cutoff: identically 1 inside r0, identically 0 outside r1."""

    r0: float = 1.0
    r1: float = 2.0

    def __post_init__(self):
        if not (0 < self.r0 < self.r1) or not np.isfinite(self.r1):
            raise ParameterError(f"cutoff radii must satisfy 0 < r0 < r1, got ({self.r0}, {self.r1})")


def _points(x):
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
        squeeze = True
    else:
        squeeze = False
    d = arr.shape[-1]
    if d not in (2, 3):
        raise ParameterError(f"points must have 2 or 3 coordinates, got {d}")
    return arr, d, squeeze


def _maybe_scalar(values, squeeze):
    return float(values[0]) if squeeze else values


def transition(s):
    """C^inf step: 0 for s <= 0, 1 for s >= 1, exp(-1/s) glue in between."""
    s = np.asarray(s, dtype=np.float64)
    out = np.zeros_like(s)
    out[s >= 1.0] = 1.0
    mid = (s > 0.0) & (s < 1.0)
    sm = s[mid]
    with np.errstate(divide="ignore", over="ignore"):
        b = np.exp(-1.0 / sm)
        c = np.exp(-1.0 / (1.0 - sm))
    out[mid] = b / (b + c)
    return out


def cutoff_profile(r, spec: CutoffSpec = CutoffSpec()):
    """phi as a function of radius: 1 on [0, r0], 0 on [r1, inf)."""
    r = np.asarray(r, dtype=np.float64)
    return transition((spec.r1 - r) / (spec.r1 - spec.r0))


def cutoff(x, spec: CutoffSpec = CutoffSpec()):
    pts, _, squeeze = _points(x)
    vals = cutoff_profile(np.sqrt(np.sum(pts**2, axis=-1)), spec)
    return _maybe_scalar(vals, squeeze)


def _radii2(pts):
    r2 = np.sum(pts**2, axis=-1)
    if np.any(r2 == 0.0):
        raise SingularityError("kernel evaluated at the origin")
    return r2


def green_function(x):
    """Fundamental solution of -Lap on R^d."""
    pts, d, squeeze = _points(x)
    r2 = _radii2(pts)
    if d == 2:
        vals = -np.log(r2) / (4.0 * np.pi)
    else:
        vals = 1.0 / (4.0 * np.pi * np.sqrt(r2))
    return _maybe_scalar(vals, squeeze)


def grad_green(x, i: int):
    pts, d, squeeze = _points(x)
    _check_index(d, i)
    r2 = _radii2(pts)
    if d == 2:
        vals = -pts[..., i] / (2.0 * np.pi * r2)
    else:
        vals = -pts[..., i] / (4.0 * np.pi * r2**1.5)
    return _maybe_scalar(vals, squeeze)


def hessian_green(x, i: int, j: int):
    """Pointwise (principal-value) Hessian of G_d away from the origin."""
    pts, d, squeeze = _points(x)
    _check_index(d, i, j)
    r2 = _radii2(pts)
    xi, xj = pts[..., i], pts[..., j]
    delta = 1.0 if i == j else 0.0
    if d == 2:
        vals = (2.0 * xi * xj - delta * r2) / (2.0 * np.pi * r2**2)
    else:
        vals = (3.0 * xi * xj - delta * r2) / (4.0 * np.pi * r2**2.5)
    return _maybe_scalar(vals, squeeze)


def third_green(x, k: int, i: int, j: int):
    """Third derivative d_k d_i d_j G_d, valid away from the origin."""
    pts, d, squeeze = _points(x)
    _check_index(d, k, i, j)
    r2 = _radii2(pts)
    xk, xi, xj = pts[..., k], pts[..., i], pts[..., j]
    sym = (
        (1.0 if i == k else 0.0) * xj
        + (1.0 if j == k else 0.0) * xi
        + (1.0 if i == j else 0.0) * xk
    )
    if d == 2:
        vals = sym / (np.pi * r2**2) - 4.0 * xi * xj * xk / (np.pi * r2**3)
    else:
        vals = 3.0 * sym / (4.0 * np.pi * r2**2.5) - 15.0 * xi * xj * xk / (4.0 * np.pi * r2**3.5)
    return _maybe_scalar(vals, squeeze)


def _check_index(d, *idx):
    for k in idx:
        if not 0 <= int(k) < d:
            raise ParameterError(f"component index {k} out of range for dim {d}")


def far_kernel(x, i: int, j: int, spec: CutoffSpec = CutoffSpec()):
    """(1 - phi) d_i d_j G_d: smooth everywhere, identically 0 inside r0."""
    pts, d, squeeze = _points(x)
    _check_index(d, i, j)
    r = np.sqrt(np.sum(pts**2, axis=-1))
    vals = np.zeros(r.shape)
    mask = r > spec.r0
    if np.any(mask):
        sub = pts[mask]
        vals[mask] = (1.0 - cutoff_profile(r[mask], spec)) * hessian_green(sub, i, j)
    return _maybe_scalar(vals, squeeze)


def heat_kernel(x, t: float):
    """Gauss-Weierstrass kernel W_t."""
    if not t > 0:
        raise ParameterError(f"heat kernel needs t > 0, got {t}")
    pts, d, squeeze = _points(x)
    r2 = np.sum(pts**2, axis=-1)
    vals = (4.0 * np.pi * t) ** (-d / 2.0) * np.exp(-r2 / (4.0 * t))
    return _maybe_scalar(vals, squeeze)


# ---------------------------------------------------------------------------
# heat-smoothed third derivative of G_d
#
# exp(tau Lap) d_k d_i d_j G_d (x) = int_tau^inf d_k d_i d_j W_s (x) ds, and
# d_k d_i d_j W_s = [4 a^2 (d_ik x_j + d_jk x_i + d_ij x_k) - 8 a^3 x_i x_j x_k] W_s
# with a = 1/(4s). Everything reduces to two radial profiles P, Q:
#   K3_kij(x) = (d_ik x_j + d_jk x_i + d_ij x_k) P(|x|) - x_i x_j x_k Q(|x|)
# and substituting v = |x|^2/(4s) turns the s-integral into
#   P = pi^(-d/2) r^-(d+2) int_0^{r^2/4tau} v^{d/2}   e^-v dv
#   Q = 2 pi^(-d/2) r^-(d+4) int_0^{r^2/4tau} v^{d/2+1} e^-v dv.
# Gauss-Legendre on (0, 1] is applied after scaling v by an effective upper
# limit capped where e^-v has died (the cap keeps the nodes on the mass of the
# integrand when tau << r^2; without it the mapped rule underflows to zero).
# Node doubling checks the tolerance.

_V_CAP = 48.0


def heat_third_radial_factors(r, tau: float, d: int, nodes: int = 64):
    """Radial profiles (P, Q) of the heat-smoothed third-derivative kernel."""
    if not tau > 0:
        raise ParameterError(f"tau must be > 0, got {tau}")
    if d not in (2, 3):
        raise ParameterError(f"dim must be 2 or 3, got {d}")
    r = np.atleast_1d(np.asarray(r, dtype=np.float64))
    sig, wts = np.polynomial.legendre.leggauss(nodes)
    sig = 0.5 * (sig + 1.0)
    wts = 0.5 * wts
    vmax = r**2 / (4.0 * tau)
    veff = np.minimum(vmax, _V_CAP)[..., None]
    v = veff * sig
    ev = np.exp(-v)
    ip = np.sum(veff * wts * v ** (d / 2.0) * ev, axis=-1)
    iq = np.sum(veff * wts * v ** (d / 2.0 + 1.0) * ev, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        P = np.pi ** (-d / 2.0) * r ** (-(d + 2.0)) * ip
        Q = 2.0 * np.pi ** (-d / 2.0) * r ** (-(d + 4.0)) * iq
    center = r == 0.0
    if np.any(center):
        # direct s-integral at the origin (the v-substitution degenerates)
        P[center] = (4.0 * np.pi) ** (-d / 2.0) / 4.0 * tau ** (-(d / 2.0 + 1.0)) / (d / 2.0 + 1.0)
        Q[center] = (4.0 * np.pi) ** (-d / 2.0) / 8.0 * tau ** (-(d / 2.0 + 2.0)) / (d / 2.0 + 2.0)
    return P, Q


def heat_smoothed_third_kernel(
    x, tau: float, k: int, i: int, j: int, rel_tol: float = 1e-8, max_nodes: int = 512
):
    """exp(tau Lap) d_k d_i d_j G_d at the given points.

    Satisfies the parabolic scaling value(lam x, lam^2 tau) =
    lam^-(d+1) value(x, tau) and tends to third_green as tau -> 0.
    """
    pts, d, squeeze = _points(x)
    _check_index(d, k, i, j)
    r = np.sqrt(np.sum(pts**2, axis=-1))

    def evaluate(nodes):
        P, Q = heat_third_radial_factors(r, tau, d, nodes)
        return _combine_third(pts, k, i, j, P, Q)

    nodes = 64
    vals = evaluate(nodes)
    while nodes < max_nodes:
        finer = evaluate(2 * nodes)
        scale = np.max(np.abs(finer)) + 1e-300
        if np.max(np.abs(finer - vals)) <= rel_tol * scale:
            vals = finer
            break
        vals, nodes = finer, 2 * nodes
    return _maybe_scalar(vals, squeeze)


def _combine_third(pts, k, i, j, P, Q):
    xk, xi, xj = pts[..., k], pts[..., i], pts[..., j]
    sym = (
        (1.0 if i == k else 0.0) * xj
        + (1.0 if j == k else 0.0) * xi
        + (1.0 if i == j else 0.0) * xk
    )
    return sym * P - xi * xj * xk * Q


# ---------------------------------------------------------------------------
# kernel tables on grid offsets

@dataclass(frozen=True)
class KernelTable:
    """Kernel samples on the nodes of a grid, cacheable as an FLD1 record."""

    values: ScalarField
    kernel_id: int
    index: tuple
    singular_center: bool = False

    def save(self, path):
        fldio.write_kernel_table(path, self.values, self.kernel_id, self.index)

    @classmethod
    def load(cls, path, arity: int = 2) -> "KernelTable":
        values, kernel_id, index = fldio.read_kernel_table(path, arity)
        singular = kernel_id == KERNEL_HESSIAN
        return cls(values, kernel_id, index, singular)


def hessian_table(grid: Grid, i: int, j: int) -> KernelTable:
    """p.v. Hessian sampled at grid nodes, 0 at the center node."""
    pts = _node_points(grid)
    r2 = np.sum(pts**2, axis=-1)
    vals = np.zeros(grid.shape)
    mask = r2 > 0
    vals[mask.reshape(grid.shape)] = hessian_green(pts[mask], i, j)
    return KernelTable(ScalarField(grid, vals), KERNEL_HESSIAN, (i, j), True)


def far_table(grid: Grid, i: int, j: int, spec: CutoffSpec = CutoffSpec()) -> KernelTable:
    vals = far_kernel(_node_points(grid), i, j, spec).reshape(grid.shape)
    return KernelTable(ScalarField(grid, vals), KERNEL_FAR, (i, j), False)


def _node_points(grid: Grid) -> np.ndarray:
    axes = [grid.axis(k) for k in range(grid.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


# ---------------------------------------------------------------------------
# sphere averages and decay sweeps (used by invariant checks)

def sphere_points(d: int, radius: float, n_polar: int = 8, n_azimuth: int = 32):
    """Deterministic quadrature nodes and weights on the sphere |x| = radius."""
    if d == 2:
        theta = 2.0 * np.pi * np.arange(n_azimuth) / n_azimuth
        pts = radius * np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        wts = np.full(n_azimuth, 1.0 / n_azimuth)
        return pts, wts
    mu, wmu = np.polynomial.legendre.leggauss(n_polar)
    phi = 2.0 * np.pi * np.arange(n_azimuth) / n_azimuth
    mu_g, phi_g = np.meshgrid(mu, phi, indexing="ij")
    sin_t = np.sqrt(1.0 - mu_g**2)
    pts = radius * np.stack(
        [sin_t * np.cos(phi_g), sin_t * np.sin(phi_g), mu_g], axis=-1
    ).reshape(-1, 3)
    wts = np.repeat(wmu / 2.0, n_azimuth) / n_azimuth
    return pts, wts


def spherical_average(fn, d: int, radius: float) -> float:
    pts, wts = sphere_points(d, radius)
    return float(np.sum(fn(pts) * wts))


def kernel_decay_constant(order: int, d: int) -> float:
    """sup over the unit sphere of the largest |derivative of G_d| component.

    order 2 gives the Hessian constant (decay |x|^-d), order 3 the third
    derivative constant (decay |x|^-(d+1)).
    """
    pts, _ = sphere_points(d, 1.0, n_polar=16, n_azimuth=64)
    worst = 0.0
    if order == 2:
        for i in range(d):
            for j in range(d):
                worst = max(worst, float(np.max(np.abs(hessian_green(pts, i, j)))))
    elif order == 3:
        for k in range(d):
            for i in range(d):
                for j in range(d):
                    worst = max(worst, float(np.max(np.abs(third_green(pts, k, i, j)))))
    else:
        raise ParameterError(f"order must be 2 or 3, got {order}")
    return worst


# ---------------------------------------------------------------------------
# weighted convolution bounds
#
# I(R) = int (1+|x|)^-a (1+|x-y|)^-b dx at |y| = R, reduced to low-dimensional
# quadrature by radial symmetry; the sweeps check I(R) (1+R)^s stays bounded.


def _inner_antiderivative(s, b: int):
    # antiderivative of s (1+s)^-b
    u = 1.0 + s
    return u ** (2 - b) / (2 - b) - u ** (1 - b) / (1 - b)


def weighted_convolution_bound(R: float, d: int, a: float, b: int) -> float:
    """Quadrature of I(R) = int (1+|x|)^-a (1+|x-y|)^-b dx, |y| = R > 0."""
    if d not in (2, 3):
        raise ParameterError(f"dim must be 2 or 3, got {d}")
    if R <= 0:
        raise ParameterError(f"R must be > 0, got {R}")
    if b <= 2:
        raise ParameterError(f"inner exponent must exceed 2, got {b}")

    if d == 3:

        def outer(r):
            lo, hi = abs(r - R), r + R
            inner = _inner_antiderivative(hi, b) - _inner_antiderivative(lo, b)
            return r * (1.0 + r) ** (-a) * inner

        val = 0.0
        for seg in ((0.0, R), (R, 4.0 * R + 50.0), (4.0 * R + 50.0, np.inf)):
            val += integrate.quad(outer, *seg, limit=200)[0]
        return 2.0 * np.pi * val / R

    theta, wts = np.polynomial.legendre.leggauss(192)
    theta = np.pi * (theta + 1.0) / 2.0
    wts = wts * np.pi / 2.0

    def outer2(r):
        s = np.sqrt(np.maximum(r * r + R * R - 2.0 * r * R * np.cos(theta), 0.0))
        inner = 2.0 * np.sum(wts * (1.0 + s) ** (-b))
        return r * (1.0 + r) ** (-a) * inner

    val = 0.0
    for seg in ((0.0, R), (R, 4.0 * R + 50.0), (4.0 * R + 50.0, np.inf)):
        val += integrate.quad(outer2, *seg, limit=200)[0]
    return val


def convolution_bound_sweep(d: int, a: float, b: int, weight_exponent: float, r_max: float = 64.0):
    """Running max of I(R) (1+R)^weight_exponent over dyadic bands up to r_max.

    Returns (band_edges, band_maxima); the bound holds when the maxima settle.
    """
    edges = [0.5]
    while edges[-1] < r_max:
        edges.append(min(edges[-1] * 2.0, r_max))
    band_max = []
    for lo, hi in zip(edges, edges[1:]):
        radii = np.geomspace(lo, hi, 8)
        vals = [
            weighted_convolution_bound(float(R), d, a, b) * (1.0 + R) ** weight_exponent
            for R in radii
        ]
        band_max.append(max(vals))
    return np.array(edges), np.array(band_max)
