"""Independent reference paths: a periodic spectral Poisson solver and blocked
direct-summation convolutions. Nothing here shares code with the fast
convolution path beyond the closed-form kernel evaluators, so agreement
between the two is evidence, not tautology.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gamma as gamma_fn

from . import fields as F
from . import kernels as KK
from .errors import ParameterError, StructuralError
from .fields import Grid, ScalarField, TensorField, VectorField
from .runtime import chunked_map, resolve_workers

_BLOCK = 1 << 15


@dataclass(frozen=True)
class OracleResult:
    kind: str
    probes: np.ndarray
    values: np.ndarray
    oversample: int = 1


# ---------------------------------------------------------------------------
# spectral Poisson oracle on an enlarged periodic box

def _spectral_setup(h: TensorField, enlargement: int):
    if int(enlargement) != enlargement or enlargement < 1:
        raise ParameterError(f"enlargement must be an integer >= 1, got {enlargement}")
    g = h.grid
    big = g.points * int(enlargement)
    lo = (big - g.points) // 2
    return g, big, lo


def _wavenumbers(big: int, spacing: float, d: int):
    k_full = 2.0 * np.pi * np.fft.fftfreq(big, d=spacing)
    k_half = 2.0 * np.pi * np.fft.rfftfreq(big, d=spacing)
    out = [k_full] * (d - 1) + [k_half]
    shaped = []
    for ax, k in enumerate(out):
        shape = [1] * d
        shape[ax] = len(k)
        shaped.append(k.reshape(shape))
    return shaped


def _spectral_solve(h: TensorField, enlargement: int):
    g, big, lo = _spectral_setup(h, enlargement)
    d = g.dim
    sl = tuple(slice(lo, lo + g.points) for _ in range(d))
    k = _wavenumbers(big, g.spacing, d)
    k2 = sum(kk**2 for kk in k)
    k2safe = np.where(k2 == 0.0, 1.0, k2)
    phat = 0.0
    for i in range(d):
        for j in range(d):
            pad = np.zeros((big,) * d)
            pad[sl] = h.component(i, j).values
            phat = phat - k[i] * k[j] * np.fft.rfftn(pad) / k2safe
    zero = (0,) * d
    phat[zero] = 0.0
    return g, big, sl, k, phat


def spectral_pressure(h: TensorField, enlargement: int = 2) -> ScalarField:
    """Solve -Lap p = sum_ij d_i d_j h_ij on the zero-padded periodic box.

    The result is the enlarged-box solution restricted back to the data box;
    its additive constant is the periodic zero-mean convention, so compare
    gradients or subtract interior means.
    """
    g, big, sl, k, phat = _spectral_solve(h, enlargement)
    p = np.fft.irfftn(phat, s=(big,) * g.dim, axes=range(g.dim))
    return ScalarField(g, p[sl], h.time)


def spectral_pressure_gradient(h: TensorField, enlargement: int = 2) -> VectorField:
    """Spectral gradient of the periodic pressure, restricted to the data box."""
    g, big, sl, k, phat = _spectral_solve(h, enlargement)
    comps = []
    for ax in range(g.dim):
        gax = np.fft.irfftn(1j * k[ax] * phat, s=(big,) * g.dim, axes=range(g.dim))
        comps.append(gax[sl])
    return VectorField.from_arrays(g, comps, h.time)


def compare_fields(fast, reference, ring: int = 1) -> dict:
    """Interior discrepancy between two fields of the same kind.

    Scalars are compared after removing each one's interior mean (the two
    pressure paths fix different additive constants); vectors are compared
    as they stand. Returns max_abs, rel_l2, and the reference scale.
    """
    F._same_grid(fast, reference)
    win = fast.grid.interior(ring)
    if isinstance(fast, ScalarField):
        a = fast.values[win]
        b = reference.values[win]
        a = a - np.mean(a)
        b = b - np.mean(b)
        diff = a - b
        scale = float(np.sqrt(np.mean(b**2)))
        rel = float(np.sqrt(np.mean(diff**2))) / max(scale, 1e-300)
        return {"max_abs": float(np.max(np.abs(diff))), "rel_l2": rel, "scale": scale}
    a = np.stack([c.values[win] for c in fast.components])
    b = np.stack([c.values[win] for c in reference.components])
    diff2 = np.sum((a - b) ** 2, axis=0)
    scale = float(np.sqrt(np.mean(np.sum(b**2, axis=0))))
    rel = float(np.sqrt(np.mean(diff2))) / max(scale, 1e-300)
    return {"max_abs": float(np.max(np.sqrt(diff2))), "rel_l2": rel, "scale": scale}


# ---------------------------------------------------------------------------
# blocked direct-summation convolutions at probe points

def _probe_array(probes, d):
    pts = np.asarray(probes, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[-1] != d:
        raise StructuralError(f"probes need {d} coordinates")
    return pts


def _fine_lattice(grid: Grid, oversample: int):
    """Oversampled box lattice and its cell measure."""
    n = grid.points * oversample
    hf = grid.spacing / oversample
    axes = [grid.origin[k] - grid.extent + hf * np.arange(n) for k in range(grid.dim)]
    return axes, hf


def _sample(h: ScalarField, pts: np.ndarray) -> np.ndarray:
    # multilinear reads, exact at lattice points
    return F.sample_scalar_at(h, pts, order=1)


def quadrature_conv(
    h: ScalarField,
    i: int,
    j: int,
    probes,
    kind: str = "near",
    spec: KK.CutoffSpec = KK.CutoffSpec(),
    oversample: int = 1,
    workers: int = None,
) -> OracleResult:
    """Direct summation of the near-field p.v. convolution or the far-field
    sums at probe points, on an optionally oversampled lattice.

    Blocks of the source lattice are accumulated in a fixed order, so the
    value is independent of the worker count (workers split over probes).
    """
    if oversample not in (1, 2, 4):
        raise ParameterError(f"oversample must be 1, 2, or 4, got {oversample}")
    if kind not in ("near", "far_plain", "far_corrected"):
        raise ParameterError(f"unknown oracle kind {kind!r}")
    g = h.grid
    d = g.dim
    pts = _probe_array(probes, d)
    nworkers = resolve_workers(workers)

    if kind == "near":
        values = _near_direct(h, i, j, pts, spec, oversample, nworkers)
    else:
        values = _far_direct(h, i, j, pts, spec, oversample, nworkers)
        if kind == "far_corrected":
            origin = _far_direct(h, i, j, np.zeros((1, d)), spec, oversample, nworkers)
            values = values - origin[0]
    return OracleResult(kind, pts, values, oversample)


def _near_offsets(grid: Grid, spec: KK.CutoffSpec, oversample: int):
    hf = grid.spacing / oversample
    m = int(np.ceil(spec.r1 / hf))
    ax = hf * np.arange(-m, m + 1)
    mesh = np.meshgrid(*([ax] * grid.dim), indexing="ij")
    offs = np.stack([q.ravel() for q in mesh], axis=-1)
    r = np.sqrt(np.sum(offs**2, axis=-1))
    keep = (r > 0) & (r <= spec.r1)
    return offs[keep], hf

def _near_direct(h, i, j, pts, spec, oversample, workers):
    g = h.grid
    offs, hf = _near_offsets(g, spec, oversample)
    r = np.linalg.norm(offs, axis=-1)
    wkernel = KK.cutoff_profile(r, spec) * KK.hessian_green(offs, i, j) * hf**g.dim
    h_at = _sample(h, pts)
    delta = (1.0 / g.dim) if i == j else 0.0

    def one_probe(idx):
        x = pts[idx]
        acc = 0.0
        for start in range(0, len(offs), _BLOCK):
            blk = slice(start, start + _BLOCK)
            src = x[None, :] - offs[blk]
            vals = _zero_extended(h, src)
            acc += float(np.sum(wkernel[blk] * (vals - h_at[idx])))
        return acc - delta * h_at[idx]

    out = chunked_map(one_probe, range(len(pts)), workers)
    return np.array(out)


def _zero_extended(h: ScalarField, pts: np.ndarray) -> np.ndarray:
    g = h.grid
    lo = np.array([g.origin[k] - g.extent for k in range(g.dim)])
    hi = lo + (g.points - 1) * g.spacing
    inside = np.all((pts >= lo - 1e-12) & (pts <= hi + 1e-12), axis=-1)
    vals = np.zeros(len(pts))
    if np.any(inside):
        vals[inside] = _sample(h, pts[inside])
    return vals


def _far_direct(h, i, j, pts, spec, oversample, workers):
    g = h.grid
    axes, hf = _fine_lattice(g, oversample)
    mesh = np.meshgrid(*axes, indexing="ij")
    src = np.stack([q.ravel() for q in mesh], axis=-1)
    hvals = (
        h.values.ravel()
        if oversample == 1
        else _sample(h, src)
    )
    measure = hf**g.dim

    def one_probe(idx):
        x = pts[idx]
        acc = 0.0
        for start in range(0, len(src), _BLOCK):
            blk = slice(start, start + _BLOCK)
            acc += float(
                np.sum(KK.far_kernel(x[None, :] - src[blk], i, j, spec) * hvals[blk])
            )
        return acc * measure

    out = chunked_map(one_probe, range(len(pts)), workers)
    return np.array(out)


# ---------------------------------------------------------------------------
# closed-form cross-check for the heat-smoothed kernel quadrature

def heat_third_exact_factors(r, tau: float, d: int):
    """Incomplete-gamma closed form of the radial factors (P, Q)."""
    r = np.asarray(r, dtype=np.float64)
    vmax = r**2 / (4.0 * tau)
    with np.errstate(divide="ignore", invalid="ignore"):
        P = np.pi ** (-d / 2.0) * r ** (-(d + 2.0)) * gammainc(d / 2.0 + 1.0, vmax) * gamma_fn(d / 2.0 + 1.0)
        Q = 2.0 * np.pi ** (-d / 2.0) * r ** (-(d + 4.0)) * gammainc(d / 2.0 + 2.0, vmax) * gamma_fn(d / 2.0 + 2.0)
    # center limit: gammainc(a, v) ~ v^a / Gamma(a+1) cancels the r powers
    P = np.where(r == 0.0, (4.0 * np.pi * tau) ** (-d / 2.0) / (2.0 * tau * (d + 2.0)), P)
    Q = np.where(r == 0.0, (4.0 * np.pi * tau) ** (-d / 2.0) / (4.0 * tau**2 * (d + 4.0)), Q)
    return P, Q
