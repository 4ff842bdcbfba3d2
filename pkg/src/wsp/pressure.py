"""Split-kernel assembly of the whole-space pressure for slowly decaying data.

The pressure of the tensor data h splits into
  * a near-field principal-value convolution against phi * Hess(G_d), done in
    subtraction form over lattice offsets 0 < |y| <= r1,
        sum_y phi(y) K_ij(y) [h(x-y) - h(x)] h^dim  -  (delta_ij / d) h(x),
    the Dirac share of the distributional Hessian applied analytically, and
  * a far-field sum against A_ij = (1 - phi) Hess(G_d), used either plain
    (fast-decay data) or in corrected form A_ij(x-y) - A_ij(-y), which is what
    converges in the slow-decay class and vanishes identically at x = 0.

Both lattice sums are evaluated exactly (zero extension outside the box) via
FFT; the circular transform is padded past 2N-1 nodes per axis so no
wraparound term exists, and the oracle module reproduces the same sums by
blocked direct summation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from . import fields as F
from . import kernels as KK
from .errors import ParameterError, RegimeWarning, ResolutionError, StructuralError
from .fields import Grid, ScalarField, TensorField, TimeSeriesField, VectorField
from .runtime import chunked_map, resolve_workers

FAST_DECAY = "fast"     # integrable against (1+|x|)^-d
SLOW_DECAY = "slow"     # integrable against (1+|x|)^-(d+1) only


# ---------------------------------------------------------------------------
# lattice tables

def _near_table(grid: Grid, i: int, j: int, spec: KK.CutoffSpec) -> np.ndarray:
    """phi * Hess(G_d) * h^dim on offsets |y| <= r1, zero at the center."""
    h = grid.spacing
    m = int(np.ceil(spec.r1 / h))
    ax = h * np.arange(-m, m + 1)
    mesh = np.meshgrid(*([ax] * grid.dim), indexing="ij")
    r2 = sum(q**2 for q in mesh)
    r = np.sqrt(r2)
    xi = np.broadcast_to(mesh[i], r.shape)
    xj = np.broadcast_to(mesh[j], r.shape)
    delta = 1.0 if i == j else 0.0
    vals = np.zeros(r.shape)
    mask = (r > 0) & (r <= spec.r1)
    rm2 = r2[mask]
    if grid.dim == 2:
        core = (2.0 * xi[mask] * xj[mask] - delta * rm2) / (2.0 * np.pi * rm2**2)
    else:
        core = (3.0 * xi[mask] * xj[mask] - delta * rm2) / (4.0 * np.pi * rm2**2.5)
    vals[mask] = KK.cutoff_profile(r[mask], spec) * core
    return vals * h**grid.dim


class _FarKernelCache:
    """Shared factors of the far kernel on the (2N-1)^dim offset lattice."""

    def __init__(self, grid: Grid, spec: KK.CutoffSpec):
        self.grid = grid
        self.spec = spec
        n = grid.points
        h = grid.spacing
        self.axes = [h * np.arange(-(n - 1), n) for _ in range(grid.dim)]
        mesh = np.meshgrid(*self.axes, indexing="ij", sparse=True)
        self.mesh = mesh
        self.r2 = sum(q**2 for q in mesh)
        r = np.sqrt(self.r2)
        d = grid.dim
        denom = 2.0 * np.pi * self.r2**2 if d == 2 else 4.0 * np.pi * self.r2**2.5
        with np.errstate(divide="ignore", invalid="ignore"):
            pref = (1.0 - KK.cutoff_profile(r, spec)) / denom
        pref[r <= spec.r0] = 0.0
        self.pref = pref

    def table(self, i: int, j: int) -> np.ndarray:
        d = self.grid.dim
        m = 2.0 if d == 2 else 3.0
        xi = self.mesh[i]
        xj = self.mesh[j]
        if i == j:
            return self.pref * (m * xi * xj - self.r2)
        return self.pref * (m * xi * xj)


def _conv_offset_table(values: np.ndarray, table: np.ndarray, grid: Grid) -> np.ndarray:
    """out[a] = sum_b table[a - b + (N-1)] values[b], exact via circular FFT."""
    n = grid.points
    d = grid.dim
    pad = _fast_len(2 * n - 1)
    vhat = np.fft.rfftn(values, s=(pad,) * d, axes=range(d))
    that = np.fft.rfftn(table, s=(pad,) * d, axes=range(d))
    full = np.fft.irfftn(vhat * that, s=(pad,) * d, axes=range(d))
    sl = tuple(slice(n - 1, 2 * n - 1) for _ in range(d))
    return full[sl]


def _fast_len(n: int) -> int:
    from scipy.fft import next_fast_len

    return int(next_fast_len(n, real=True))


# ---------------------------------------------------------------------------
# the three convolution operations

def near_field_conv(h: ScalarField, i: int, j: int, spec: KK.CutoffSpec = KK.CutoffSpec()) -> ScalarField:
    """Principal-value near-field convolution (phi d_i d_j G_d) * h in
    subtraction form, including the analytic -(delta_ij / d) h(x) Dirac share.

    The subtraction form needs no kernel value at the origin; data is zero
    extended outside the box. Midpoint quadrature on a symmetric lattice makes
    the error O(h^2) for smooth h.
    """
    g = _check_input(h, i, j, spec)
    if g.spacing > spec.r0 / 4.0 + 1e-12:
        raise ResolutionError(
            f"spacing {g.spacing} too coarse for cutoff inner radius {spec.r0} (need h <= r0/4)"
        )
    w = _near_table(g, i, j, spec)
    conv = fftconvolve(h.values, w, mode="same")
    total = float(w.sum())
    delta = (1.0 / g.dim) if i == j else 0.0
    return ScalarField(g, conv - (total + delta) * h.values, h.time)


def far_field_plain(
    h: ScalarField,
    i: int,
    j: int,
    spec: KK.CutoffSpec = KK.CutoffSpec(),
    decay_class: str = FAST_DECAY,
    _cache: _FarKernelCache = None,
) -> ScalarField:
    """Uncorrected far-field sum sum_y A_ij(x - y) h(y) h^dim.

    Only converges (as L grows) for fast-decay data; declaring slow decay
    still computes the truncated value but flags the regime.
    """
    g = _check_input(h, i, j, spec)
    if decay_class == SLOW_DECAY:
        warnings.warn(
            "plain far-field sum on slow-decay data: truncated value has no limit, "
            "tail exponent 0",
            RegimeWarning,
            stacklevel=2,
        )
    cache = _cache if _cache is not None else _FarKernelCache(g, spec)
    vals = _conv_offset_table(h.values, cache.table(i, j), g) * g.spacing**g.dim
    return ScalarField(g, vals, h.time)


def far_field_corrected(
    h: ScalarField,
    i: int,
    j: int,
    spec: KK.CutoffSpec = KK.CutoffSpec(),
    _cache: _FarKernelCache = None,
) -> ScalarField:
    """Corrected far-field sum sum_y [A_ij(x-y) - A_ij(-y)] h(y) h^dim.

    Subtracting the plain sum's value at the origin realizes the kernel
    correction exactly on the lattice, so the result is exactly zero at x=0.
    """
    plain = far_field_plain(h, i, j, spec, _cache=_cache)
    center = plain.values[(h.grid.origin_index,) * h.grid.dim]
    return ScalarField(h.grid, plain.values - center, h.time)


def _check_input(h: ScalarField, i: int, j: int, spec: KK.CutoffSpec) -> Grid:
    if not isinstance(h, ScalarField):
        raise StructuralError("convolutions take one tensor component as a ScalarField")
    g = h.grid
    if not 0 <= i < g.dim or not 0 <= j < g.dim:
        raise ParameterError(f"indices ({i}, {j}) out of range for dim {g.dim}")
    if not g.is_centered():
        raise StructuralError("pressure convolutions require a centered grid")
    if spec.r1 > g.extent:
        raise ParameterError(f"cutoff outer radius {spec.r1} must fit in the box (L={g.extent})")
    return g


# ---------------------------------------------------------------------------
# assembly

def _stress_tensor(u: VectorField, forcing: TensorField = None) -> TensorField:
    h = F.outer(u)
    if forcing is not None:
        F._same_grid(u, forcing)
        h = (h - forcing).symmetrized() if not forcing.symmetric else h - forcing
    return h


def tensor_background(h: TensorField) -> np.ndarray:
    """Componentwise spatial median of h: the constant part of the data.

    Constant tensor data contributes nothing to the continuum pressure
    gradient (its Hessian contraction vanishes, and the corrected far kernel
    integrates to zero), but its box-truncated far sum leaves pure boundary
    junk. Subtracting the constant before convolving removes the junk without
    changing what the pressure means.
    """
    d = h.grid.dim
    return np.array(
        [[float(np.median(h.component(i, j).values)) for j in range(d)] for i in range(d)]
    )


def assemble_from_tensor(
    h: TensorField,
    spec: KK.CutoffSpec = KK.CutoffSpec(),
    corrected: bool = True,
    workers: int = None,
    decay_class: str = FAST_DECAY,
    background: str = "median",
) -> ScalarField:
    """Pressure of symmetric tensor data h: near-field p.v. part plus the
    (corrected or plain) far field, summed over index pairs.

    background="median" (default) subtracts the componentwise spatial median
    of h first, so velocities with a constant offset (drifting frames) do not
    pollute the truncated far sums; "none" convolves the raw data.
    """
    if not h.symmetric:
        h = h.symmetrized()
    g = h.grid
    d = g.dim
    if background not in ("median", "none"):
        raise ParameterError(f"unknown background policy {background!r}")
    bg = tensor_background(h) if background == "median" else np.zeros((d, d))
    nworkers = resolve_workers(workers)
    pairs = [(i, j) for i in range(d) for j in range(i, d)]
    cache = _FarKernelCache(g, spec)

    def one_pair(pair):
        i, j = pair
        comp = h.component(i, j)
        comp = comp.with_values(comp.values - bg[i, j])
        near = near_field_conv(comp, i, j, spec)
        if corrected:
            far = far_field_corrected(comp, i, j, spec, _cache=cache)
        else:
            far = far_field_plain(comp, i, j, spec, decay_class=decay_class, _cache=cache)
        weight = 1.0 if i == j else 2.0
        return weight * (near.values + far.values)

    parts = chunked_map(one_pair, pairs, nworkers)
    total = parts[0]
    for part in parts[1:]:
        total = total + part
    return ScalarField(g, total, h.time)


def assemble_p_phi(
    u: VectorField,
    forcing: TensorField = None,
    spec: KK.CutoffSpec = KK.CutoffSpec(),
    workers: int = None,
) -> ScalarField:
    """Cutoff pressure of the velocity/forcing pair: data h = u tensor u - F,
    near field plus corrected far field (slow-decay safe)."""
    return assemble_from_tensor(_stress_tensor(u, forcing), spec, True, workers)


def assemble_p0(
    u: VectorField,
    forcing: TensorField = None,
    spec: KK.CutoffSpec = KK.CutoffSpec(),
    workers: int = None,
    decay_class: str = FAST_DECAY,
) -> ScalarField:
    """Uncorrected-far-field pressure, the fast-decay normalization."""
    return assemble_from_tensor(
        _stress_tensor(u, forcing), spec, False, workers, decay_class=decay_class
    )


def phi_change_constant(
    h: TensorField,
    spec_a: KK.CutoffSpec,
    spec_b: KK.CutoffSpec,
    background: str = "median",
) -> float:
    """The spatial constant p(spec_b) - p(spec_a) for the same data h.

    Direct lattice sum of sum_ij sum_y (phi_b - phi_a)(y) K_ij(y) h_ij(y) h^dim
    (the kernels are even, so evaluating at y or -y is the same). The
    background policy must match the assembly calls being compared.
    """
    if not h.symmetric:
        h = h.symmetrized()
    g = h.grid
    if background not in ("median", "none"):
        raise ParameterError(f"unknown background policy {background!r}")
    bg = tensor_background(h) if background == "median" else np.zeros((g.dim, g.dim))
    pts = np.stack([np.broadcast_to(c, g.shape).ravel() for c in g.coords()], axis=-1)
    r = np.linalg.norm(pts, axis=-1)
    dphi = KK.cutoff_profile(r, spec_b) - KK.cutoff_profile(r, spec_a)
    live = np.abs(dphi) > 0.0
    total = 0.0
    for i in range(g.dim):
        for j in range(g.dim):
            hij = h.component(i, j).values.ravel()[live] - bg[i, j]
            total += float(np.sum(dphi[live] * KK.hessian_green(pts[live], i, j) * hij))
    return total * g.spacing**g.dim


# ---------------------------------------------------------------------------
# diagnostics

def poisson_residual(p: ScalarField, h: TensorField, ring: int = 1) -> float:
    """Interior L^2 norm of Lap p + sum_ij d_i d_j h_ij over the source norm."""
    F._same_grid(p, h)
    src = F.tensor_source(h)
    res = F.laplacian(p) + src
    denom = F.interior_lp_norm(src, 2, ring)
    if denom == 0.0:
        raise ParameterError("trivial source: residual normalization undefined")
    return F.interior_lp_norm(res, 2, ring) / denom


@dataclass(frozen=True)
class HeatDecayReport:
    taus: np.ndarray
    max_abs: np.ndarray
    slope: float
    probes: tuple  # per-tau probe arrays


def default_heat_probes(grid: Grid, tau: float) -> np.ndarray:
    """Probe family following the parabolic scale: rays |x| = c sqrt(tau).

    The decay envelope (sqrt(tau) + |x|)^-(d+1) is saturated on |x| ~ sqrt(tau);
    fixed probes see the strictly faster tau^-(d+2)/2 falloff, so the envelope
    rate is only visible along these rays.
    """
    d = grid.dim
    scales = np.array([0.0, 0.5, 1.0, 1.5, 2.0, 3.0])
    dirs = [np.eye(d)[k] for k in range(d)] + [np.ones(d) / np.sqrt(d)]
    pts = [np.zeros(d)]
    for c in scales[1:]:
        for e in dirs:
            pts.append(c * np.sqrt(tau) * e)
    return np.array(pts)


def heat_normalization(
    h: TensorField,
    taus,
    probes=None,
    workers: int = None,
    block: int = 1 << 14,
) -> HeatDecayReport:
    """Evaluate |exp(tau Lap) grad p| at probe points for each tau and fit the
    log-log decay slope of the per-tau maximum.

    grad p component k is sum_ij (exp(tau Lap) d_k d_i d_j G_d) * h_ij; the
    kernel reduces to two radial profiles so all index pairs share quadrature.
    """
    if not h.symmetric:
        h = h.symmetrized()
    g = h.grid
    d = g.dim
    taus = np.asarray(list(taus), dtype=np.float64)
    if np.any(taus <= 0) or len(taus) < 2:
        raise ParameterError("need at least two positive tau values")
    nodes = np.stack([np.broadcast_to(c, g.shape).ravel() for c in g.coords()], axis=-1)
    hvals = np.stack(
        [[h.component(i, j).values.ravel() for j in range(d)] for i in range(d)]
    )
    trace = sum(hvals[i, i] for i in range(d))
    measure = g.spacing**d
    nworkers = resolve_workers(workers)

    max_abs = []
    probe_sets = []
    for tau in taus:
        pset = np.asarray(probes, dtype=np.float64) if probes is not None else default_heat_probes(g, tau)
        probe_sets.append(pset)

        def one_probe(idx, tau=tau, pset=pset):
            x = pset[idx]
            acc = np.zeros(d)
            for start in range(0, len(nodes), block):
                blk = slice(start, start + block)
                z = x[None, :] - nodes[blk]
                r = np.linalg.norm(z, axis=-1)
                P, Q = KK.heat_third_radial_factors(r, float(tau), d)
                s = np.stack([sum(z[:, j] * hvals[k, j][blk] for j in range(d)) for k in range(d)])
                q2 = sum(z[:, i] * z[:, j] * hvals[i, j][blk] for i in range(d) for j in range(d))
                for k in range(d):
                    acc[k] += np.sum(P * (2.0 * s[k] + z[:, k] * trace[blk]) - Q * z[:, k] * q2)
            return acc * measure

        vals = chunked_map(one_probe, range(len(pset)), nworkers)
        max_abs.append(max(float(np.linalg.norm(v)) for v in vals))

    max_abs = np.array(max_abs)
    slope = float(np.polyfit(np.log(taus), np.log(np.maximum(max_abs, 1e-300)), 1)[0])
    return HeatDecayReport(taus, max_abs, slope, tuple(probe_sets))


def truncation_tail_bound(h: TensorField) -> float:
    """Envelope bound on what the box truncation can add to the corrected
    far-field sum at interior points |x| <= L/2.

    Assumes |h| outside stays below its outer-shell maximum with the
    (1+|y|)^-(d+1) profile; uses the mean-value bound with the closed-form
    third-derivative constant.
    """
    g = h.grid
    d = g.dim
    shell = 0.0
    for i in range(d):
        for j in range(d):
            shell = max(shell, float(np.max(np.abs(h.component(i, j).values[F._outer_shell_mask(g)]))))
    c3 = KK.kernel_decay_constant(3, d)
    surf = 2.0 * np.pi if d == 2 else 4.0 * np.pi
    # integral of (1+r)^-(d+1) r^(d-1) for r > L, bounded by (1+L)^-2 / 2 * surface factor
    outer_mass = shell * surf * (1.0 + g.extent) ** (-2.0) / 2.0
    return c3 * 4.0 ** (d + 1) * (g.extent / 2.0) * outer_mass


# ---------------------------------------------------------------------------
# source decomposition S = grad p_phi + g'(t)

@dataclass(frozen=True)
class PressureDecomposition:
    pressure: TimeSeriesField          # p_phi frames
    gradient: TimeSeriesField          # discrete gradient of each pressure frame
    times: np.ndarray
    dtg: np.ndarray                    # (frames, dim) extracted drift rate g'(t)
    g: np.ndarray                      # trapezoid integral of dtg, g(0) = 0
    displacement: np.ndarray           # trapezoid integral of g, E(0) = 0
    dispersion: np.ndarray             # per frame, sup |S - grad p - g'| interior
    curl_sup: float                    # worst relative curl of S seen
    tail_bounds: np.ndarray            # per frame truncation tail bound

    @property
    def dispersion_sup(self) -> float:
        return float(np.max(self.dispersion))


def decompose_source(
    S: TimeSeriesField,
    u: TimeSeriesField,
    forcing: TimeSeriesField = None,
    spec: KK.CutoffSpec = KK.CutoffSpec(),
    curl_tol: float = 1e-2,
    dispersion_tol: float = 1e-2,
    ring: int = 1,
    workers: int = None,
) -> PressureDecomposition:
    """Split a curl-free source series into grad p_phi plus a spatially
    constant drift rate g'(t): p_phi is assembled from (u, F), g'(t) is the
    componentwise interior median of S - grad p_phi, and g, E are trapezoid
    integrals with g(0) = E(0) = 0.

    The spatial dispersion of S - grad p_phi - g'(t) is reported per frame;
    the split is only meaningful when it is small, so crossing dispersion_tol
    (relative to the frame scale) emits a warning rather than failing.
    """
    if len(S) != len(u) or not np.allclose(S.times, u.times):
        raise StructuralError("source and velocity series disagree on times")
    g = S.grid
    d = g.dim
    times = S.times
    win = g.interior(ring)
    worst_curl = 0.0
    dtg = np.zeros((len(S), d))
    dispersion = np.zeros(len(S))
    tails = np.zeros(len(S))
    frames = []
    grads = []
    scale_sup = 0.0
    for k in range(len(S)):
        Sk = S.frames[k]
        scale = max(F.interior_max(Sk, ring), 1e-300)
        scale_sup = max(scale_sup, scale)
        worst_curl = max(worst_curl, F.curl_sup(Sk, ring) / scale)
        fk = forcing.frames[k] if forcing is not None else None
        pk = assemble_p_phi(u.frames[k], fk, spec, workers)
        frames.append(pk)
        grad = F.gradient(pk)
        grads.append(grad)
        for c in range(d):
            diff = Sk.component(c).values[win] - grad.component(c).values[win]
            dtg[k, c] = float(np.median(diff))
        resid = np.stack(
            [
                Sk.component(c).values[win] - grad.component(c).values[win] - dtg[k, c]
                for c in range(d)
            ]
        )
        dispersion[k] = float(np.max(np.sqrt(np.sum(resid**2, axis=0))))
        tails[k] = truncation_tail_bound(_stress_tensor(u.frames[k], fk))
    if worst_curl > curl_tol:
        from .errors import NotAGradientError

        raise NotAGradientError(
            f"source series has relative curl {worst_curl:.3e} > {curl_tol:.3e}"
        )
    if np.max(dispersion) > dispersion_tol * scale_sup:
        from .errors import DecompositionWarning

        warnings.warn(
            f"source minus gradient has spatial dispersion {np.max(dispersion):.3e} "
            f"(scale {scale_sup:.3e}): the constant-drift split is dubious",
            DecompositionWarning,
            stacklevel=2,
        )
    gint = _cumtrapz(dtg, times)
    disp = _cumtrapz(gint, times)
    return PressureDecomposition(
        TimeSeriesField(tuple(frames)),
        TimeSeriesField(tuple(grads)),
        times,
        dtg,
        gint,
        disp,
        dispersion,
        worst_curl,
        tails,
    )


def _cumtrapz(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    dt = np.diff(t)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * dt[:, None], axis=0)
    return out
