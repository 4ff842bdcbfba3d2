"""Local Morrey norms over balls at the origin, embedding constants between
the weighted Lebesgue classes, and the real-interpolation split.

The central norm is sup over R >= 1 of (R^-gamma int_{B_R} |f|^p)^(1/p),
discretized over a radius family: every distinct node radius below 4, then
1/8-steps up to the box half-width. Ball integrals count nodes with |x| <= R
(midpoint rule); the reported boundary slack quantifies the shell of cells the
counting rule may mis-assign at the achieving radius.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fields as F
from .errors import ParameterError
from .fields import Grid, ScalarField

_TOP_FRACTION = 8       # radii examined for the decay trend
_DECAY_DROP = 0.5       # objective must fall below this times the sup


@dataclass(frozen=True)
class NormReport:
    value: float              # the ball-sup norm
    p: float
    gamma: float
    sup_radius: float         # radius achieving the sup
    lp_wgamma: float          # weighted companion norm, same p and gamma
    boundary_slack: float     # integral-error estimate |bd B(0,R*)| * h/2 * sup|f|^p nearby
    truncated: bool           # sup attained at the largest tested radius
    decay_flag: bool          # objective tends to 0 at the largest radii
    embedding_ratios: dict = None


@dataclass(frozen=True)
class InterpolationSplit:
    A: float
    R: float                  # split radius, 0 means f0 = 0
    f0: ScalarField           # inner piece, |x| <= R
    f1: ScalarField           # outer piece
    norm_f0_p: float
    norm_f1_wdelta: float
    bound_ratios: dict        # measured constants against the A-power predictions


class _RadialProfile:
    """Sorted-radius prefix sums: ball integrals of |f|^p at every radius in
    O(log n) after O(n log n) setup."""

    def __init__(self, f, p: float):
        g = f.grid
        mag = F._magnitude(f).ravel()
        r = g.radii().ravel()
        order = np.argsort(r, kind="stable")
        self.radii = r[order]
        self.measure = g.spacing**g.dim
        self.prefix = np.concatenate([[0.0], np.cumsum(mag[order] ** p * self.measure)])
        self.grid = g
        self.p = p
        self.sorted_mag_p = mag[order] ** p

    def ball(self, R) -> np.ndarray:
        """integral over nodes with |x| <= R."""
        idx = np.searchsorted(self.radii, np.asarray(R, dtype=np.float64), side="right")
        return self.prefix[idx]

    def total(self) -> float:
        return float(self.prefix[-1])

    def shell_peak(self, R: float, width: float) -> float:
        lo = np.searchsorted(self.radii, R - width, side="left")
        hi = np.searchsorted(self.radii, R + width, side="right")
        if hi <= lo:
            return 0.0
        return float(np.max(self.sorted_mag_p[lo:hi]))


def radius_set(grid: Grid) -> np.ndarray:
    """{1} plus every distinct node radius in [1, 4), plus 1/8-steps up to L."""
    L = grid.extent
    if L < 1.0:
        raise ParameterError(f"box half-width {L} < 1: the radius range [1, L] is empty")
    r = np.unique(np.round(grid.radii().ravel(), 12))
    small = r[(r >= 1.0) & (r < min(4.0, L))]
    coarse = np.arange(4.0, L + 1e-9, 0.125) if L >= 4.0 else np.array([])
    return np.unique(np.concatenate([[1.0], small, coarse, [L]]))


def _check_pg(p: float, gamma: float):
    if p < 1.0:
        raise ParameterError(f"p must be >= 1, got {p}")
    if gamma < 0.0:
        raise ParameterError(f"gamma must be >= 0, got {gamma}")


def b_norm(f, p: float, gamma: float, delta: float = None) -> NormReport:
    """Ball-sup Morrey norm with report; pass delta to also fill the embedding
    ratios against the weighted norms (see embedding_constants)."""
    _check_pg(p, gamma)
    prof = _RadialProfile(f, p)
    radii = radius_set(f.grid)
    objective = (prof.ball(radii) ** (1.0 / p)) * radii ** (-gamma / p)
    k = int(np.argmax(objective))
    value = float(objective[k])
    sup_r = float(radii[k])
    g = f.grid
    surface = 2.0 * np.pi * sup_r if g.dim == 2 else 4.0 * np.pi * sup_r**2
    slack = surface * (g.spacing / 2.0) * prof.shell_peak(sup_r, g.spacing)
    tail = objective[-_TOP_FRACTION:]
    nonincreasing = bool(np.all(np.diff(tail) <= 1e-9 * max(value, 1e-300)))
    decay = nonincreasing and tail[-1] <= _DECAY_DROP * value
    ratios = None
    if delta is not None:
        ratios = _embedding_ratios(f, p, gamma, delta, value)
    return NormReport(
        value=value,
        p=p,
        gamma=gamma,
        sup_radius=sup_r,
        lp_wgamma=F.weighted_lp_norm(f, p, gamma),
        boundary_slack=float(slack),
        truncated=k == len(radii) - 1,
        decay_flag=bool(decay),
        embedding_ratios=ratios,
    )


def embedding_bounds(p: float, gamma: float, delta: float) -> dict:
    """Closed-form constants of the embedding chain
    L^p_{w_gamma} -> ball-sup space -> L^p_{w_delta} (delta > gamma):
    r1 <= 2^(gamma/p) and r2 <= (1 + 2^gamma / (1 - 2^(gamma-delta)))^(1/p),
    from comparing (1+|x|) with R on B_R and summing dyadic shells."""
    if delta <= gamma:
        raise ParameterError(f"need delta > gamma, got delta={delta} gamma={gamma}")
    r1 = 2.0 ** (gamma / p)
    r2 = (1.0 + 2.0**gamma / (1.0 - 2.0 ** (gamma - delta))) ** (1.0 / p)
    return {"r1_bound": r1, "r2_bound": r2}


def _embedding_ratios(f, p, gamma, delta, b_value) -> dict:
    bounds = embedding_bounds(p, gamma, delta)
    wg = F.weighted_lp_norm(f, p, gamma)
    wd = F.weighted_lp_norm(f, p, delta)
    out = dict(bounds)
    out["r1"] = b_value / wg if wg > 0 else np.nan
    out["r2"] = wd / b_value if b_value > 0 else np.nan
    out["undefined"] = bool(wg == 0 or b_value == 0)
    return out


def embedding_constants(f, p: float, gamma: float, delta: float) -> dict:
    """Measured embedding ratios r1 = b/\\|f\\|_{w_gamma}, r2 = \\|f\\|_{w_delta}/b
    next to their closed-form bounds."""
    _check_pg(p, gamma)
    report = b_norm(f, p, gamma)
    return _embedding_ratios(f, p, gamma, delta, report.value)


def interpolation_split(f: ScalarField, A: float, p: float, gamma: float, delta: float) -> InterpolationSplit:
    """Split f at radius R = A^(p/delta): f0 inside, f1 outside (A <= 1 puts
    everything in f1). Measured constants compare the piece norms with the
    predicted powers A^(gamma/delta) b and A^(gamma/delta - 1) b."""
    _check_pg(p, gamma)
    if delta <= gamma:
        raise ParameterError(f"need delta > gamma, got delta={delta} gamma={gamma}")
    if A <= 0:
        raise ParameterError(f"need A > 0, got {A}")
    g = f.grid
    if A <= 1.0:
        R = 0.0
        inside = np.zeros(g.shape, dtype=bool)
    else:
        R = A ** (p / delta)
        inside = g.radii() <= R
    f0 = ScalarField(g, np.where(inside, f.values, 0.0), f.time)
    f1 = ScalarField(g, np.where(inside, 0.0, f.values), f.time)
    n0 = F.lp_norm(f0, p)
    n1 = F.weighted_lp_norm(f1, p, delta)
    b = b_norm(f, p, gamma).value
    power = gamma / delta
    ratios = {
        "c0": n0 / (A**power * b) if b > 0 else np.nan,
        "c1": n1 / (A ** (power - 1.0) * b) if b > 0 else np.nan,
        "undefined": bool(b == 0),
    }
    return InterpolationSplit(A, float(R), f0, f1, float(n0), float(n1), ratios)


def k_functional(
    f, A: float, p: float, gamma: float, delta: float, n_candidates: int = 64
) -> float:
    """Upper estimate of K(A, f) = inf over splits of ||f0||_p + A ||f1||_{w_delta},
    minimized over radius splits including the proof radius A^(p/delta).

    Infimum of affine functions of A, hence nondecreasing and concave in A.
    """
    _check_pg(p, gamma)
    if delta <= gamma:
        raise ParameterError(f"need delta > gamma, got delta={delta} gamma={gamma}")
    if A <= 0:
        raise ParameterError(f"need A > 0, got {A}")
    g = f.grid
    mag = F._magnitude(f).ravel()
    r = g.radii().ravel()
    order = np.argsort(r, kind="stable")
    rs = r[order]
    measure = g.spacing**g.dim
    vp = mag[order] ** p * measure
    wp = vp * (1.0 + rs) ** (-delta)
    inner = np.concatenate([[0.0], np.cumsum(vp)])
    outer_total = np.sum(wp)
    # cancellation in the running difference can leave a tiny negative tail
    outer = np.maximum(outer_total - np.concatenate([[0.0], np.cumsum(wp)]), 0.0)

    r_top = float(rs[-1])  # corner radius, so the all-inner split is reachable
    cand = list(np.geomspace(max(g.spacing, 1e-6), r_top, n_candidates))
    cand.append(min(A ** (p / delta), r_top))
    idx = np.searchsorted(rs, np.asarray(cand), side="right")
    idx = np.unique(np.concatenate([[0], idx]))  # 0 is the empty-inner split
    vals = inner[idx] ** (1.0 / p) + A * outer[idx] ** (1.0 / p)
    return float(np.min(vals))
