"""Batch front door: FLD1 fields in, FLD1 fields plus a JSON report out.

Each subcommand validates its configuration, runs one pipeline, prints one
line per hard check, optionally writes a JSON report, and exits 0 iff every
hard check passed (2 on usage or input errors). Reports carry a schema
version, sorted keys, and no timestamps, so equal inputs give equal bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass, fields as dc_fields

import numpy as np

from . import fields as F
from . import fixtures as X
from . import fldio as IO
from . import galilean as GA
from . import kernels as KK
from . import leray as LR
from . import oracle as OR
from . import pressure as PR
from . import spaces as SP
from .errors import (
    DecompositionWarning,
    FormatError,
    NotAGradientError,
    ParameterError,
    WspError,
)
from .fields import Grid, ScalarField, TensorField, TimeSeriesField, VectorField

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# run configuration: flat key=value file, flags win, unknown keys rejected

@dataclass
class RunConfig:
    dim: int = 2
    n: int = 64
    l: float = 8.0
    r0: float = 1.0
    r1: float = 2.0
    mode: str = "phi"
    seed: int = 7
    workers: int = None
    poisson_tol: float = 5e-2
    oracle_tol: float = 2e-2
    curl_tol: float = 1e-2
    dispersion_tol: float = 1e-2
    suitability_tol: float = None
    embedding_slack: float = 1.05
    margin: float = None

    def validate(self) -> "RunConfig":
        if self.dim not in (2, 3):
            raise ParameterError(f"dim must be 2 or 3, got {self.dim}")
        if self.n < 4 or self.n % 2:
            raise ParameterError(f"n must be even and >= 4, got {self.n}")
        if not self.l > 0:
            raise ParameterError(f"l must be positive, got {self.l}")
        if not 0 < self.r0 < self.r1:
            raise ParameterError(f"need 0 < r0 < r1, got r0={self.r0} r1={self.r1}")
        if self.mode not in ("phi", "p0"):
            raise ParameterError(f"mode must be phi or p0, got {self.mode!r}")
        if self.seed < 0:
            raise ParameterError(f"seed must be >= 0, got {self.seed}")
        if self.workers is not None and self.workers < 1:
            raise ParameterError(f"workers must be >= 1, got {self.workers}")
        for name in ("poisson_tol", "oracle_tol", "curl_tol", "dispersion_tol", "embedding_slack"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")
        if self.suitability_tol is not None and not self.suitability_tol > 0:
            raise ParameterError("suitability_tol must be positive")
        if self.margin is not None and self.margin < 0:
            raise ParameterError("margin must be nonnegative")
        return self

    @property
    def cutoff(self) -> KK.CutoffSpec:
        return KK.CutoffSpec(self.r0, self.r1)

    def grid(self) -> Grid:
        return Grid(self.dim, self.l, self.n)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dc_fields(self)}


_CONFIG_TYPES = {f.name: f.type for f in dc_fields(RunConfig)}


def _coerce(key: str, raw: str):
    raw = raw.strip()
    kind = _CONFIG_TYPES[key]
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    return raw


def load_config(path) -> dict:
    """Flat key=value lines; blank lines and #-comments are skipped."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ParameterError(f"{path}:{lineno}: expected key=value, got {body!r}")
            key, raw = body.split("=", 1)
            key = key.strip()
            if key not in _CONFIG_TYPES:
                raise ParameterError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                out[key] = _coerce(key, raw)
            except ValueError as exc:
                raise ParameterError(f"{path}:{lineno}: bad value for {key}: {raw.strip()!r}") from exc
    return out


def make_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        for key, value in load_config(args.config).items():
            setattr(cfg, key, value)
    for key in _CONFIG_TYPES:
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    return cfg.validate()


# ---------------------------------------------------------------------------
# report plumbing

def _num(x):
    """JSON-safe number: non-finite values become strings."""
    x = float(x)
    return x if np.isfinite(x) else repr(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return obj


class CheckList:
    """Hard checks: named comparisons that decide the exit status."""

    def __init__(self):
        self.items = []

    def bound(self, name: str, value, threshold) -> bool:
        ok = bool(float(value) <= float(threshold))
        self.items.append(
            {"name": name, "value": _num(value), "threshold": _num(threshold), "passed": ok}
        )
        return ok

    def floor(self, name: str, value, threshold) -> bool:
        ok = bool(float(value) >= float(threshold))
        self.items.append(
            {"name": name, "value": _num(value), "threshold": _num(threshold), "passed": ok}
        )
        return ok

    def flag(self, name: str, ok) -> bool:
        self.items.append({"name": name, "value": None, "threshold": None, "passed": bool(ok)})
        return bool(ok)

    def extend(self, other: "CheckList", prefix: str = ""):
        for item in other.items:
            renamed = dict(item)
            if prefix:
                renamed["name"] = f"{prefix}.{item['name']}"
            self.items.append(renamed)

    @property
    def passed(self) -> bool:
        return all(item["passed"] for item in self.items)


def emit(args, subcommand: str, cfg: RunConfig, results: dict, checks: CheckList) -> int:
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": "wsp",
        "subcommand": subcommand,
        "config": _jsonable(cfg.as_dict()),
        "results": _jsonable(results),
        "checks": checks.items,
        "passed": checks.passed,
    }
    if getattr(args, "report", None):
        text = json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    for item in checks.items:
        mark = "ok  " if item["passed"] else "FAIL"
        if item["value"] is None:
            print(f"{mark} {item['name']}")
        else:
            value, threshold = item["value"], item["threshold"]
            value = f"{value:.6g}" if isinstance(value, float) else str(value)
            threshold = f"{threshold:.6g}" if isinstance(threshold, float) else str(threshold)
            print(f"{mark} {item['name']}: {value} vs {threshold}")
    print("PASS" if checks.passed else "FAIL")
    return 0 if checks.passed else 1


# ---------------------------------------------------------------------------
# field I/O helpers

def _stamp(field, t: float):
    g = field.grid
    if isinstance(field, ScalarField):
        return ScalarField(g, field.values, t)
    if isinstance(field, VectorField):
        return VectorField.from_arrays(g, [c.values for c in field.components], t)
    mats = [[field.component(i, j).values for j in range(g.dim)] for i in range(g.dim)]
    return TensorField.from_arrays(g, mats, t)


def _load_series(path) -> TimeSeriesField:
    """Series from back-to-back records; a single unstamped record becomes a
    one-frame series at t = 0."""
    buf_series = None
    try:
        buf_series = IO.read_series(path)
    except WspError:
        field = IO.read_field(path)
        if field.time is None:
            field = _stamp(field, 0.0)
        buf_series = TimeSeriesField((field,))
    return buf_series


def _broadcast_forcing(forcing: TimeSeriesField, u: TimeSeriesField) -> TimeSeriesField:
    if len(forcing) == len(u):
        return forcing
    if len(forcing) == 1:
        return TimeSeriesField(tuple(_stamp(forcing.frames[0], t) for t in u.times))
    raise ParameterError(
        f"forcing has {len(forcing)} frames, velocity has {len(u)}; give one or matching"
    )


def _load_tensor(path) -> TensorField:
    series = _load_series(path)
    if len(series) != 1:
        raise ParameterError(f"{path}: expected a single tensor record, found {len(series)}")
    field = series.frames[0]
    if not isinstance(field, TensorField):
        raise ParameterError(f"{path}: expected a tensor field, found {type(field).__name__}")
    return field


# ---------------------------------------------------------------------------
# pressure

def run_pressure(args, cfg: RunConfig) -> int:
    u = _load_series(args.input)
    for frame in u.frames:
        if not isinstance(frame, VectorField):
            raise ParameterError("pressure expects a velocity (vector) series")
    forcing = None
    if args.forcing:
        forcing = _broadcast_forcing(_load_series(args.forcing), u)
    spec = cfg.cutoff
    results = {"frames": len(u), "times": u.times, "mode": cfg.mode}

    drift = None
    frames = None
    if cfg.mode == "phi" and len(u) >= 3:
        S = LR.ns_residual(u, forcing).map(lambda f: f * (-1.0))
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                decomp = PR.decompose_source(
                    S, u, forcing, spec,
                    curl_tol=cfg.curl_tol,
                    dispersion_tol=cfg.dispersion_tol,
                    workers=cfg.workers,
                )
            frames = decomp.pressure
            drift = {
                "g": decomp.g,
                "dtg": decomp.dtg,
                "displacement": decomp.displacement,
                "dispersion": decomp.dispersion,
                "curl_sup": decomp.curl_sup,
                "dispersion_warning": any(
                    issubclass(w.category, DecompositionWarning) for w in caught
                ),
            }
        except NotAGradientError as exc:
            drift = {"skipped": str(exc)}

    if frames is None:
        assemble = PR.assemble_p_phi if cfg.mode == "phi" else PR.assemble_p0
        frames = TimeSeriesField(
            tuple(
                assemble(
                    u.frames[k],
                    forcing.frames[k] if forcing is not None else None,
                    spec,
                    cfg.workers,
                )
                for k in range(len(u))
            )
        )

    residuals = []
    tails = []
    for k in range(len(u)):
        fk = forcing.frames[k] if forcing is not None else None
        h = PR._stress_tensor(u.frames[k], fk)
        residuals.append(PR.poisson_residual(frames.frames[k], h))
        tails.append(PR.truncation_tail_bound(h))
    results["poisson_residuals"] = residuals
    results["tail_bounds"] = tails
    results["drift"] = drift

    checks = CheckList()
    checks.bound("poisson-residual", max(residuals), cfg.poisson_tol)
    checks.flag(
        "finite-output",
        all(np.isfinite(f.values).all() for f in frames.frames),
    )
    if args.out:
        IO.write_series(args.out, frames)
    return emit(args, "pressure", cfg, results, checks)


# ---------------------------------------------------------------------------
# project

def run_project(args, cfg: RunConfig) -> int:
    H = _load_tensor(args.tensor)
    parts = LR.leray_project(H, cfg.cutoff, cfg.workers)
    w = parts.input_divergence
    scale = max(float(np.max(w.magnitude())), 1e-300)
    div_sol = F.interior_lp_norm(F.divergence(parts.solenoidal), ring=2)
    div_in = max(F.interior_lp_norm(F.divergence(w), ring=2), 1e-300)
    curl_grad = F.curl_sup(parts.gradient_part, ring=2)
    results = {
        "input_scale": scale,
        "reconstruction_error": parts.reconstruction_error(),
        "divergence_input": div_in,
        "divergence_solenoidal": div_sol,
        "divergence_ratio": div_sol / div_in,
        "curl_of_gradient_part": curl_grad,
        "potential_span": float(np.ptp(parts.potential.values)),
    }
    checks = CheckList()
    checks.bound("reconstruction", parts.reconstruction_error() / scale, 1e-12)
    checks.bound("solenoidal-divergence", div_sol / div_in, cfg.poisson_tol)
    checks.bound("gradient-part-curl", curl_grad / scale, cfg.curl_tol)
    if args.out:
        IO.write_field(args.out, parts.solenoidal)
    return emit(args, "project", cfg, results, checks)


# ---------------------------------------------------------------------------
# galilean

def _load_drift(path, times: np.ndarray, dim: int) -> GA.DriftCurve:
    rows = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if rows.shape[1] != dim + 1:
        raise ParameterError(
            f"{path}: drift csv needs columns t,g1..g{dim}, found {rows.shape[1]}"
        )
    t = rows[:, 0]
    if np.any(np.diff(t) <= 0):
        raise ParameterError(f"{path}: drift times must be strictly increasing")
    if times[0] < t[0] - 1e-12 or times[-1] > t[-1] + 1e-12:
        raise ParameterError(
            f"{path}: drift samples cover [{t[0]:g}, {t[-1]:g}] "
            f"but the series needs [{times[0]:g}, {times[-1]:g}]"
        )
    g = np.stack([np.interp(times, t, rows[:, 1 + c]) for c in range(dim)], axis=1)
    return GA.displacement(times, g)


def run_galilean(args, cfg: RunConfig) -> int:
    u = _load_series(args.input)
    drift = _load_drift(args.drift, u.times, u.grid.dim)
    margin = cfg.margin
    if margin is None:
        margin = drift.max_displacement() + 1e-9
    out = GA.galilean_transform(u, drift, margin, order=args.order, inverse=args.inverse)
    window = GA.valid_window(u.grid, margin)
    results = {
        "frames": len(u),
        "max_displacement": drift.max_displacement(),
        "margin": margin,
        "valid_window_start": int(window[0].start),
        "valid_window_stop": int(window[0].stop),
        "g_samples": drift.g,
        "displacement_samples": drift.E,
    }
    checks = CheckList()
    checks.flag("finite-output", all(np.isfinite(f.array()).all() for f in out.frames))
    if args.out:
        IO.write_series(args.out, out)
    return emit(args, "galilean", cfg, results, checks)


# ---------------------------------------------------------------------------
# norms

def run_norms(args, cfg: RunConfig) -> int:
    series = _load_series(args.input)
    p, gamma, delta = args.p, args.gamma, args.delta
    checks = CheckList()
    per_frame = []
    for k, frame in enumerate(series.frames):
        report = SP.b_norm(frame, p, gamma, delta)
        entry = {
            "value": report.value,
            "sup_radius": report.sup_radius,
            "lp_wgamma": report.lp_wgamma,
            "boundary_slack": report.boundary_slack,
            "truncated": report.truncated,
            "decay_flag": report.decay_flag,
        }
        tag = f"frame{k}." if len(series) > 1 else ""
        checks.flag(f"{tag}finite", np.isfinite(report.value))
        if delta is not None:
            entry["embedding"] = report.embedding_ratios
            ratios = report.embedding_ratios
            if not ratios["undefined"]:
                checks.bound(
                    f"{tag}embedding-r1",
                    ratios["r1"],
                    ratios["r1_bound"] * cfg.embedding_slack,
                )
                checks.bound(
                    f"{tag}embedding-r2",
                    ratios["r2"],
                    ratios["r2_bound"] * cfg.embedding_slack,
                )
        per_frame.append(entry)
    results = {"p": p, "gamma": gamma, "delta": delta, "frames": per_frame}
    return emit(args, "norms", cfg, results, checks)


# ---------------------------------------------------------------------------
# suitability

def run_suitability(args, cfg: RunConfig) -> int:
    u = _load_series(args.input)
    pr = _load_series(args.pressure)
    forcing = _broadcast_forcing(_load_series(args.forcing), u) if args.forcing else None
    battery = LR.build_battery(u.grid, u.times, seed=args.battery_seed)
    rows = []
    checks = CheckList()
    worst = None
    for label, testfn in battery:
        rep = LR.suitability_residual(
            u, pr, forcing, testfn, label=label, tol=cfg.suitability_tol
        )
        rows.append(
            {
                "label": rep.label,
                "mu": rep.mu_value,
                "tol": rep.tol,
                "suitable": rep.suitable,
                "support_radius": rep.support_radius,
                "components": rep.components,
            }
        )
        if worst is None or rep.mu_value < worst["mu"]:
            worst = rows[-1]
    checks.flag("suitable-on-battery", all(r["suitable"] for r in rows))
    results = {
        "battery_size": len(rows),
        "battery_seed": args.battery_seed,
        "worst_label": worst["label"],
        "worst_mu": worst["mu"],
        "rows": rows,
    }
    return emit(args, "suitability", cfg, results, checks)


# ---------------------------------------------------------------------------
# oracle-compare

def run_oracle_compare(args, cfg: RunConfig) -> int:
    H = _load_tensor(args.input)
    enlargement = args.enlargement
    checks = CheckList()
    if args.op == "pressure":
        fast_p = PR.assemble_from_tensor(H, cfg.cutoff, workers=cfg.workers)
        fast = F.gradient(fast_p)
        ref = OR.spectral_pressure_gradient(H, enlargement)
        cmp_grad = OR.compare_fields(fast, ref, ring=2)
        cmp_p = OR.compare_fields(fast_p, OR.spectral_pressure(H, enlargement), ring=2)
        results = {"op": "pressure", "enlargement": enlargement,
                   "gradient": cmp_grad, "pressure": cmp_p}
        checks.bound("gradient-rel-l2", cmp_grad["rel_l2"], cfg.oracle_tol)
    else:
        parts = LR.leray_project(H, cfg.cutoff, cfg.workers)
        w = parts.input_divergence
        ref_grad = OR.spectral_pressure_gradient(-H, enlargement)
        ref = w - ref_grad
        cmp_sol = OR.compare_fields(parts.solenoidal, ref, ring=2)
        results = {"op": "project", "enlargement": enlargement, "solenoidal": cmp_sol}
        checks.bound("solenoidal-rel-l2", cmp_sol["rel_l2"], cfg.oracle_tol)
    return emit(args, "oracle-compare", cfg, results, checks)


# ---------------------------------------------------------------------------
# verify suites

def _suite_kernels(cfg: RunConfig, rng) -> tuple:
    results = {}
    checks = CheckList()

    worst_trace = 0.0
    worst_sym = 0.0
    worst_even = 0.0
    for d, n, l in ((2, 32, 4.0), (3, 16, 2.0)):
        g = Grid(d, l, n)
        pts = np.stack([np.broadcast_to(c, g.shape).ravel() for c in g.coords()], axis=-1)
        pts = pts[np.linalg.norm(pts, axis=-1) > 0]
        trace = sum(KK.hessian_green(pts, i, i) for i in range(d))
        worst_trace = max(worst_trace, float(np.max(np.abs(trace))))
        for i in range(d):
            for j in range(i + 1, d):
                worst_sym = max(
                    worst_sym,
                    float(np.max(np.abs(KK.hessian_green(pts, i, j) - KK.hessian_green(pts, j, i)))),
                )
        probe = rng.uniform(0.3, 2.5, size=(64, d)) * rng.choice([-1.0, 1.0], size=(64, d))
        for i in range(d):
            worst_even = max(
                worst_even,
                float(np.max(np.abs(KK.grad_green(probe, i) + KK.grad_green(-probe, i)))),
            )
            for j in range(d):
                worst_even = max(
                    worst_even,
                    float(np.max(np.abs(KK.hessian_green(probe, i, j) - KK.hessian_green(-probe, i, j)))),
                )
    results["trace_identity_max"] = worst_trace
    results["hessian_symmetry_max"] = worst_sym
    results["parity_max"] = worst_even
    checks.bound("trace-identity", worst_trace, 1e-12)
    checks.bound("hessian-symmetry", worst_sym, 1e-12)
    checks.bound("kernel-parity", worst_even, 1e-12)

    spec = cfg.cutoff
    r = np.linspace(0.0, 2.0 * spec.r1, 257)
    prof = KK.cutoff_profile(r, spec)
    plateau = np.max(np.abs(prof[r <= spec.r0] - 1.0))
    outside = np.max(np.abs(prof[r >= spec.r1]))
    monotone = bool(np.all(np.diff(prof) <= 1e-12))
    results["cutoff_plateau_error"] = float(plateau)
    results["cutoff_outside_max"] = float(outside)
    checks.bound("cutoff-plateau", plateau, 1e-15)
    checks.bound("cutoff-support", outside, 1e-15)
    checks.flag("cutoff-monotone", monotone)

    inner = rng.uniform(-spec.r0 / np.sqrt(3), spec.r0 / np.sqrt(3), size=(32, 2))
    far_inside = max(
        float(np.max(np.abs(KK.far_kernel(inner, i, j, spec))))
        for i in range(2)
        for j in range(2)
    )
    results["far_kernel_inside_r0"] = far_inside
    checks.bound("far-kernel-near-zero", far_inside, 1e-15)

    mass_err = 0.0
    for d, n, l, t in ((2, 128, 10.0, 1.0), (3, 64, 6.0, 0.5)):
        g = Grid(d, l, n)
        pts = np.stack([np.broadcast_to(c, g.shape).ravel() for c in g.coords()], axis=-1)
        mass = float(np.sum(KK.heat_kernel(pts, t))) * g.spacing**d
        mass_err = max(mass_err, abs(mass - 1.0))
    results["heat_mass_error"] = mass_err
    checks.bound("heat-kernel-mass", mass_err, 1e-6)

    off_avg = 0.0
    for d in (2, 3):
        off_avg = max(off_avg, abs(KK.spherical_average(lambda x: KK.hessian_green(x, 0, 1), d, 2.0)))
    results["hessian_offdiag_sphere_average"] = off_avg
    checks.bound("sphere-average-offdiagonal", off_avg, 1e-12)

    heat_devs = []
    radii = np.linspace(0.0, 12.0, 25)
    for d in (2, 3):
        for tau in (0.5, 4.0, 32.0):
            P, Q = KK.heat_third_radial_factors(radii, tau, d)
            Pe, Qe = OR.heat_third_exact_factors(radii, tau, d)
            scale = max(np.max(np.abs(Pe)), np.max(np.abs(Qe)), 1e-300)
            heat_devs.append(np.max(np.abs(P - Pe)) / scale)
            heat_devs.append(np.max(np.abs(Q - Qe)) / scale)
    worst_heat = float(np.max(heat_devs))
    results["heat_factor_disagreement"] = worst_heat
    checks.bound("heat-factor-agreement", worst_heat, 1e-8)

    band_dev = 0.0
    bands = {}
    for d, a, b, s in ((2, 3.0, 3, 3.0), (2, 2.0, 3, 2.0), (3, 4.0, 4, 4.0), (3, 3.0, 4, 3.0)):
        _, maxima = KK.convolution_bound_sweep(d, a, b, s, r_max=64.0)
        ratio = float(maxima[-1] / maxima[-2])
        bands[f"d{d}_a{a:g}_b{b}_s{s:g}"] = ratio
        band_dev = max(band_dev, abs(ratio - 1.0))
    results["envelope_band_ratios"] = bands
    checks.bound("envelope-band-stability", band_dev, 0.07)

    return results, checks


def _suite_fields(cfg: RunConfig, rng) -> tuple:
    results = {}
    checks = CheckList()

    grad_errs = []
    lap_errs = []
    for n in (32, 64):
        g = Grid(2, 4.0, n)
        x, y = g.coords()
        r2 = np.broadcast_to(x**2 + y**2, g.shape)
        blob = np.exp(-r2)
        f = ScalarField(g, blob)
        exact_grad = VectorField.from_arrays(g, [-2.0 * x * blob, -2.0 * y * blob])
        diff = F.gradient(f) - exact_grad
        grad_errs.append(float(np.max(diff.magnitude()[g.interior(1)])))
        lap_diff = F.laplacian(f).values - (4.0 * r2 - 4.0) * blob
        lap_errs.append(float(np.max(np.abs(lap_diff[g.interior(1)]))))
    results["gradient_convergence_ratio"] = grad_errs[0] / grad_errs[1]
    checks.floor("gradient-order", grad_errs[0] / grad_errs[1], 3.5)
    results["laplacian_convergence_ratio"] = lap_errs[0] / lap_errs[1]
    checks.floor("laplacian-order", lap_errs[0] / lap_errs[1], 3.5)

    g = Grid(2, 4.0, 32)
    times = np.linspace(0.0, 1.0, 5)
    x, y = g.coords()
    series = TimeSeriesField(
        tuple(ScalarField(g, (0.5 + x + 0.0 * y) * (2.0 * t**2 - t + 1.0), float(t)) for t in times)
    )
    dt = F.time_derivative(series)
    worst_dt = 0.0
    for k, t in enumerate(times):
        exact = (0.5 + x + 0.0 * y) * (4.0 * t - 1.0)
        worst_dt = max(worst_dt, float(np.max(np.abs(dt.frames[k].values - exact))))
    results["time_derivative_quadratic_error"] = worst_dt
    checks.bound("time-derivative-exactness", worst_dt, 1e-12)

    u = X.solenoidal_gaussian(g)
    results["outer_symmetric"] = F.outer(u).symmetric
    checks.flag("outer-symmetry", F.outer(u).symmetric)

    lin = VectorField.from_arrays(
        g, [np.broadcast_to(1.0 + 2.0 * x + 3.0 * y, g.shape),
            np.broadcast_to(0.5 - x + 1.5 * y, g.shape)]
    )
    offset = np.array([0.37, -0.61])
    shifted = F.shifted_field(lin, offset)
    win = g.interior(int(np.ceil(np.max(np.abs(offset)) / g.spacing)) + 1)
    expect = [
        1.0 + 2.0 * (x - offset[0]) + 3.0 * (y - offset[1]),
        0.5 - (x - offset[0]) + 1.5 * (y - offset[1]),
    ]
    worst_shift = max(
        float(np.max(np.abs(shifted.components[c].values[win]
                            - np.broadcast_to(expect[c], g.shape)[win])))
        for c in range(2)
    )
    results["linear_shift_error"] = worst_shift
    checks.bound("shift-linear-exactness", worst_shift, 1e-12)

    blob = X.gaussian_scalar(g, width=1.2)
    h1 = F.lp_norm(blob * 3.0) / F.lp_norm(blob)
    results["norm_homogeneity"] = h1
    checks.bound("norm-homogeneity", abs(h1 - 3.0), 1e-12)
    wa = F.weighted_lp_norm(blob, 2.0, 1.0)
    wb = F.weighted_lp_norm(blob, 2.0, 2.0)
    checks.flag("weighted-norm-monotone", wb <= wa)

    q, grad_q = X.gradient_gaussian(g)
    discrete_curl = F.curl_sup(F.gradient(q))
    results["discrete_gradient_curl"] = discrete_curl
    checks.bound("gradient-curl-free", discrete_curl, 1e-11)

    pot = F.poincare_potential(grad_q, nodes=64)
    win = g.interior(2)
    diff = pot.values[win] - np.mean(pot.values[win]) - (q.values[win] - np.mean(q.values[win]))
    rel = float(np.max(np.abs(diff))) / float(np.max(np.abs(q.values)))
    results["poincare_reconstruction_rel"] = rel
    checks.bound("poincare-reconstruction", rel, 5e-2)

    return results, checks


def _suite_io(cfg: RunConfig, rng) -> tuple:
    import tempfile
    from pathlib import Path

    results = {}
    checks = CheckList()
    g2 = Grid(2, 3.0, 16)
    g3 = Grid(3, 2.0, 8)
    with tempfile.TemporaryDirectory() as tmp:
        base = Path(tmp)
        fields = [
            ScalarField(g2, rng.standard_normal(g2.shape)),
            VectorField.from_arrays(g3, list(rng.standard_normal((3,) + g3.shape)), time=0.25),
            X.gaussian_tensor(g2, seed=cfg.seed),
        ]
        exact = True
        for k, f in enumerate(fields):
            path = base / f"f{k}.fld"
            IO.write_field(path, f)
            back = IO.read_field(path)
            for a, b in zip(IO._payload_arrays(f), IO._payload_arrays(back)):
                exact = exact and bool(np.array_equal(a, b))
            exact = exact and back.grid == f.grid
        checks.flag("roundtrip-bit-exact", exact)

        series = TimeSeriesField(
            tuple(ScalarField(g2, rng.standard_normal(g2.shape), float(t)) for t in (0.0, 0.5, 1.25))
        )
        IO.write_series(base / "s.fld", series)
        back = IO.read_series(base / "s.fld")
        checks.flag(
            "series-roundtrip",
            len(back) == 3
            and np.array_equal(back.times, series.times)
            and all(np.array_equal(a.values, b.values) for a, b in zip(back.frames, series.frames)),
        )

        table = ScalarField(g2, rng.standard_normal(g2.shape))
        IO.write_kernel_table(base / "k.fld", table, kernel_id=3, index=(1, 0))
        tfield, kid, idx = IO.read_kernel_table(base / "k.fld", arity=2)
        checks.flag(
            "kernel-table-roundtrip",
            kid == 3 and idx == (1, 0) and np.array_equal(tfield.values, table.values),
        )

        junk = base / "bad.fld"
        junk.write_bytes(b"NOPE" + b"\x00" * 40)
        got_offset = None
        try:
            IO.read_field(junk)
        except FormatError as exc:
            got_offset = exc.offset
        checks.flag("malformed-rejected", got_offset is not None)

        truncated = base / "short.fld"
        good = base / "f0.fld"
        truncated.write_bytes(good.read_bytes()[:-17])
        ok_trunc = False
        try:
            IO.read_field(truncated)
        except FormatError as exc:
            ok_trunc = exc.offset is not None
        checks.flag("truncation-rejected", ok_trunc)
    results["io"] = "roundtrip suite"
    return results, checks


def _suite_oracle(cfg: RunConfig, rng) -> tuple:
    results = {}
    checks = CheckList()

    g = Grid(2, 4.0, 32)
    x, y = g.coords()
    k = np.pi / g.extent * np.array([3.0, 1.0])
    f = np.cos(k[0] * x + k[1] * y)
    zero = np.zeros(g.shape)
    h = TensorField.from_arrays(g, [[f, zero], [zero, zero]])
    exact = -(k[0] ** 2) / (k[0] ** 2 + k[1] ** 2) * f
    p = OR.spectral_pressure(h, enlargement=1)
    err = float(np.max(np.abs(p.values - np.mean(p.values) - (exact - np.mean(exact)))))
    results["single_mode_error"] = err
    checks.bound("spectral-single-mode", err, 1e-10)

    g = Grid(2, 2.0, 16)
    h = X.gaussian_tensor(g, seed=cfg.seed)
    probes = np.array([[0.25, -0.5], [0.75, 0.75], [-1.0, 0.25]])
    vals = {}
    for ovs in (1, 2, 4):
        res = OR.quadrature_conv(h.component(0, 0), 0, 0, probes, kind="near",
                                 spec=cfg.cutoff, oversample=ovs)
        vals[ovs] = res.values
    step1 = float(np.max(np.abs(vals[2] - vals[1])))
    step2 = float(np.max(np.abs(vals[4] - vals[2])))
    scale = max(float(np.max(np.abs(vals[4]))), 1e-300)
    results["near_refinement_steps"] = [step1, step2]
    checks.flag("near-quadrature-contracting", step2 <= step1 + 1e-15)
    checks.bound("near-quadrature-settled", step2 / scale, 2e-2)

    res0 = OR.quadrature_conv(h.component(0, 1), 0, 1, np.zeros((1, 2)),
                              kind="far_corrected", spec=cfg.cutoff, oversample=1)
    results["far_corrected_at_origin"] = float(abs(res0.values[0]))
    checks.bound("far-corrected-origin", abs(res0.values[0]), 1e-14)

    return results, checks


def _suite_pressure(cfg: RunConfig, rng) -> tuple:
    results = {}
    checks = CheckList()
    spec_a = KK.CutoffSpec(1.0, 2.0)
    spec_b = KK.CutoffSpec(1.25, 2.25)

    g = Grid(2, 6.0, 48)
    u = X.solenoidal_gaussian(g, width=1.5)
    h = F.outer(u)
    p_a = PR.assemble_p_phi(u, spec=spec_a, workers=cfg.workers)
    scale = max(float(np.max(np.abs(p_a.values))), 1e-300)

    resid = PR.poisson_residual(p_a, h)
    results["poisson_residual_2d"] = resid
    checks.bound("poisson-residual-2d", resid, 0.1)

    p_b = PR.assemble_p_phi(u, spec=spec_b, workers=cfg.workers)
    diff = p_b.values - p_a.values
    const = PR.phi_change_constant(h, spec_a, spec_b)
    results["phi_change_std"] = float(np.std(diff))
    results["phi_change_mean_vs_const"] = float(abs(np.mean(diff) - const))
    checks.bound("phi-independence-constancy", float(np.std(diff)) / scale, 1e-12)
    checks.bound("phi-change-constant", abs(np.mean(diff) - const) / scale, 1e-12)

    far = PR.far_field_corrected(h.component(0, 0), 0, 0, spec_a)
    origin = (g.origin_index,) * 2
    results["corrected_far_at_origin"] = float(abs(far.values[origin]))
    checks.bound("corrected-far-origin", abs(far.values[origin]), 1e-15)

    hb = X.gaussian_tensor(g, seed=cfg.seed)
    pa = PR.assemble_from_tensor(h, spec_a, background="none")
    pb = PR.assemble_from_tensor(hb, spec_a, background="none")
    pab = PR.assemble_from_tensor(h + hb, spec_a, background="none")
    lin = float(np.max(np.abs(pab.values - pa.values - pb.values)))
    results["linearity_error"] = lin
    checks.bound("assembly-linearity", lin / scale, 1e-12)

    p0 = PR.assemble_p0(u, spec=spec_a, workers=cfg.workers)
    results["p0_minus_pphi_std"] = float(np.std(p0.values - p_a.values))
    checks.bound("p0-shift-constancy", float(np.std(p0.values - p_a.values)) / scale, 1e-12)

    const_tensor = TensorField.from_arrays(
        g, [[np.full(g.shape, 0.7), np.full(g.shape, -0.2)],
            [np.full(g.shape, -0.2), np.full(g.shape, 0.4)]]
    )
    p_const = PR.assemble_from_tensor(const_tensor, spec_a)
    results["constant_background_max"] = float(np.max(np.abs(p_const.values)))
    checks.bound("constant-data-vanishes", float(np.max(np.abs(p_const.values))), 1e-13)

    g3 = Grid(3, 4.0, 32)
    u3 = X.solenoidal_gaussian(g3, width=1.2)
    p3 = PR.assemble_p_phi(u3, spec=spec_a, workers=cfg.workers)
    resid3 = PR.poisson_residual(p3, F.outer(u3))
    results["poisson_residual_3d"] = resid3
    checks.bound("poisson-residual-3d", resid3, 0.2)

    return results, checks


def _suite_leray(cfg: RunConfig, rng) -> tuple:
    results = {}
    checks = CheckList()
    spec = cfg.cutoff
    g = Grid(2, 6.0, 48)

    psi = X.random_smooth_scalar(g, seed=cfg.seed)
    zero = np.zeros(g.shape)
    H_rot = TensorField.from_arrays(g, [[zero, psi.values], [-psi.values, zero]])
    parts = LR.leray_project(H_rot, spec)
    w_scale = max(float(np.max(parts.input_divergence.magnitude())), 1e-300)
    results["solenoidal_preserved"] = float(np.max(parts.gradient_part.magnitude())) / w_scale
    checks.bound("solenoidal-preserved", results["solenoidal_preserved"], 1e-12)
    checks.bound("hodge-reconstruction", parts.reconstruction_error() / w_scale, 1e-13)

    q = X.gaussian_scalar(g, width=1.5)
    H_diag = TensorField.from_arrays(g, [[q.values, zero], [zero, q.values]])
    parts2 = LR.leray_project(H_diag, spec)
    w2 = max(float(np.max(parts2.input_divergence.magnitude())), 1e-300)
    results["gradient_annihilated"] = float(np.max(parts2.solenoidal.magnitude())) / w2
    checks.bound("gradient-annihilated", results["gradient_annihilated"], 1e-12)

    times = np.linspace(0.0, 0.4, 3)
    u, _ = X.swirl_series(g, times)
    mns = LR.mns_residual(u, spec=spec, workers=cfg.workers)
    p_series = TimeSeriesField(
        tuple(PR.assemble_p_phi(u.frames[k], spec=spec, workers=cfg.workers) for k in range(len(u)))
    )
    ns = LR.ns_residual(u, p=p_series)
    worst = 0.0
    for k in range(len(u)):
        d = mns.frames[k] - ns.frames[k]
        worst = max(worst, float(np.max(d.magnitude())))
    u_scale = max(float(np.max(u.frames[0].magnitude())), 1e-300)
    results["mns_vs_ns_identity"] = worst / u_scale
    checks.bound("mild-vs-classical-identity", worst / u_scale, 1e-12)

    return results, checks


def _suite_galilean(cfg: RunConfig, rng) -> tuple:
    results = {}
    checks = CheckList()
    g = Grid(2, 6.0, 48)
    times = np.linspace(0.0, 1.0, 5)
    x, y = g.coords()

    lin_frames = tuple(
        VectorField.from_arrays(
            g,
            [0.3 + 1.2 * x - 0.4 * y + 0.1 * t, -0.7 + 0.5 * x + 0.9 * y - 0.2 * t],
            float(t),
        )
        for t in times
    )
    u = TimeSeriesField(lin_frames)
    gmat = np.stack([np.sin(times), 0.3 * np.cos(times)], axis=1)
    drift = GA.displacement(times, gmat)
    margin = drift.max_displacement() + 1e-9
    fwd = GA.galilean_transform(u, drift, margin)
    back = GA.galilean_transform(fwd, drift, margin, inverse=True)
    win = GA.valid_window(g, 2.0 * margin + g.spacing)
    worst = 0.0
    for k in range(len(u)):
        for c in range(2):
            d = back.frames[k].components[c].values[win] - u.frames[k].components[c].values[win]
            worst = max(worst, float(np.max(np.abs(d))))
    results["linear_round_trip"] = worst
    checks.bound("round-trip-linear", worst, 1e-10)

    zero_drift = GA.displacement(times, np.zeros((len(times), 2)))
    same = GA.galilean_transform(u, zero_drift, 0.5)
    ident = all(
        np.array_equal(same.frames[k].components[c].values, u.frames[k].components[c].values)
        for k in range(len(u))
        for c in range(2)
    )
    checks.flag("zero-drift-identity", ident)

    big = GA.displacement(times, np.full((len(times), 2), 4.0))
    raised = False
    try:
        GA.galilean_transform(u, big, 1.0)
    except WspError:
        raised = True
    checks.flag("margin-enforced", raised)
    results["margin_error_raised"] = raised

    return results, checks


def _suite_spaces(cfg: RunConfig, rng) -> tuple:
    results = {}
    checks = CheckList()
    g = Grid(2, 16.0, 256)

    blob = X.gaussian_scalar(g, width=1.5)
    r1 = SP.b_norm(blob * 3.0, 2.0, 1.0).value / SP.b_norm(blob, 2.0, 1.0).value
    results["homogeneity_ratio"] = r1
    checks.bound("norm-homogeneity", abs(r1 - 3.0), 1e-10)

    ones = ScalarField(g, np.ones(g.shape))
    rep_ones = SP.b_norm(ones, 2.0, 2.0)
    results["flat_norm"] = rep_ones.value
    checks.bound("flat-field-norm", abs(rep_ones.value - np.sqrt(np.pi)), 0.06)

    indicator = ScalarField(g, (g.radii() <= 1.0).astype(np.float64))
    rep_ball = SP.b_norm(indicator, 2.0, 1.0)
    results["ball_sup_radius"] = rep_ball.sup_radius
    checks.bound("ball-indicator-sup-radius", abs(rep_ball.sup_radius - 1.0), 1e-12)
    checks.flag("ball-indicator-decays", rep_ball.decay_flag)

    vals = [SP.b_norm(blob, 2.0, gam).value for gam in (0.5, 1.0, 1.5, 2.0)]
    results["gamma_monotone"] = vals
    checks.flag("gamma-monotonicity", all(b <= a + 1e-12 for a, b in zip(vals, vals[1:])))

    emb = SP.embedding_constants(blob, 2.0, 1.0, 3.0)
    results["embedding"] = emb
    checks.bound("embedding-r1", emb["r1"], emb["r1_bound"] * cfg.embedding_slack)
    checks.bound("embedding-r2", emb["r2"], emb["r2_bound"] * cfg.embedding_slack)

    border = ScalarField(g, (1.0 + g.radii()) ** ((1.5 - 2.0) / 2.0))
    split = SP.interpolation_split(border, 4.0, 2.0, 1.5, 3.0)
    recon = float(np.max(np.abs(split.f0.values + split.f1.values - border.values)))
    results["split_reconstruction"] = recon
    checks.bound("split-reconstruction", recon, 1e-15)
    checks.bound("split-ratio-c0", split.bound_ratios["c0"], 1.5)
    checks.bound("split-ratio-c1", split.bound_ratios["c1"], 1.5)

    As = np.geomspace(0.5, 16.0, 9)
    ks = np.array([SP.k_functional(border, A, 2.0, 1.5, 3.0) for A in As])
    slopes = np.diff(ks) / np.diff(As)
    concave = bool(np.all(np.diff(slopes) <= 1e-9 * max(abs(slopes[0]), 1.0)))
    nondecreasing = bool(np.all(np.diff(ks) >= -1e-12))
    results["k_values"] = ks
    checks.flag("k-concave", concave)
    checks.flag("k-nondecreasing", nondecreasing)
    lp = F.lp_norm(border, 2.0)
    wdelta = F.weighted_lp_norm(border, 2.0, 3.0)
    upper = min(lp, 4.0 * wdelta)
    checks.bound("k-upper-envelope", SP.k_functional(border, 4.0, 2.0, 1.5, 3.0), upper * (1 + 1e-12))

    return results, checks


_SUITES = {
    "kernels": _suite_kernels,
    "fields": _suite_fields,
    "io": _suite_io,
    "oracle": _suite_oracle,
    "pressure": _suite_pressure,
    "leray": _suite_leray,
    "galilean": _suite_galilean,
    "spaces": _suite_spaces,
}
_SUITE_ORDER = ["kernels", "fields", "io", "oracle", "pressure", "leray", "galilean", "spaces"]


def run_verify(args, cfg: RunConfig) -> int:
    names = _SUITE_ORDER if args.suite == "all" else [args.suite]
    results = {}
    checks = CheckList()
    for name in names:
        rng = np.random.default_rng(cfg.seed)
        sub_results, sub_checks = _SUITES[name](cfg, rng)
        results[name] = sub_results
        checks.extend(sub_checks, prefix=name)
    return emit(args, "verify", cfg, results, checks)


# ---------------------------------------------------------------------------
# gen-fixture

def run_gen_fixture(args, cfg: RunConfig) -> int:
    g = cfg.grid()
    times = np.linspace(args.t0, args.t1, args.frames)
    kind = args.kind
    checks = CheckList()
    results = {"kind": kind, "frames": args.frames}

    if kind == "drift":
        gmat = np.stack(
            [args.amplitude * np.sin(times)] + [np.zeros_like(times)] * (cfg.dim - 1), axis=1
        )
        header = "t," + ",".join(f"g{c + 1}" for c in range(cfg.dim))
        np.savetxt(
            args.out,
            np.column_stack([times, gmat]),
            delimiter=",",
            header=header,
            comments="# ",
        )
        checks.flag("written", True)
        return emit(args, "gen-fixture", cfg, results, checks)

    if kind == "swirl" or kind == "swirl-pressure":
        if cfg.dim != 2:
            raise ParameterError("the exact swirl solution is two-dimensional")
        u, p = X.swirl_series(g, times, a0=args.amplitude)
        IO.write_series(args.out, u if kind == "swirl" else p)
    elif kind == "vortex":
        IO.write_series(
            args.out,
            TimeSeriesField(
                tuple(X.solenoidal_gaussian(g, width=args.width, amplitude=args.amplitude, time=float(t)) for t in times)
            ),
        )
    elif kind == "gradient":
        _, grad = X.gradient_gaussian(g, width=args.width, amplitude=args.amplitude)
        IO.write_series(
            args.out, TimeSeriesField(tuple(_stamp(grad, float(t)) for t in times))
        )
    elif kind == "blob":
        IO.write_series(
            args.out,
            TimeSeriesField(
                tuple(X.gaussian_scalar(g, width=args.width, amplitude=args.amplitude, time=float(t)) for t in times)
            ),
        )
    elif kind == "tensor":
        IO.write_series(
            args.out,
            TimeSeriesField(
                tuple(_stamp(X.gaussian_tensor(g, seed=cfg.seed, amplitude=args.amplitude), float(t)) for t in times)
            ),
        )
    else:
        raise ParameterError(f"unknown fixture kind {kind!r}")
    checks.flag("written", True)
    return emit(args, "gen-fixture", cfg, results, checks)


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wsp",
        description="Whole-space pressure toolkit: split-kernel pressure, Leray "
        "projection, drift extraction, local norms, and verification suites.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--workers", type=int, help="worker threads (WSP_WORKERS overrides)")
        p.add_argument("--report", help="write a JSON report here")

    p = sub.add_parser("pressure", help="assemble the pressure of a velocity series")
    p.add_argument("--input", required=True, help="velocity series (FLD1)")
    p.add_argument("--forcing", help="forcing tensor series (FLD1)")
    p.add_argument("--r0", type=float, help="cutoff plateau radius")
    p.add_argument("--r1", type=float, help="cutoff support radius")
    p.add_argument("--mode", choices=("phi", "p0"), help="far-field normalization")
    p.add_argument("--out", help="write the pressure series here")
    common(p)
    p.set_defaults(func=run_pressure)

    p = sub.add_parser("project", help="Leray projection of a tensor divergence")
    p.add_argument("--tensor", required=True, help="tensor field (FLD1)")
    p.add_argument("--out", help="write the solenoidal part here")
    common(p)
    p.set_defaults(func=run_project)

    p = sub.add_parser("galilean", help="change of frame along a drift curve")
    p.add_argument("--input", required=True, help="velocity series (FLD1)")
    p.add_argument("--drift", required=True, help="csv with columns t,g1..gd")
    p.add_argument("--inverse", action="store_true", help="apply the inverse map")
    p.add_argument("--order", type=int, choices=(1, 3), default=1, help="interpolation order")
    p.add_argument("--margin", type=float, help="shift margin (default: max displacement)")
    p.add_argument("--out", help="write the transformed series here")
    common(p)
    p.set_defaults(func=run_galilean)

    p = sub.add_parser("norms", help="ball-sup norm report of a field")
    p.add_argument("--input", required=True, help="field (FLD1)")
    p.add_argument("--p", type=float, required=True, help="integrability exponent")
    p.add_argument("--gamma", type=float, required=True, help="ball growth exponent")
    p.add_argument("--delta", type=float, help="outer weight exponent (adds embeddings)")
    common(p)
    p.set_defaults(func=run_norms)

    p = sub.add_parser("suitability", help="local energy pairing over the test battery")
    p.add_argument("--input", required=True, help="velocity series (FLD1)")
    p.add_argument("--pressure", required=True, help="pressure series (FLD1)")
    p.add_argument("--forcing", help="forcing tensor series (FLD1)")
    p.add_argument("--battery-seed", type=int, default=7, help="battery RNG seed")
    common(p)
    p.set_defaults(func=run_suitability)

    p = sub.add_parser("oracle-compare", help="fast path vs the spectral oracle")
    p.add_argument("--op", choices=("pressure", "project"), required=True)
    p.add_argument("--input", required=True, help="tensor field (FLD1)")
    p.add_argument("--enlargement", type=int, default=2, help="oracle box enlargement")
    common(p)
    p.set_defaults(func=run_oracle_compare)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument(
        "--suite", choices=tuple(_SUITE_ORDER) + ("all",), default="all", help="which suite"
    )
    p.add_argument("--seed", type=int, help="suite RNG seed")
    common(p)
    p.set_defaults(func=run_verify)

    p = sub.add_parser("gen-fixture", help="emit a manufactured field")
    p.add_argument(
        "--kind",
        required=True,
        choices=("swirl", "swirl-pressure", "vortex", "gradient", "blob", "tensor", "drift"),
    )
    p.add_argument("--out", required=True, help="output path (FLD1, or csv for drift)")
    p.add_argument("--dim", type=int, help="dimension (2 or 3)")
    p.add_argument("--n", type=int, help="nodes per axis")
    p.add_argument("--l", type=float, help="box half-width")
    p.add_argument("--seed", type=int, help="fixture RNG seed")
    p.add_argument("--frames", type=int, default=1, help="number of frames")
    p.add_argument("--t0", type=float, default=0.0, help="first frame time")
    p.add_argument("--t1", type=float, default=1.0, help="last frame time")
    p.add_argument("--width", type=float, default=1.5, help="profile width")
    p.add_argument("--amplitude", type=float, default=1.0, help="profile amplitude")
    common(p)
    p.set_defaults(func=run_gen_fixture)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        return args.func(args, cfg)
    except WspError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
