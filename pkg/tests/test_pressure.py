"""Tests for the split-kernel pressure assembly."""

import warnings

import numpy as np
import pytest

import wsp.fields as fields
import wsp.fixtures as fixtures
import wsp.kernels as kernels
import wsp.oracle as oracle
import wsp.pressure as pressure
from wsp.errors import (
    DecompositionWarning,
    NotAGradientError,
    RegimeWarning,
    ResolutionError,
)
from wsp.fields import Grid, ScalarField, TensorField, TimeSeriesField, VectorField


def tensor_from_arrays(grid, rows):
    comps = tuple(
        tuple(ScalarField(grid, np.asarray(a, dtype=float)) for a in row)
        for row in rows
    )
    return TensorField(grid, comps)


@pytest.fixture(scope="module")
def stress_48():
    grid = Grid(2, 6.0, 48)
    u = fixtures.solenoidal_gaussian(grid, width=1.5)
    return grid, fields.outer(u)


def test_constant_tensor_pressure_vanishes(stress_48):
    grid, _ = stress_48
    ones = np.ones((48, 48))
    h = tensor_from_arrays(grid, [[0.7 * ones, -0.2 * ones], [-0.2 * ones, 0.4 * ones]])
    p = pressure.assemble_from_tensor(h)
    assert np.max(np.abs(p.values)) <= 1e-15


def test_antisymmetric_tensor_pressure_vanishes(stress_48):
    grid, _ = stress_48
    psi = fixtures.bump_scalar(grid, radius=1.5).values
    zero = np.zeros_like(psi)
    p = pressure.assemble_from_tensor(tensor_from_arrays(grid, [[zero, psi], [-psi, zero]]))
    assert np.max(np.abs(p.values)) <= 1e-15


def test_assembly_linear_without_background(stress_48):
    grid, h1 = stress_48
    h2 = fields.outer(fixtures.solenoidal_gaussian(grid, width=1.0, amplitude=0.7))
    p1 = pressure.assemble_from_tensor(h1, background="none")
    p2 = pressure.assemble_from_tensor(h2, background="none")
    p12 = pressure.assemble_from_tensor(h1 + h2, background="none")
    gap = np.max(np.abs(p12.values - p1.values - p2.values))
    assert gap <= 1e-12


def test_cutoff_change_shifts_by_constant(stress_48):
    _, h = stress_48
    spec_a = kernels.CutoffSpec(1.0, 2.0)
    spec_b = kernels.CutoffSpec(1.25, 2.25)
    pa = pressure.assemble_from_tensor(h, spec=spec_a)
    pb = pressure.assemble_from_tensor(h, spec=spec_b)
    diff = pa.values - pb.values
    scale = np.max(np.abs(pa.values))
    assert np.std(diff) <= 1e-12 * scale


def test_cutoff_change_constant_matches_lattice_sum(stress_48):
    _, h = stress_48
    spec_a = kernels.CutoffSpec(1.0, 2.0)
    spec_b = kernels.CutoffSpec(1.25, 2.25)
    pa = pressure.assemble_from_tensor(h, spec=spec_a)
    pb = pressure.assemble_from_tensor(h, spec=spec_b)
    c = pressure.phi_change_constant(h, spec_a, spec_b)
    assert abs(float(np.mean(pb.values - pa.values)) - c) <= 1e-8


def test_poisson_residual_second_order():
    residuals = {}
    for n in (32, 64):
        grid = Grid(2, 4.0, n)
        u = fixtures.solenoidal_gaussian(grid, width=1.0)
        h = fields.outer(u)
        p = pressure.assemble_p_phi(u)
        residuals[n] = pressure.poisson_residual(p, h, ring=2)
    assert residuals[64] == pytest.approx(1.317622e-2, rel=1e-4)
    assert residuals[32] / residuals[64] >= 3.0


def test_poisson_residual_three_dimensional():
    grid = Grid(3, 2.0, 32)
    u = fixtures.solenoidal_gaussian(grid, width=0.8)
    h = fields.outer(u)
    p = pressure.assemble_p_phi(u, spec=kernels.CutoffSpec(0.5, 1.0))
    assert pressure.poisson_residual(p, h, ring=2) <= 3e-2


def test_gradient_matches_spectral_oracle():
    grid = Grid(2, 4.0, 64)
    u = fixtures.solenoidal_gaussian(grid, width=1.0)
    h = fields.outer(u)
    p = pressure.assemble_p_phi(u)
    ref = oracle.spectral_pressure_gradient(h, enlargement=2)
    report = oracle.compare_fields(fields.gradient(p), ref, ring=2)
    assert report["rel_l2"] <= 5e-2


def test_plain_and_corrected_gradients_agree():
    grid = Grid(2, 4.0, 48)
    u = fixtures.solenoidal_gaussian(grid, width=1.0)
    p_phi = pressure.assemble_p_phi(u)
    p0 = pressure.assemble_p0(u)
    diff = p_phi.values - p0.values
    assert np.std(diff) <= 1e-12 * max(np.max(np.abs(p_phi.values)), 1e-30)
    grad_phi = fields.gradient(p_phi)
    grad0 = fields.gradient(p0)
    for i in range(2):
        gap = np.max(np.abs(grad_phi.component(i).values - grad0.component(i).values))
        assert gap <= 1e-12


def test_near_field_resolution_guard(stress_48):
    _, h = stress_48
    with pytest.raises(ResolutionError):
        pressure.assemble_from_tensor(h, spec=kernels.CutoffSpec(0.5, 1.0))


def test_slow_decay_plain_far_field_warns(stress_48):
    _, h = stress_48
    with pytest.warns(RegimeWarning):
        pressure.far_field_plain(h.component(0, 0), 0, 0, decay_class="slow")


def test_tail_bound_scales_with_amplitude(stress_48):
    _, h = stress_48
    b1 = pressure.truncation_tail_bound(h)
    b3 = pressure.truncation_tail_bound(h * 3.0)
    assert b1 > 0.0
    assert b3 == pytest.approx(3.0 * b1, rel=1e-12)


def test_heat_normalization_slope(stress_48):
    _, h = stress_48
    report = pressure.heat_normalization(h, taus=(4.0, 16.0, 64.0))
    assert report.slope == pytest.approx(-1.5, abs=0.15)
    assert np.all(np.diff(report.max_abs) < 0.0)


def test_worker_count_does_not_change_values(stress_48):
    _, h = stress_48
    p1 = pressure.assemble_from_tensor(h, workers=1)
    p2 = pressure.assemble_from_tensor(h, workers=2)
    assert np.array_equal(p1.values, p2.values)


def _drift_series():
    grid = Grid(2, 4.0, 32)
    times = (0.0, 0.5, 1.0)
    rates = {0.0: (0.3, -0.2), 0.5: (0.1, 0.4), 1.0: (-0.5, 0.0)}
    u_frames, s_frames = [], []
    for t in times:
        u = fixtures.solenoidal_gaussian(grid, width=1.0, time=t)
        grad = fields.gradient(pressure.assemble_p_phi(u))
        comps = tuple(
            ScalarField(grid, grad.component(i).values + rates[t][i], time=t)
            for i in range(2)
        )
        u_frames.append(u)
        s_frames.append(VectorField(grid, comps))
    source = TimeSeriesField(tuple(s_frames))
    velocity = TimeSeriesField(tuple(u_frames))
    return grid, times, rates, source, velocity


def test_decompose_source_recovers_drift_rate():
    _, times, rates, source, velocity = _drift_series()
    dec = pressure.decompose_source(source, velocity)
    for k, t in enumerate(times):
        for i in range(2):
            assert dec.dtg[k][i] == pytest.approx(rates[t][i], abs=1e-13)
    assert np.max(dec.dispersion) <= 1e-12
    assert dec.curl_sup <= 1e-12
    # trapezoid integrals with g(0) = E(0) = 0
    assert dec.g[1][0] == pytest.approx(0.1, abs=1e-13)
    assert dec.g[2][0] == pytest.approx(0.0, abs=1e-13)
    assert dec.displacement[1][0] == pytest.approx(0.025, abs=1e-13)
    assert dec.displacement[2][0] == pytest.approx(0.05, abs=1e-13)


def test_decompose_source_rejects_rotational():
    grid, times, _, _, velocity = _drift_series()
    rot = fixtures.solenoidal_gaussian(grid, width=1.0)
    frames = tuple(
        VectorField(
            grid,
            tuple(ScalarField(grid, rot.component(i).values, time=t) for i in range(2)),
        )
        for t in times
    )
    with pytest.raises(NotAGradientError):
        pressure.decompose_source(TimeSeriesField(frames), velocity)


def test_decompose_source_warns_on_dispersion():
    grid, times, _, source, velocity = _drift_series()
    extra = fields.gradient(fixtures.gaussian_scalar(grid, width=0.8, amplitude=2.0))
    frames = tuple(
        VectorField(
            grid,
            tuple(
                ScalarField(
                    grid,
                    source.frames[k].component(i).values + extra.component(i).values,
                    time=times[k],
                )
                for i in range(2)
            ),
        )
        for k in range(len(times))
    )
    with pytest.warns(DecompositionWarning):
        pressure.decompose_source(TimeSeriesField(frames), velocity)
