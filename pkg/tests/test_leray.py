"""Tests for the Hodge projection, momentum residuals, and suitability pairing."""

import numpy as np
import pytest

import wsp.fields as fields
import wsp.fixtures as fixtures
import wsp.leray as leray
from wsp.errors import ParameterError
from wsp.fields import Grid, ScalarField, TensorField, TimeSeriesField


def tensor_from_arrays(grid, rows):
    comps = tuple(
        tuple(ScalarField(grid, np.asarray(a, dtype=float)) for a in row)
        for row in rows
    )
    return TensorField(grid, comps)


def test_antisymmetric_input_passes_through():
    grid = Grid(2, 6.0, 48)
    psi = fixtures.bump_scalar(grid, radius=1.5).values
    zero = np.zeros_like(psi)
    H = tensor_from_arrays(grid, [[zero, psi], [-psi, zero]])
    parts = leray.leray_project(H)
    assert np.max(np.abs(parts.potential.values)) == 0.0
    div = fields.tensor_divergence(H)
    for i in range(2):
        assert np.array_equal(
            parts.solenoidal.component(i).values, div.component(i).values
        )
        assert np.max(np.abs(parts.gradient_part.component(i).values)) == 0.0


def test_pure_gradient_input_is_annihilated():
    grid = Grid(2, 4.0, 64)
    q = fixtures.gaussian_scalar(grid, width=1.0)
    zero = np.zeros(grid.shape)
    H = tensor_from_arrays(grid, [[q.values, zero], [zero, q.values]])
    parts = leray.leray_project(H)
    leak = max(
        np.max(np.abs(parts.solenoidal.component(i).values)) for i in range(2)
    )
    assert leak <= 1e-12
    diff = parts.potential.values - q.values
    diff -= np.mean(diff)
    assert np.max(np.abs(diff)) <= 1e-12 * np.max(np.abs(q.values))


def test_hodge_reconstruction_is_exact():
    grid = Grid(2, 6.0, 48)
    u = fixtures.solenoidal_gaussian(grid, width=1.5)
    parts = leray.leray_project(fields.outer(u))
    assert parts.reconstruction_error() <= 1e-15


def test_projection_is_idempotent():
    grid = Grid(2, 6.0, 48)
    H = fields.outer(fixtures.solenoidal_gaussian(grid, width=1.5))
    first = leray.leray_project(H)
    rows = [
        [
            H.component(i, j).values - (first.potential.values if i == j else 0.0)
            for j in range(2)
        ]
        for i in range(2)
    ]
    second = leray.leray_project(tensor_from_arrays(grid, rows))
    resid = max(
        np.max(np.abs(second.gradient_part.component(i).values)) for i in range(2)
    )
    scale = max(
        np.max(np.abs(second.input_divergence.component(i).values)) for i in range(2)
    )
    assert resid <= 1e-10 * scale


def test_projected_divergence_second_order():
    sups = {}
    for n in (64, 128):
        grid = Grid(2, 4.0, n)
        u = fixtures.solenoidal_gaussian(grid, width=1.0)
        parts = leray.leray_project(fields.outer(u))
        div = fields.divergence(parts.solenoidal)
        m = n // 8
        sups[n] = float(np.max(np.abs(div.values[m:-m, m:-m])))
    assert sups[64] / sups[128] >= 3.0


@pytest.fixture(scope="module")
def swirl_17():
    grid = Grid(2, 4.0, 48)
    times = np.linspace(0.0, 0.8, 17)
    u, p = fixtures.swirl_series(grid, times)
    return grid, times, u, p


def test_momentum_residual_small_on_exact_solution(swirl_17):
    grid, times, u, p = swirl_17
    res = leray.ns_residual(u, p=p)
    sl = (slice(None), slice(2, -2), slice(2, -2))
    sup = max(float(np.max(np.abs(fr.array()[sl]))) for fr in res.frames)
    h = grid.spacing
    dt = times[1] - times[0]
    assert sup <= 1.0 * (h * h + dt * dt)


def test_momentum_residual_ignores_pressure_constant(swirl_17):
    grid, times, u, p = swirl_17
    shifted = TimeSeriesField(
        tuple(ScalarField(grid, fr.values + 5.0, fr.time) for fr in p.frames)
    )
    r1 = leray.ns_residual(u, p=p)
    r2 = leray.ns_residual(u, p=shifted)
    gap = max(
        float(np.max(np.abs(r1.frames[k].array() - r2.frames[k].array())))
        for k in range(len(times))
    )
    assert gap <= 1e-12


def test_projected_residual_matches_pressure_residual(swirl_17):
    import wsp.pressure as pressure

    grid, times, u, p = swirl_17
    mns = leray.mns_residual(u)
    assembled = TimeSeriesField(
        tuple(pressure.assemble_p_phi(u.frames[k]) for k in range(len(times)))
    )
    ns = leray.ns_residual(u, p=assembled)
    gap = max(
        float(np.max(np.abs(mns.frames[k].array() - ns.frames[k].array())))
        for k in range(len(times))
    )
    assert gap <= 1e-12


def test_battery_is_reproducible(swirl_17):
    grid, times, _, _ = swirl_17
    a = leray.build_battery(grid, times, seed=0)
    b = leray.build_battery(grid, times, seed=0)
    assert len(a) == 28
    labels = [lbl for lbl, _ in a]
    assert len(set(labels)) == 28
    assert labels[:3] == ["scale-0", "scale-1", "scale-2"]
    for (la, fa), (lb, fb) in zip(a, b):
        assert la == lb
        for k in range(len(times)):
            assert np.array_equal(fa.frames[k].values, fb.frames[k].values)
    c = leray.build_battery(grid, times, seed=1)
    changed = any(
        not np.array_equal(fa.frames[k].values, fc.frames[k].values)
        for (_, fa), (_, fc) in zip(a, c)
        for k in range(len(times))
    )
    assert changed


def test_test_function_window_validation(swirl_17):
    grid, times, _, _ = swirl_17
    with pytest.raises(ParameterError):
        leray.make_test_function(grid, times, (0.0, 0.0), 1.0, (0.5, 0.5))


def test_suitability_input_validation(swirl_17):
    grid, times, u, p = swirl_17
    good = leray.make_test_function(grid, times, (0.0, 0.0), 1.0, (0.2, 0.6))
    with pytest.raises(ParameterError):
        leray.suitability_residual(u, p)
    with pytest.raises(ParameterError):
        leray.suitability_residual(u, p, testfn=good.map(lambda f: f * -1.0))
    with pytest.raises(ParameterError):
        leray.suitability_residual(u, p, testfn=good.map(lambda f: f * 0.0))
    touching = leray.make_test_function(grid, times, (0.0, 0.0), 6.0, (0.2, 0.6))
    with pytest.raises(ParameterError):
        leray.suitability_residual(u, p, testfn=touching)
    endpoints = TimeSeriesField(
        tuple(
            ScalarField(grid, good.frames[len(times) // 2].values, fr.time)
            for fr in good.frames
        )
    )
    with pytest.raises(ParameterError):
        leray.suitability_residual(u, p, testfn=endpoints)


def test_suitability_battery_on_exact_solution():
    grid = Grid(2, 6.0, 64)
    times = np.linspace(0.0, 0.8, 33)
    u, p = fixtures.swirl_series(grid, times)
    battery = leray.build_battery(grid, times, seed=0)
    mus = []
    for label, testfn in battery:
        rep = leray.suitability_residual(u, p, testfn=testfn, label=label)
        assert rep.suitable, f"{label}: mu={rep.mu_value:.3e} tol={rep.tol:.3e}"
        assert rep.balance_residual == 0.0
        assert rep.support_radius <= grid.extent
        assert times[0] <= rep.time_window[0] <= rep.time_window[1] <= times[-1]
        mus.append(rep.mu_value)
    h = grid.spacing
    dt = times[1] - times[0]
    worst = float(np.max(np.abs(mus)))
    assert worst <= h * h + dt * dt
    assert worst == pytest.approx(1.710381e-2, rel=1e-4)


def test_suitability_pairing_is_linear(swirl_17):
    _, times, u, p = swirl_17
    grid = u.grid
    testfn = leray.make_test_function(grid, times, (0.3, -0.2), 1.2, (0.15, 0.65))
    r1 = leray.suitability_residual(u, p, testfn=testfn)
    r2 = leray.suitability_residual(u, p, testfn=testfn.map(lambda f: f * 2.0))
    assert abs(r2.mu_value - 2.0 * r1.mu_value) <= 1e-12
