import numpy as np
import pytest

import wsp.fields as F
import wsp.fixtures as X
import wsp.kernels as KK
import wsp.oracle as OR
import wsp.pressure as PR
from wsp.errors import ParameterError
from wsp.fields import Grid, ScalarField, TensorField

SPEC = KK.CutoffSpec(0.4, 0.8)


def _single_mode(g):
    x, y = g.coords()
    k = np.pi / g.extent * np.array([3.0, 1.0])
    f = np.cos(k[0] * x + k[1] * y)
    zero = np.zeros(g.shape)
    h = TensorField.from_arrays(g, [[np.broadcast_to(f, g.shape), zero], [zero, zero]])
    exact = -(k[0] ** 2) / (k[0] ** 2 + k[1] ** 2) * np.broadcast_to(f, g.shape)
    return h, exact, k


def test_spectral_pressure_exact_on_single_mode():
    """Data periodic on the box: enlargement 1 recovers the mode amplitude."""
    g = Grid(2, 4.0, 32)
    h, exact, _ = _single_mode(g)
    p = OR.spectral_pressure(h, enlargement=1)
    err = np.max(np.abs((p.values - np.mean(p.values)) - (exact - np.mean(exact))))
    assert err < 1e-10


def test_spectral_gradient_exact_on_single_mode():
    g = Grid(2, 4.0, 32)
    h, exact, k = _single_mode(g)
    x, y = g.coords()
    arg = k[0] * x + k[1] * y
    amp = -(k[0] ** 2) / (k[0] ** 2 + k[1] ** 2)
    grad = OR.spectral_pressure_gradient(h, enlargement=1)
    assert np.max(np.abs(grad.component(0).values - amp * -k[0] * np.sin(arg))) < 1e-10
    assert np.max(np.abs(grad.component(1).values - amp * -k[1] * np.sin(arg))) < 1e-10


def test_spectral_enlargement_validation(grid2):
    h = X.gaussian_tensor(grid2, seed=0)
    with pytest.raises(ParameterError):
        OR.spectral_pressure(h, enlargement=0)
    with pytest.raises(ParameterError):
        OR.spectral_pressure(h, enlargement=1.5)


def test_near_quadrature_richardson_contracts():
    g = Grid(2, 2.0, 16)
    h = X.gaussian_tensor(g, seed=7)
    probes = np.array([[0.25, -0.5], [0.75, 0.75], [-1.0, 0.25]])
    vals = {
        ovs: OR.quadrature_conv(
            h.component(0, 0), 0, 0, probes, kind="near", spec=SPEC, oversample=ovs
        ).values
        for ovs in (1, 2, 4)
    }
    step1 = float(np.max(np.abs(vals[2] - vals[1])))
    step2 = float(np.max(np.abs(vals[4] - vals[2])))
    assert step2 <= step1 + 1e-15
    assert step2 / float(np.max(np.abs(vals[4]))) < 2e-2


def test_near_quadrature_agrees_with_fft_path():
    g = Grid(2, 4.0, 64)
    h = F.outer(X.solenoidal_gaussian(g)).component(0, 0)
    spec = KK.CutoffSpec(0.5, 1.0)
    fast = PR.near_field_conv(h, 0, 0, spec)
    # probe at lattice nodes so the comparison needs no interpolation
    idx = [(32, 32), (36, 28), (20, 40)]
    probes = np.array([[g.axis(0)[i], g.axis(1)[j]] for i, j in idx])
    direct = OR.quadrature_conv(h, 0, 0, probes, kind="near", spec=spec, oversample=4)
    fast_at = np.array([fast.values[i, j] for i, j in idx])
    scale = float(np.max(np.abs(fast_at)))
    assert float(np.max(np.abs(direct.values - fast_at))) < 2e-2 * scale


def test_far_plain_quadrature_matches_fft_at_nodes():
    """Same Riemann sum, different summation orders: near machine agreement."""
    g = Grid(2, 2.0, 16)
    h = X.gaussian_tensor(g, seed=3).component(0, 1)
    spec = KK.CutoffSpec(0.4, 0.8)
    fast = PR.far_field_plain(h, 0, 1, spec)
    idx = [(8, 8), (4, 12), (10, 3)]
    probes = np.array([[g.axis(0)[i], g.axis(1)[j]] for i, j in idx])
    direct = OR.quadrature_conv(h, 0, 1, probes, kind="far_plain", spec=spec)
    fast_at = np.array([fast.values[i, j] for i, j in idx])
    assert np.allclose(direct.values, fast_at, rtol=1e-10, atol=1e-13)


def test_far_corrected_vanishes_at_origin():
    g = Grid(2, 2.0, 16)
    h = X.gaussian_tensor(g, seed=5).component(0, 1)
    res = OR.quadrature_conv(h, 0, 1, np.zeros((1, 2)), kind="far_corrected", spec=SPEC)
    assert abs(res.values[0]) < 1e-14
    field = PR.far_field_corrected(h, 0, 1, SPEC)
    assert field.values[(g.origin_index,) * 2] == 0.0


def test_quadrature_conv_validation():
    g = Grid(2, 2.0, 16)
    h = X.gaussian_scalar(g)
    with pytest.raises(ParameterError):
        OR.quadrature_conv(h, 0, 0, np.zeros((1, 2)), oversample=3)
    with pytest.raises(ParameterError):
        OR.quadrature_conv(h, 0, 0, np.zeros((1, 2)), kind="sideways")


def test_compare_fields_scalar_ignores_constants(grid2):
    a = X.gaussian_scalar(grid2)
    b = ScalarField(grid2, a.values + 5.0)
    rep = OR.compare_fields(a, b)
    assert rep["rel_l2"] < 1e-12
    assert rep["max_abs"] < 1e-12


def test_compare_fields_vector_sees_constants(grid2):
    v = X.solenoidal_gaussian(grid2)
    w = F.VectorField.from_arrays(grid2, [v.component(0).values + 1.0, v.component(1).values])
    rep = OR.compare_fields(v, w)
    assert rep["max_abs"] >= 1.0


def test_heat_exact_factors_finite_at_center():
    P, Q = OR.heat_third_exact_factors(np.array([0.0, 1.0]), 2.0, 2)
    assert np.isfinite(P).all() and np.isfinite(Q).all()
    Pk, Qk = KK.heat_third_radial_factors(np.array([0.0]), 2.0, 2)
    assert P[0] == pytest.approx(Pk[0], rel=1e-12)
    assert Q[0] == pytest.approx(Qk[0], rel=1e-12)
