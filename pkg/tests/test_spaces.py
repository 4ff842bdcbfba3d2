"""Tests for ball-sup norms, embedding constants, and the interpolation split."""

import numpy as np
import pytest

import wsp.fixtures as fixtures
import wsp.spaces as spaces
from wsp.errors import ParameterError
from wsp.fields import Grid, ScalarField

P, GAMMA, DELTA = 2.0, 1.0, 2.5


@pytest.fixture(scope="module")
def grid256():
    return Grid(2, 16.0, 256)


@pytest.fixture(scope="module")
def radii(grid256):
    xs, ys = np.broadcast_arrays(*grid256.coords())
    return np.sqrt(xs**2 + ys**2)


@pytest.fixture(scope="module")
def family(grid256):
    return fixtures.morrey_family(grid256, P, GAMMA)


def test_radius_set_layout(grid256):
    rs = spaces.radius_set(grid256)
    assert rs[0] == 1.0
    assert rs[-1] == grid256.extent
    assert np.all(np.diff(rs) > 0)
    with pytest.raises(ParameterError):
        spaces.radius_set(Grid(2, 0.5, 8))


def test_norm_of_constant_matches_area_rate(grid256):
    # gamma = d and p = 2: every ball gives (pi R^2 / R^2)^(1/2) = sqrt(pi)
    one = ScalarField(grid256, np.ones(grid256.shape))
    rep = spaces.b_norm(one, p=2.0, gamma=2.0)
    assert rep.value == pytest.approx(np.sqrt(np.pi), rel=3e-2)
    assert not rep.decay_flag


def test_norm_homogeneity(grid256):
    f = fixtures.gaussian_scalar(grid256, width=2.0)
    v1 = spaces.b_norm(f, p=P, gamma=GAMMA).value
    v3 = spaces.b_norm(ScalarField(grid256, 3.0 * f.values), p=P, gamma=GAMMA).value
    assert v3 == pytest.approx(3.0 * v1, rel=1e-10)


def test_norm_decreasing_in_gamma(grid256):
    f = fixtures.gaussian_scalar(grid256, width=2.0)
    values = [spaces.b_norm(f, p=P, gamma=gm).value for gm in (0.5, 1.0, 1.5)]
    assert values[0] > values[1] > values[2]


def test_ball_indicator_sup_radius(grid256, radii):
    ind = ScalarField(grid256, (radii <= 1.0).astype(float))
    rep = spaces.b_norm(ind, p=P, gamma=GAMMA)
    assert rep.sup_radius == 1.0


def test_indicator_embedding_ratio_regression(grid256, radii):
    ind = ScalarField(grid256, (radii <= 1.0).astype(float))
    cons = spaces.embedding_constants(ind, P, GAMMA, DELTA)
    assert cons["r1"] == pytest.approx(1.27401620072899, rel=1e-6)


def test_decay_flag(grid256, radii):
    fast = fixtures.gaussian_scalar(grid256, width=1.0)
    assert spaces.b_norm(fast, p=P, gamma=GAMMA).decay_flag
    borderline = ScalarField(grid256, (1.0 + radii) ** (-0.5))
    assert not spaces.b_norm(borderline, p=P, gamma=GAMMA).decay_flag


def test_parameter_validation(grid256):
    f = fixtures.gaussian_scalar(grid256, width=2.0)
    with pytest.raises(ParameterError):
        spaces.b_norm(f, p=0.5, gamma=GAMMA)
    with pytest.raises(ParameterError):
        spaces.b_norm(f, p=P, gamma=-0.1)
    with pytest.raises(ParameterError):
        spaces.b_norm(f, p=P, gamma=GAMMA, delta=0.5)
    with pytest.raises(ParameterError):
        spaces.k_functional(f, -1.0, P, GAMMA, DELTA)
    with pytest.raises(ParameterError):
        spaces.interpolation_split(f, 0.0, P, GAMMA, DELTA)


def test_embedding_chain_on_family(grid256, family):
    bounds = spaces.embedding_bounds(P, GAMMA, DELTA)
    for f in family:
        cons = spaces.embedding_constants(f, P, GAMMA, DELTA)
        assert not cons["undefined"]
        assert cons["r1"] <= bounds["r1_bound"] * 1.05
        assert cons["r2"] <= bounds["r2_bound"] * 1.05


def test_second_ratio_decreasing_in_delta(grid256, family):
    f = family[0]
    values = [
        spaces.embedding_constants(f, P, GAMMA, GAMMA + step)["r2"]
        for step in (0.5, 1.0, 2.0)
    ]
    assert values[0] > values[1] > values[2]


def test_split_ratios_stable_on_borderline_profile(grid256, radii):
    f = ScalarField(grid256, (1.0 + radii) ** ((GAMMA - 2.0) / P))
    c0s, c1s = [], []
    for A in (2.0, 4.0, 8.0, 16.0):
        sp = spaces.interpolation_split(f, A, P, GAMMA, DELTA)
        assert sp.R == pytest.approx(A ** (P / DELTA))
        c0s.append(sp.bound_ratios["c0"])
        c1s.append(sp.bound_ratios["c1"])
    for cs in (c0s, c1s):
        mean = np.mean(cs)
        for c in cs:
            assert abs(c / mean - 1.0) <= 0.20


def test_split_reconstruction_and_small_a(grid256, family):
    f = family[0]
    sp = spaces.interpolation_split(f, 4.0, P, GAMMA, DELTA)
    recon = sp.f0.values + sp.f1.values
    assert np.array_equal(recon, f.values)
    for A in (0.5, 1.0):
        low = spaces.interpolation_split(f, A, P, GAMMA, DELTA)
        assert low.norm_f0_p == 0.0
        assert np.max(np.abs(low.f0.values)) == 0.0


def test_split_of_zero_field_flags_undefined(grid256):
    zero = ScalarField(grid256, np.zeros(grid256.shape))
    sp = spaces.interpolation_split(zero, 2.0, P, GAMMA, DELTA)
    assert sp.bound_ratios["undefined"]


def test_k_functional_zero_field(grid256):
    zero = ScalarField(grid256, np.zeros(grid256.shape))
    for A in (1.0, 4.0):
        assert spaces.k_functional(zero, A, P, GAMMA, DELTA) == 0.0


def test_k_functional_monotone_concave(grid256, radii):
    f = ScalarField(grid256, (1.0 + radii) ** (-0.5))
    A_values = np.array([0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0])
    K = np.array([spaces.k_functional(f, A, P, GAMMA, DELTA) for A in A_values])
    assert np.all(np.diff(K) >= -1e-12)
    slopes = np.diff(K) / np.diff(A_values)
    assert np.all(np.diff(slopes) <= 1e-12)


def test_k_functional_comparable_to_ball_norm(grid256, family):
    A_values = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0)
    for f in family:
        b = spaces.b_norm(f, p=P, gamma=GAMMA).value
        sup = max(
            spaces.k_functional(f, A, P, GAMMA, DELTA) * A ** (-GAMMA / DELTA)
            for A in A_values
        )
        assert 0.5 <= sup / b <= 2.0
