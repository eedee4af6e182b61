import math
from fractions import Fraction as F

import numpy as np
import pytest

from sawtorus.errors import DepthExceeded
from sawtorus.geometry import (NOT_APPLICABLE, PASS, CurveCache, big_gamma_bound, big_gamma_distances, curve_distances,
                               curve_length, distance_to_curve, distances_brute, gamma_curve, good_set_mask,
                               in_big_gamma, in_good_set, in_strip, lattice_representative, measure_estimate, n_tilde,
                               nm_threshold, sampled_distances, strip_bound, stretch_check, stretch_check_array,
                               tracking_bound, tracking_error, tracking_error_array)
from sawtorus.lattice import build_permutation
from sawtorus.rng import torus_points, uniform
from sawtorus.torus import TorusPoint, forward_array, inverse_array, spectral

ALPHAS = [F(1, 2), F(3, 2), F(1), F(-1, 20), F(0)]


def pushed_samples(alpha, p, count=10**4):
    """Sample points of gamma_0 carried through S^{-p} one point at a time."""
    pts = np.stack([np.zeros(count), (np.arange(count) + 0.5) / count], axis=-1)
    step = inverse_array if p > 0 else forward_array
    for _ in range(abs(p)):
        pts = step(alpha, pts)
    return pts


def polyline_length(pts, jump=0.05):
    d = np.diff(pts, axis=0)
    d -= np.round(d)
    h = np.hypot(d[:, 0], d[:, 1])
    return h[h < jump].sum()


def test_gamma_examples():
    g0 = gamma_curve(F(1, 2), 0)
    assert curve_length(g0) == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(g0.starts[:, 0], 0) and np.allclose(g0.ends[:, 0], 0)
    gm = gamma_curve(F(3, 2), -1)
    assert curve_length(gm) == pytest.approx(math.sqrt(2), abs=1e-12)
    assert np.allclose(gm.starts[:, 0], gm.starts[:, 1]) and np.allclose(gm.ends[:, 0], gm.ends[:, 1])
    cat = gamma_curve(1, 1)
    assert curve_length(cat) == pytest.approx(math.sqrt(5), abs=1e-12)
    d = cat.ends - cat.starts
    assert np.allclose(d[:, 0] * 2, -d[:, 1])  # every piece runs along (-1, 2)


def test_depth_limit():
    with pytest.raises(DepthExceeded):
        gamma_curve(F(1, 2), 9)
    with pytest.raises(DepthExceeded):
        gamma_curve(F(1, 2), 3, max_depth=2)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_length_bound(alpha):
    eta = spectral(alpha).eta
    for p in range(7):
        assert curve_length(gamma_curve(alpha, p)) <= eta ** p + 1e-9


@pytest.mark.parametrize("alpha", [F(3, 2), F(1, 2), F(-1, 20)])
@pytest.mark.parametrize("p", [1, 2, 3, 4, -2])
def test_construction_matches_pointwise_pushforward(alpha, p):
    c = gamma_curve(alpha, p)
    pts = pushed_samples(alpha, p)
    assert distances_brute(pts, c).max() < 1e-9
    assert curve_length(c) == pytest.approx(polyline_length(pts), rel=1e-2)


def test_pieces_are_short_and_inside_square():
    c = gamma_curve(F(3, 2), 4)
    assert np.all(np.abs(c.ends - c.starts) <= 0.5 + 1e-12)
    assert c.starts.min() >= -1e-12 and c.starts.max() <= 1 + 1e-12
    assert all(s.length <= math.sqrt(2) / 2 + 1e-12 for s in c.segments)


def test_distance_examples():
    g0 = gamma_curve(F(1, 2), 0)
    assert distance_to_curve(TorusPoint(0, 0.37), g0) == 0.0
    assert distance_to_curve(TorusPoint(0.3, 0.7), g0) == pytest.approx(0.3, abs=1e-15)
    assert distance_to_curve(TorusPoint(0.8, 0.7), g0) == pytest.approx(0.2, abs=1e-15)
    gm = gamma_curve(F(1, 2), -1)
    assert distance_to_curve(TorusPoint(0.5, 0.2), gm) == pytest.approx(0.3 / math.sqrt(2), abs=1e-12)


@pytest.mark.parametrize("alpha, p", [(F(3, 2), 3), (F(1, 2), 2), (F(-1, 20), 5), (F(3, 2), 0)])
def test_fast_distances_agree_with_brute_force(alpha, p):
    c = gamma_curve(alpha, p)
    pts = torus_points(21, 20000)
    assert np.array_equal(curve_distances(pts, c, cells=32), distances_brute(pts, c))


def test_strip_examples():
    g0 = gamma_curve(F(1, 2), 0)
    assert in_strip(TorusPoint(0, 0.5), g0, 0.0)
    assert not in_strip(TorusPoint(0.3, 0.7), g0, 0.25)
    assert in_strip(TorusPoint(0.3, 0.7), g0, 0.3)
    with pytest.raises(ValueError):
        in_strip(TorusPoint(0.3, 0.7), g0, -1)


def test_big_gamma_examples_and_monotonicity():
    curves = CurveCache(F(3, 2))
    assert in_big_gamma(TorusPoint(0, 0.2), F(3, 2), 3, 0.0, curves)
    x = TorusPoint(0.3, 0.7)
    assert in_big_gamma(x, F(3, 2), 1, 0.3, curves) == in_strip(x, curves[0], 0.3)
    pts = torus_points(8, 5000)
    d = [big_gamma_distances(pts, curves, n) for n in (1, 2, 3, 4)]
    for eps in (0.01, 0.05):
        for k in range(3):
            assert not ((d[k] <= eps) & ~(d[k + 1] <= eps)).any()
        assert not ((d[1] <= eps) & ~(d[1] <= 2 * eps)).any()
    with pytest.raises(ValueError):
        in_big_gamma(x, F(3, 2), 0, 0.1, curves)


def test_good_set_examples():
    curves = CurveCache(F(1, 2))
    # lattice point (0, 2)/8 lies on gamma_0
    assert not in_good_set(TorusPoint(0.01, 0.26), F(1, 2), 8, 2, 0.0, curves)
    # lattice point (4, 1)/8 is 0.5 from gamma_0, and gamma_1 is x1 - x2 in Z for alpha = 1/2... check by distance
    x = TorusPoint(F(1, 2), F(1, 8))
    far = min(distance_to_curve(x, curves[q]) for q in range(2))
    assert in_good_set(TorusPoint(0.49, 0.13), F(1, 2), 8, 2, far * 0.99, curves)
    assert not in_good_set(TorusPoint(0.49, 0.13), F(1, 2), 8, 2, far, curves)


@pytest.mark.parametrize("alpha, N, n", [(F(1, 2), 64, 2), (F(3, 2), 100, 3), (F(-1, 20), 37, 4)])
def test_good_set_sandwich(alpha, N, n):
    curves = CurveCache(alpha)
    pts = torus_points(3, 10**4)
    D = big_gamma_distances(pts, curves, n)
    slack = 1 / (math.sqrt(2) * N)
    for eps in (0.02, 0.05):
        good = good_set_mask(pts, curves, N, n, eps)
        assert not (~(D <= eps + slack) & ~good).any()
        assert not (good & (D <= eps - slack)).any()


def test_lattice_representative():
    assert np.allclose(lattice_representative(4, [[0.9, 0.1], [0.3, 0.6]]), [[0.0, 0.0], [0.25, 0.5]])


def test_n_tilde_and_threshold():
    assert n_tilde(F(-1, 2), 0) == pytest.approx(6.828427, abs=1e-6)
    assert n_tilde(F(-1, 2), 1) == pytest.approx(13.656854, abs=1e-6)
    for a in ALPHAS:
        assert n_tilde(a, 2) > n_tilde(a, 1) > n_tilde(a, 0)
        assert nm_threshold(a, 2, 0.1) >= n_tilde(a, 2)
        assert nm_threshold(a, 1, 0.05) >= nm_threshold(a, 1, 0.1)
    assert nm_threshold(F(-1, 2), 1, 0.1) == pytest.approx(51.213, abs=1e-3)
    with pytest.raises(ValueError):
        nm_threshold(F(1, 2), 1, 0)


def test_tracking_error_examples():
    N = 16
    for x in (TorusPoint(F(3, 10), F(7, 11)), TorusPoint(0.9, 0.01)):
        assert tracking_error(F(3, 2), N, x, 0)[0] <= 1 / (math.sqrt(2) * N) + 1e-15
    for alpha in (1, 2, -3):
        assert tracking_error(alpha, N, TorusPoint(F(5, N), F(11, N)), 5) == [0.0] * 6


def test_tracking_bound_on_good_points():
    alpha, n = F(1, 2), 2
    N = 256
    assert N > n_tilde(alpha, n)
    curves = CurveCache(alpha)
    pts = torus_points(5, 20000)
    good = pts[good_set_mask(pts, curves, N, n, n_tilde(alpha, n) / (2 * N))]
    assert len(good) > 1000
    err = tracking_error_array(alpha, N, good, n, build_permutation(alpha, N))
    for q in range(n + 1):
        assert err[:, q].max() <= tracking_bound(alpha, N, q)


def test_tracking_array_matches_scalar():
    perm = build_permutation(F(3, 2), 32)
    pts = torus_points(6, 40)
    arr = tracking_error_array(F(3, 2), 32, pts, 3, perm)
    for k in range(0, 40, 7):
        assert np.allclose(arr[k], tracking_error(F(3, 2), 32, TorusPoint(*pts[k]), 3, perm), atol=1e-12)


def test_measure_estimate_examples():
    est = measure_estimate(lambda p: np.ones(len(p), bool), samples=10**4, seed=1)
    assert (est.mean, est.stderr) == (1.0, 0.0)
    half = measure_estimate(lambda p: p[:, 0] < 0.5, samples=10**5, seed=2)
    assert abs(half.mean - 0.5) <= 3 * half.stderr
    assert half.stderr == pytest.approx(math.sqrt(half.mean * (1 - half.mean) / 10**5))
    g0 = gamma_curve(F(1, 2), 0)
    band = measure_estimate(lambda p: curve_distances(p, g0) <= 0.1, samples=10**5, seed=3)
    assert abs(band.mean - 0.2) <= 3 * band.stderr
    with pytest.raises(ValueError):
        measure_estimate(lambda p: p[:, 0] < 0.5, samples=999)


def test_measure_estimate_is_chunking_invariant():
    pred = lambda p: p[:, 0] + p[:, 1] < 0.7
    a = measure_estimate(pred, samples=5000, seed=9)
    b = measure_estimate(pred, samples=5000, seed=9, chunk=777)
    assert a == b


def test_sampled_distances_use_the_measure_samples():
    c = gamma_curve(F(3, 2), 2)
    d = sampled_distances(c, 3000, 4, chunk=1000)
    assert np.array_equal(d, curve_distances(torus_points(4, 3000), c))


@pytest.mark.parametrize("alpha", [F(1, 2), F(3, 2)])
def test_strip_measure_bound(alpha):
    for p in range(4):
        d = sampled_distances(gamma_curve(alpha, p), 10**5, 0)
        for eps in (0.01, 0.05):
            est = float(np.mean(d <= eps))
            se = math.sqrt(est * (1 - est) / 10**5)
            assert est <= strip_bound(alpha, p, eps) + 3 * se
    curves = CurveCache(alpha)
    pts = torus_points(1, 10**5)
    D = big_gamma_distances(pts, curves, 3)
    for eps in (0.01, 0.05):
        est = float(np.mean(D <= eps))
        assert est <= big_gamma_bound(alpha, 3, eps) + 3 * math.sqrt(est * (1 - est) / 10**5)


@pytest.mark.parametrize("alpha", [F(1, 2), F(3, 2), F(-1, 20)])
def test_orbit_keeps_away_from_the_cut(alpha):
    n, eps = 3, 0.05
    eta = spectral(alpha).eta
    curves = CurveCache(alpha)
    g0 = curves[0]
    x = torus_points(13, 10**4)
    x = x[big_gamma_distances(x, curves, n) > eps]
    for q in range(n):
        assert (curve_distances(x, g0) > eps * eta ** (-q)).all()
        x = forward_array(alpha, x)


def test_stretch_examples():
    a = TorusPoint(0.3, 0.4)
    assert stretch_check(F(3, 2), a, a) == PASS
    assert stretch_check(F(3, 2), TorusPoint(0.99, 0.4), TorusPoint(0.01, 0.4), 1) == NOT_APPLICABLE
    assert stretch_check(F(3, 2), TorusPoint(0.41, 0.4), TorusPoint(0.39, 0.4), -1) == NOT_APPLICABLE
    assert stretch_check(F(3, 2), TorusPoint(0.1, 0.4), TorusPoint(0.45, 0.4), 1) == NOT_APPLICABLE
    with pytest.raises(ValueError):
        stretch_check(F(3, 2), a, a, 0)


@pytest.mark.parametrize("alpha", [F(1, 2), F(3, 2)])
@pytest.mark.parametrize("direction", [1, -1])
def test_stretch_random_pairs(alpha, direction):
    eta = spectral(alpha).eta
    a = torus_points(17, 10**5)
    u = uniform(18, 2 * 10**5).reshape(-1, 2)
    r = 0.49 / eta * np.sqrt(u[:, 0])
    b = a + r[:, None] * np.stack([np.cos(2 * np.pi * u[:, 1]), np.sin(2 * np.pi * u[:, 1])], axis=-1)
    out = stretch_check_array(alpha, a, b, direction)
    applicable = out != NOT_APPLICABLE
    assert applicable.mean() > 0.5
    assert (out[applicable] == PASS).all()


def test_curve_csv(tmp_path):
    c = gamma_curve(F(1, 2), -1)
    c.to_csv(tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "p,seg_id,a1,a2,b1,b2"
    assert len(lines) == len(c) + 1
    assert lines[1].startswith("-1,0,")
