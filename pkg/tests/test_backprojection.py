import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limview.backprojection import ReconGrid, backproject, reconstruct
from limview.errors import GridOutsideDomain, ValidationError
from limview.filter import FilterPlan
from limview.geometry import AcquisitionCurve, Arc
from limview.phantom import Phantom, default_disc, rasterize
from limview.sinogram import Sinogram
from limview.window import WindowSpec, sample_window

CIRCLE = AcquisitionCurve.circle()
ELLIPSE = AcquisitionCurve.ellipse(1.3, 1.0)
SMALL = ReconGrid(24, 0.6)


def direct_backprojection(sino, weights, grid, curve):
    """Pixel-by-pixel loop with the trapezoid rule over the arc samples."""
    ds = sino.s_grid[1] - sino.s_grid[0]
    dr = sino.r_grid[1] - sino.r_grid[0]
    c = grid.centers()
    img = np.zeros((grid.n, grid.n))
    for i, y in enumerate(c):
        for j, x in enumerate(c):
            total = 0.0
            for a, s in enumerate(sino.s_grid):
                z = curve.point(s)
                d = curve.derivative(s)
                speed = math.hypot(d[0], d[1])
                nu = np.array([d[1], -d[0]]) / speed  # counter-clockwise curves: outward
                dist = math.hypot(x - z[0], y - z[1])
                if dist > sino.r_max:
                    continue
                g = np.interp(dist, sino.r_grid, sino.values[a])
                q = 0.5 if a in (0, len(sino.s_grid) - 1) else 1.0
                total += q * weights[a] * ((z[0] - x) * nu[0] + (z[1] - y) * nu[1]) * g * speed * ds
            img[i, j] = total / (2 * math.pi ** 2)
    return img


def random_sinogram(arc, n_a=40, n_r=64, r_max=2.0, seed=0):
    rng = np.random.default_rng(seed)
    return Sinogram(rng.normal(size=(n_a, n_r)), np.linspace(arc.s_start, arc.s_end, n_a),
                    np.linspace(0, r_max, n_r))


@pytest.mark.parametrize("curve, arc_end", [(CIRCLE, math.pi / 2), (CIRCLE, 2 * math.pi), (ELLIPSE, 4.0)])
def test_matches_direct_loop(curve, arc_end):
    arc = Arc(curve, 0.0, arc_end)
    sino = random_sinogram(arc, r_max=curve.diameter())
    w = sample_window(WindowSpec("rational", arc.length, 0.3, 2), sino.s_grid)
    img = backproject(sino, w, SMALL, curve)
    np.testing.assert_allclose(img.values, direct_backprojection(sino, w, SMALL, curve), rtol=1e-10, atol=1e-12)


def test_zero_sinogram():
    arc = Arc.full(CIRCLE)
    sino = random_sinogram(arc).with_values(np.zeros((40, 64)))
    assert not backproject(sino, np.ones(40), SMALL, CIRCLE).values.any()


def test_zero_phantom():
    img = reconstruct(Phantom.from_tuples([(0, 0, 0.3, 0.0)]), Arc.full(CIRCLE), None, FilterPlan(), SMALL,
                      n_a=64, n_r=64)
    assert not img.values.any()


@settings(max_examples=15, deadline=None)
@given(alpha=st.floats(-5, 5), beta=st.floats(-5, 5), seed=st.integers(0, 1000))
def test_linear_in_data_and_weights(alpha, beta, seed):
    arc = Arc(CIRCLE, 0.3, 2.0)
    u, v = random_sinogram(arc, seed=seed), random_sinogram(arc, seed=seed + 1)
    rng = np.random.default_rng(seed)
    w1, w2 = rng.uniform(size=(2, 40))
    mix = u.with_values(alpha * u.values + beta * v.values)
    lhs = backproject(mix, w1, SMALL, CIRCLE).values
    rhs = alpha * backproject(u, w1, SMALL, CIRCLE).values + beta * backproject(v, w1, SMALL, CIRCLE).values
    scale = np.abs(backproject(u, w1, SMALL, CIRCLE).values).max() * (abs(alpha) + abs(beta)) + 1e-300
    assert np.abs(lhs - rhs).max() <= 1e-10 * scale + 1e-300
    lhs = backproject(u, alpha * w1 + beta * w2, SMALL, CIRCLE).values
    rhs = alpha * backproject(u, w1, SMALL, CIRCLE).values + beta * backproject(u, w2, SMALL, CIRCLE).values
    assert np.abs(lhs - rhs).max() <= 1e-10 * scale + 1e-300


def test_single_row_supported_on_annulus():
    arc = Arc.full(CIRCLE)
    n_a, n_r = 16, 201
    r_grid = np.linspace(0, 2, n_r)
    values = np.zeros((n_a, n_r))
    band = (r_grid >= 0.8) & (r_grid <= 1.0)
    values[5, band] = 1.0
    sino = Sinogram(values, np.linspace(0, 2 * np.pi, n_a), r_grid)
    grid = ReconGrid(64, 0.7)
    w = np.ones(n_a)
    img = backproject(sino, w, grid, CIRCLE).values
    z = CIRCLE.point(sino.s_grid[5])
    xx, yy = np.meshgrid(grid.centers(), grid.centers())
    dist = np.hypot(xx - z[0], yy - z[1])
    dr = r_grid[1]
    assert not img[(dist < 0.8 - dr) | (dist > 1.0 + dr)].any()
    assert np.abs(img[(dist > 0.82) & (dist < 0.98)]).min() > 0
    w[5] = 3.0
    np.testing.assert_allclose(backproject(sino, w, grid, CIRCLE).values, 3 * img, rtol=1e-14)


def test_zero_beyond_rmax():
    arc = Arc.full(CIRCLE)
    sino = Sinogram(np.ones((8, 11)), np.linspace(0, 2 * np.pi, 8), np.linspace(0, 0.2, 11))
    grid = ReconGrid(8, 0.5)
    assert not backproject(sino, np.ones(8), grid, CIRCLE).values.any()


def test_grid_outside_domain():
    sino = random_sinogram(Arc.full(CIRCLE))
    with pytest.raises(GridOutsideDomain):
        backproject(sino, np.ones(40), ReconGrid(16, 1.0), CIRCLE)
    img = backproject(sino, np.ones(40), ReconGrid(16, 1.0, mask_outside=True), CIRCLE)
    assert img.values[0, 0] == 0.0


def test_weight_length_checked():
    sino = random_sinogram(Arc.full(CIRCLE))
    with pytest.raises(ValidationError):
        backproject(sino, np.ones(39), SMALL, CIRCLE)


def test_thread_count_does_not_change_bits():
    arc = Arc(CIRCLE, 0.0, 3 * math.pi / 2)
    sino = random_sinogram(arc, n_a=64, n_r=128)
    w = np.ones(64)
    grid = ReconGrid(48, 0.7)
    ref = backproject(sino, w, grid, CIRCLE, threads=1).values
    for threads in (2, 3, 4, 7):
        assert np.array_equal(backproject(sino, w, grid, CIRCLE, threads=threads).values, ref)


def test_sharp_full_circle_is_plain_inversion():
    arc = Arc.full(CIRCLE)
    grid = ReconGrid(32, 0.7)
    a = reconstruct(default_disc(), arc, None, FilterPlan(), grid, n_a=128, n_r=128)
    b = reconstruct(default_disc(), arc, WindowSpec("sharp", arc.length), FilterPlan(), grid, n_a=128, n_r=128)
    assert np.array_equal(a.values, b.values)


def quarter_turn(values):
    # rows index y upwards, so an anticlockwise quarter turn is rot90 with k = -1
    return np.rot90(values, -1)


def test_quarter_turn_exact_on_aligned_samples():
    # 1025 samples over [0, 2 pi] put a transducer every 2 pi / 1024, so a
    # quarter turn maps transducers and pixels onto each other
    arc = Arc.full(CIRCLE)
    grid = ReconGrid(64, 0.7)
    a = reconstruct(Phantom.from_tuples([(0.3, 0.1, 0.2, 1.0)]), arc, None, FilterPlan(), grid, n_a=1025, n_r=512)
    b = reconstruct(Phantom.from_tuples([(-0.1, 0.3, 0.2, 1.0)]), arc, None, FilterPlan(), grid, n_a=1025, n_r=512)
    np.testing.assert_allclose(b.values, quarter_turn(a.values), atol=1e-10)


def test_rotation_equivariance():
    arc = Arc.full(CIRCLE)
    grid = ReconGrid(256, 1.0, mask_outside=True)
    a = reconstruct(Phantom.from_tuples([(0.3, 0.1, 0.25, 1.0)]), arc, None, FilterPlan(), grid,
                    n_a=2048, n_r=2048)
    b = reconstruct(Phantom.from_tuples([(-0.1, 0.3, 0.25, 1.0)]), arc, None, FilterPlan(), grid,
                    n_a=2048, n_r=2048)
    inside = grid.inside_mask(CIRCLE)
    diff = np.linalg.norm((b.values - quarter_turn(a.values))[inside]) / np.linalg.norm(b.values[inside])
    assert diff < 0.02


def test_refinement_reduces_error():
    arc = Arc.full(CIRCLE)
    grid = ReconGrid(64, 0.7)
    truth = rasterize(default_disc(), 64, 0.7).values
    xx, yy = np.meshgrid(grid.centers(), grid.centers())
    away = np.abs(np.hypot(xx, yy) - 0.3) > 3 * (1.4 / 64)
    errors = []
    for n in (64, 128, 256):
        img = reconstruct(default_disc(), arc, None, FilterPlan(), grid, n_a=n, n_r=n)
        errors.append(np.sqrt(np.mean((img.values - truth)[away] ** 2)))
    assert errors[0] > errors[1] > errors[2]


def test_recon_grid_validation():
    with pytest.raises(ValidationError):
        ReconGrid(1)
    with pytest.raises(ValidationError):
        ReconGrid(8, 0.0)
