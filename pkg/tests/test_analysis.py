import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limview.analysis import (ArtifactCircle, EdgeProbe, artifact_amplitude, artifact_sharpness, edge_probe,
                              line_profile, measure_jump, predicted_artifact_circles, sample_bilinear, sigma0)
from limview.errors import EmptySampleSet, ProbeOutsideGrid, ValidationError
from limview.geometry import AcquisitionCurve, Arc, Covector, Visibility, classify_covector
from limview.phantom import Disc, Phantom, RasterImage, default_disc, rasterize
from limview.window import WindowSpec

CIRCLE = AcquisitionCurve.circle()
QUARTER = Arc(CIRCLE, 0.0, math.pi / 2)
THREE_QUARTERS = Arc(CIRCLE, 0.0, 3 * math.pi / 2)
FULL = Arc.full(CIRCLE)
SHARP = lambda arc: WindowSpec("sharp", arc.length)


def radial(angle_deg, radius=0.3):
    a = math.radians(angle_deg)
    u = (math.cos(a), math.sin(a))
    return Covector((radius * u[0], radius * u[1]), u)


def circle_summary(circles):
    return sorted((c.endpoint, round(c.center[0], 12) + 0.0, round(c.center[1], 12) + 0.0, round(c.radius, 12))
                  for c in circles)


def test_quarter_arc_circles():
    got = circle_summary(predicted_artifact_circles(default_disc(), QUARTER))
    assert got == [("a", 1.0, 0.0, 0.7), ("a", 1.0, 0.0, 1.3), ("b", 0.0, 1.0, 0.7), ("b", 0.0, 1.0, 1.3)]


def test_three_quarter_arc_circles():
    got = circle_summary(predicted_artifact_circles(default_disc(), THREE_QUARTERS))
    assert got == [("a", 1.0, 0.0, 0.7), ("a", 1.0, 0.0, 1.3), ("b", 0.0, -1.0, 0.7), ("b", 0.0, -1.0, 1.3)]


def test_closed_arc_has_no_circles():
    assert predicted_artifact_circles(default_disc(), FULL) == []


@settings(max_examples=50, deadline=None)
@given(cx=st.floats(-0.4, 0.4), cy=st.floats(-0.4, 0.4), rho=st.floats(0.01, 0.3),
       b=st.floats(0.2, 6.0), s0=st.floats(0, 6.28))
def test_circles_tangent_to_discs(cx, cy, rho, b, s0):
    phantom = Phantom((Disc((cx, cy), rho),))
    for circle in predicted_artifact_circles(phantom, Arc(CIRCLE, s0, s0 + b)):
        d = math.hypot(circle.center[0] - cx, circle.center[1] - cy)
        # internally or externally tangent: | |d - R| - rho | or |R - d - rho| vanishes
        assert min(abs(abs(d - circle.radius) - rho), abs(circle.radius - d - rho)) < 1e-12


@pytest.mark.parametrize("angle", [0, 45, 100, 200, 300])
def test_full_circle_sharp_symbol_is_one(angle):
    assert sigma0(FULL, SHARP(FULL), radial(angle)) == 1.0


def test_three_quarter_sharp_symbols():
    assert sigma0(THREE_QUARTERS, SHARP(THREE_QUARTERS), radial(45)) == 1.0
    assert sigma0(THREE_QUARTERS, SHARP(THREE_QUARTERS), radial(135)) == 0.5


def test_quarter_sharp_invisible_symbol():
    assert classify_covector(QUARTER, radial(135)) is Visibility.INVISIBLE
    assert sigma0(QUARTER, SHARP(QUARTER), radial(135)) == 0.0


def test_boundary_symbol_undefined():
    with pytest.raises(ValidationError):
        sigma0(QUARTER, SHARP(QUARTER), Covector((0.3, 0.0), (1.0, 0.0)))


def test_smooth_window_symbol_by_hand():
    # for x = 0 and xi along 45 degrees, z+ = (cos 45, sin 45) and z- lies off the quarter arc
    spec = WindowSpec("rational", math.pi / 2, 0.2, 2)
    b, eps, s = math.pi / 2, 0.2, math.pi / 4
    H = lambda v: v * (b - v) / (v * (b - v) + eps)
    expected = 0.5 * (H(s) / H(b / 2)) ** 2
    assert sigma0(QUARTER, spec, Covector((0.0, 0.0), (1.0, 1.0))) == pytest.approx(expected, abs=1e-12)


arcs = st.builds(lambda s0, b: Arc(CIRCLE, s0, s0 + b), st.floats(0, 6.28), st.floats(0.2, 6.2))
covectors = st.builds(lambda r, phi, theta: Covector((r * math.cos(phi), r * math.sin(phi)),
                                                     (math.cos(theta), math.sin(theta))),
                      st.floats(0, 0.9), st.floats(0, 6.28), st.floats(0, 6.28))


@settings(max_examples=100, deadline=None)
@given(arc=arcs, cov=covectors)
def test_sharp_symbol_matches_classification(arc, cov):
    cls = classify_covector(arc, cov)
    if cls is Visibility.BOUNDARY:
        return
    expected = {Visibility.INVISIBLE: 0.0, Visibility.SINGLY_VISIBLE: 0.5, Visibility.DOUBLY_VISIBLE: 1.0}[cls]
    assert sigma0(arc, SHARP(arc), cov) == expected


@settings(max_examples=100, deadline=None)
@given(arc=arcs, cov=covectors, kind=st.sampled_from(["rational", "plateau"]), eps=st.floats(0.05, 0.45),
       k=st.integers(1, 3))
def test_symbol_bounded_and_flip_invariant(arc, cov, kind, eps, k):
    if classify_covector(arc, cov) is Visibility.BOUNDARY:
        return
    spec = WindowSpec(kind, arc.length, eps, k)
    value = sigma0(arc, spec, cov)
    assert 0.0 <= value <= 1.0
    assert sigma0(arc, spec, cov.flipped()) == pytest.approx(value, abs=1e-12)


def test_jump_on_rasterized_phantom():
    img = rasterize(default_disc(), 512)
    for angle in (0, 45, 135, 225, 315):
        assert measure_jump(img, edge_probe(default_disc().discs[0], angle)) == pytest.approx(1.0, abs=0.05)


def test_jump_on_constant_image():
    img = RasterImage(np.full((64, 64), 3.5))
    assert measure_jump(img, edge_probe(default_disc().discs[0], 45)) == pytest.approx(0.0, abs=1e-12)


def test_probe_outside_grid():
    img = RasterImage(np.zeros((64, 64)))
    with pytest.raises(ProbeOutsideGrid):
        measure_jump(img, EdgeProbe((0.98, 0.0), (1.0, 0.0), 0.06))


def test_bilinear_is_exact_on_planes():
    img = rasterize(default_disc(), 32)
    xx, yy = img.mesh()
    plane = RasterImage(2 * xx - 3 * yy + 1)
    pts = np.random.default_rng(1).uniform(-0.9, 0.9, size=(50, 2))
    np.testing.assert_allclose(sample_bilinear(plane, pts), 2 * pts[:, 0] - 3 * pts[:, 1] + 1, atol=1e-12)


def test_artifact_amplitude_zero_image():
    circle = ArtifactCircle((1.0, 0.0), 0.5, default_disc().discs[0], "a")
    assert artifact_amplitude(RasterImage(np.zeros((128, 128))), circle, default_disc()) == 0.0


def test_artifact_amplitude_percentile_ignores_spikes():
    img = np.zeros((128, 128))
    img[64, 100] = 50.0
    circle = ArtifactCircle((0.0, 0.0), 0.6, default_disc().discs[0], "a")
    assert artifact_amplitude(RasterImage(img), circle, default_disc()) == 0.0


def test_artifact_amplitude_constant_image():
    circle = ArtifactCircle((1.0, 0.0), 0.5, default_disc().discs[0], "a")
    value = artifact_amplitude(RasterImage(np.full((128, 128), -2.0)), circle, default_disc())
    assert value == pytest.approx(2.0)


def test_artifact_amplitude_excludes_disc_edges():
    # circle of radius 0.3 around the origin lies on the disc edge everywhere
    img = rasterize(default_disc(), 128)
    circle = ArtifactCircle((0.0, 0.0), 0.3, default_disc().discs[0], "a")
    with pytest.raises(EmptySampleSet):
        artifact_amplitude(img, circle, default_disc())
    with pytest.raises(EmptySampleSet):
        artifact_sharpness(img, circle, default_disc())


def test_artifact_sharpness_sees_a_ring_not_a_ramp():
    img = RasterImage(np.zeros((256, 256)))
    xx, yy = img.mesh()
    circle = ArtifactCircle((1.0, 0.0), 0.7, default_disc().discs[0], "a")
    ramp = RasterImage(0.4 * xx)
    ring = RasterImage(0.4 * (np.abs(np.hypot(xx - 1, yy) - 0.7) < img.pixel_size))
    assert artifact_sharpness(ramp, circle, default_disc()) < 1e-12
    assert artifact_sharpness(ring, circle, default_disc()) > 0.1


def test_line_profile_of_phantom():
    img = rasterize(default_disc(), 256)
    prof = line_profile(img, 0.0)
    assert prof.shape == (256, 2)
    inside = np.abs(prof[:, 0]) < 0.3 - 0.01
    outside = np.abs(prof[:, 0]) > 0.3 + 0.01
    assert np.all(prof[inside, 1] == 1.0) and np.all(prof[outside, 1] == 0.0)
    width = np.ptp(prof[prof[:, 1] > 0.5, 0])
    assert width == pytest.approx(0.6, abs=2 * img.pixel_size)


def test_line_profile_of_zero_image():
    assert not line_profile(RasterImage(np.zeros((16, 16))))[:, 1].any()


def test_line_profile_row_outside():
    with pytest.raises(ValidationError):
        line_profile(RasterImage(np.zeros((16, 16))), 1.0)


def test_curve_exclusion_drops_masked_samples():
    # ones inside the unit circle, zeros (unreconstructed) outside
    img = RasterImage(np.zeros((128, 128)))
    xx, yy = img.mesh()
    img = RasterImage((np.hypot(xx, yy) < 1).astype(float))
    circle = ArtifactCircle((1.0, 0.0), 0.5, default_disc().discs[0], "a")
    values_all = artifact_amplitude(img, circle, default_disc(), percentile=10)
    values_in = artifact_amplitude(img, circle, default_disc(), curve=CIRCLE, percentile=10)
    assert values_all == 0.0 and values_in == 1.0
