"""Quantitative checks of reconstructed jumps and added artifacts."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates

from .errors import EmptySampleSet, ProbeOutsideGrid, ValidationError
from .geometry import Arc, Covector, Visibility, classify_covector, ray_intersections
from .phantom import Disc, Phantom, RasterImage
from .window import WindowSpec, eval_window


@dataclass(frozen=True)
class ArtifactCircle:
    center: tuple
    radius: float
    source_disc: Disc
    endpoint: str  # "a" (arc start) or "b" (arc end)


@dataclass(frozen=True)
class EdgeProbe:
    location: tuple
    normal: tuple  # points from the inside of the edge to the outside
    half_width: float


def edge_probe(disc: Disc, angle_deg: float, half_width: float = 0.06) -> EdgeProbe:
    """Radial probe across ``disc``'s boundary at polar angle ``angle_deg``."""
    a = math.radians(angle_deg)
    u = (math.cos(a), math.sin(a))
    loc = (disc.center[0] + disc.radius * u[0], disc.center[1] + disc.radius * u[1])
    return EdgeProbe(loc, u, half_width)


def predicted_artifact_circles(phantom: Phantom, arc: Arc) -> list[ArtifactCircle]:
    """Circles around the arc endpoints that are tangent to a disc boundary."""
    if arc.closed:
        return []
    circles = []
    for label, e in zip("ab", arc.endpoints):
        for disc in phantom.discs:
            d = float(np.hypot(e[0] - disc.center[0], e[1] - disc.center[1]))
            center = (float(e[0]), float(e[1]))
            for radius in (d - disc.radius, d + disc.radius):
                if radius > 0:
                    circles.append(ArtifactCircle(center, radius, disc, label))
    return circles


def window_on_curve(arc: Arc, window: WindowSpec, s: float) -> float:
    """The window as a function on the whole curve (zero off the arc)."""
    off = float(arc.offset(s))
    if arc.closed:
        off = min(off, arc.length)
    if off > arc.length:
        return 0.0
    return float(eval_window(window, off))


def sigma0(arc: Arc, window: WindowSpec, cov: Covector) -> float:
    """Principal symbol ``(chi(z+) + chi(z-)) / 2`` at a non-boundary covector."""
    if classify_covector(arc, cov) is Visibility.BOUNDARY:
        raise ValidationError("principal symbol is undefined on the boundary zone")
    z_plus, z_minus = ray_intersections(arc.curve, cov.x, cov.xi)
    return 0.5 * (window_on_curve(arc, window, z_plus.param)
                  + window_on_curve(arc, window, z_minus.param))


def _pixel_coords(image: RasterImage, pts: np.ndarray) -> np.ndarray:
    # fractional (row, col) indices of physical points
    h = image.pixel_size
    col = (pts[..., 0] + image.extent) / h - 0.5
    row = (pts[..., 1] + image.extent) / h - 0.5
    return np.stack([row, col])


def _in_grid(image: RasterImage, pts: np.ndarray) -> np.ndarray:
    lim = image.extent - 0.5 * image.pixel_size
    return np.all(np.abs(pts) <= lim + 1e-12, axis=-1)


def sample_bilinear(image: RasterImage, pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    return map_coordinates(image.values, _pixel_coords(image, pts), order=1, mode="nearest")


def measure_jump(image: RasterImage, probe: EdgeProbe, samples_per_side: int = 60) -> float:
    """Inside minus outside mean over the middle third of each probe half."""
    loc = np.asarray(probe.location, dtype=float)
    nrm = np.asarray(probe.normal, dtype=float)
    nrm = nrm / np.linalg.norm(nrm)
    ends = np.array([loc - probe.half_width * nrm, loc + probe.half_width * nrm])
    if not _in_grid(image, ends).all():
        raise ProbeOutsideGrid(f"probe at {probe.location} leaves the image")
    d = probe.half_width * (np.arange(samples_per_side) + 0.5) / samples_per_side
    mid = d[(d >= probe.half_width / 3) & (d <= 2 * probe.half_width / 3)]
    inside = sample_bilinear(image, loc - mid[:, None] * nrm)
    outside = sample_bilinear(image, loc + mid[:, None] * nrm)
    return float(inside.mean() - outside.mean())


def _circle_points(circle: ArtifactCircle, radius: float, n_samples: int) -> np.ndarray:
    phi = 2.0 * np.pi * np.arange(n_samples) / n_samples
    return np.column_stack([circle.center[0] + radius * np.cos(phi),
                            circle.center[1] + radius * np.sin(phi)])


def _keep_mask(image, pts, phantom, exclusion, curve):
    keep = _in_grid(image, pts)
    if curve is not None:
        # stay clear of pixels left at zero outside the acquisition curve
        keep &= curve.level(pts) < -2.0 * image.pixel_size
    for disc in phantom.discs:
        dist = np.hypot(pts[:, 0] - disc.center[0], pts[:, 1] - disc.center[1])
        keep &= np.abs(dist - disc.radius) > exclusion
    return keep


def artifact_amplitude(image: RasterImage, circle: ArtifactCircle, phantom: Phantom,
                       exclusion: float | None = None, curve=None, n_samples: int = 2048,
                       percentile: float = 95.0) -> float:
    """Robust magnitude of the image along an artifact circle.

    Samples within ``exclusion`` (default: 4 pixels) of a phantom disc
    boundary, outside the image, or (when ``curve`` is given) outside the
    acquisition curve are discarded; returns the 95th percentile of ``|image|``
    over the rest.
    """
    if exclusion is None:
        exclusion = 4.0 * image.pixel_size
    pts = _circle_points(circle, circle.radius, n_samples)
    keep = _keep_mask(image, pts, phantom, exclusion, curve)
    if not keep.any():
        raise EmptySampleSet("every sample on the circle was excluded")
    return float(np.percentile(np.abs(sample_bilinear(image, pts[keep])), percentile))


def artifact_sharpness(image: RasterImage, circle: ArtifactCircle, phantom: Phantom,
                       exclusion: float | None = None, curve=None, step_px: float = 2.0,
                       n_samples: int = 2048, percentile: float = 95.0) -> float:
    """95th percentile of the second difference of the image across the circle.

    The radial second difference with step ``step_px`` pixels removes the
    smooth part of the image (to first order), so this responds to a
    singularity located on the circle rather than to the slowly varying
    limited-view bias that dominates ``artifact_amplitude``.
    """
    if exclusion is None:
        exclusion = 4.0 * image.pixel_size
    step = step_px * image.pixel_size
    rings = [_circle_points(circle, circle.radius + k * step, n_samples) for k in (-1, 0, 1)]
    keep = np.ones(n_samples, dtype=bool)
    for pts in rings:
        keep &= _keep_mask(image, pts, phantom, exclusion, curve)
    if not keep.any():
        raise EmptySampleSet("every sample on the circle was excluded")
    inner, mid, outer = (sample_bilinear(image, pts[keep]) for pts in rings)
    return float(np.percentile(np.abs(inner - 2.0 * mid + outer), percentile))


def line_profile(image: RasterImage, y: float = 0.0) -> np.ndarray:
    """Bilinear samples along the horizontal line at height ``y``.

    Returns an ``(n, 2)`` array of ``(x, value)`` at the pixel-center
    abscissae.
    """
    lim = image.extent - 0.5 * image.pixel_size
    if abs(y) > lim + 1e-12:
        raise ValidationError(f"row y={y} outside the image")
    x = image.centers
    vals = sample_bilinear(image, np.column_stack([x, np.full_like(x, y)]))
    return np.column_stack([x, vals])
