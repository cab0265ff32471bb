"""Disc-sum phantoms, their rasterisation and their exact circular means."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .geometry import AcquisitionCurve, Arc
from .sinogram import Sinogram


@dataclass(frozen=True)
class Disc:
    center: tuple
    radius: float
    amplitude: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if not self.radius > 0:
            raise ValidationError(f"disc radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class Phantom:
    discs: tuple

    def __post_init__(self):
        object.__setattr__(self, "discs", tuple(self.discs))
        if not self.discs:
            raise ValidationError("phantom needs at least one disc")

    @classmethod
    def from_tuples(cls, rows) -> "Phantom":
        """Build from ``(cx, cy, radius, amplitude)`` rows."""
        return cls(tuple(Disc((cx, cy), r, a) for cx, cy, r, a in rows))

    def validate_inside(self, curve: AcquisitionCurve) -> None:
        """Reject discs that touch or cross the acquisition curve."""
        boundary = curve.sample(4096)
        for disc in self.discs:
            c = np.asarray(disc.center)
            if not curve.contains(c):
                raise ValidationError(f"disc center {disc.center} lies outside {curve.name}")
            gap = np.min(np.hypot(*(boundary - c).T)) - disc.radius
            if gap <= 0:
                raise ValidationError(f"disc at {disc.center} with radius {disc.radius} "
                                      f"touches or crosses {curve.name}")


def default_disc() -> Phantom:
    """Unit-amplitude disc of radius 0.3 at the origin."""
    return Phantom((Disc((0.0, 0.0), 0.3, 1.0),))


@dataclass
class RasterImage:
    """``n x n`` samples on [-extent, extent]^2.

    ``values[i, j]`` is the sample at ``x = centers[j]``, ``y = centers[i]``.
    """

    values: np.ndarray
    extent: float = 1.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise ValidationError("raster image must be square")
        if self.n < 2:
            raise ValidationError("raster image needs n >= 2")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("raster image values must be finite")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def pixel_size(self) -> float:
        return 2.0 * self.extent / self.n

    @property
    def centers(self) -> np.ndarray:
        return pixel_centers(self.n, self.extent)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        c = self.centers
        return np.meshgrid(c, c)


def pixel_centers(n: int, extent: float) -> np.ndarray:
    return -extent + (np.arange(n) + 0.5) * (2.0 * extent / n)


def rasterize(phantom: Phantom, n: int, extent: float = 1.0) -> RasterImage:
    c = pixel_centers(n, extent)
    xx, yy = np.meshgrid(c, c)
    img = np.zeros((n, n))
    for disc in phantom.discs:
        cx, cy = disc.center
        img += disc.amplitude * ((xx - cx) ** 2 + (yy - cy) ** 2 <= disc.radius ** 2)
    return RasterImage(img, extent)


def disc_circular_mean(center, radius, amplitude, z, r):
    """Length of ``S(z, r)`` inside one disc, times its amplitude.

    Broadcasts over ``z`` (shape ``(..., 2)``) and ``r``.
    """
    z = np.asarray(z, dtype=float)
    r = np.asarray(r, dtype=float)
    d = np.sqrt((z[..., 0] - center[0]) ** 2 + (z[..., 1] - center[1]) ** 2)
    d, r = np.broadcast_arrays(d, r)
    out = np.zeros(d.shape)
    inside = (r > 0) & (r <= radius - d)
    out[inside] = 2.0 * np.pi * r[inside]
    partial = (r > 0) & (r > np.abs(d - radius)) & (r < d + radius)
    partial &= ~inside
    dp, rp = d[partial], r[partial]
    cos_half = np.clip((dp * dp + rp * rp - radius * radius) / (2.0 * dp * rp), -1.0, 1.0)
    out[partial] = 2.0 * rp * np.arccos(cos_half)
    return amplitude * out


def circular_mean(phantom: Phantom, z, r):
    """Unnormalised integral of the phantom over the circle ``S(z, r)``."""
    total = 0.0
    for disc in phantom.discs:
        total = total + disc_circular_mean(disc.center, disc.radius, disc.amplitude, z, r)
    return total


def sample_sinogram(phantom: Phantom, arc: Arc, n_a: int, n_r: int, r_max: float) -> Sinogram:
    if n_a < 2 or n_r < 2:
        raise ValidationError("sinogram needs n_a >= 2 and n_r >= 2")
    if not r_max > 0:
        raise ValidationError("r_max must be positive")
    s_grid = np.linspace(arc.s_start, arc.s_end, n_a)
    r_grid = np.linspace(0.0, r_max, n_r)
    z = arc.curve.point(s_grid)
    values = circular_mean(phantom, z[:, None, :], r_grid[None, :])
    return Sinogram(np.asarray(values, dtype=np.float64), s_grid, r_grid, arc.curve.name)
