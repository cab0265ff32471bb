"""Windowed backprojection over the observation arc and the full pipeline."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import GridOutsideDomain, ValidationError
from .filter import FilterPlan, filter_sinogram
from .geometry import AcquisitionCurve, Arc, outward_normals
from .phantom import Phantom, RasterImage, pixel_centers, sample_sinogram
from .sinogram import Sinogram, check_uniform
from .window import WindowSpec, sample_window


@dataclass(frozen=True)
class ReconGrid:
    """Pixel grid of the reconstruction.

    With ``mask_outside`` pixels whose centers are not inside the curve are
    left at zero instead of raising ``GridOutsideDomain``.
    """

    n: int
    extent: float = 1.0
    mask_outside: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("grid needs n >= 2")
        if not self.extent > 0:
            raise ValidationError("grid extent must be positive")

    def centers(self) -> np.ndarray:
        return pixel_centers(self.n, self.extent)

    def inside_mask(self, curve: AcquisitionCurve) -> np.ndarray:
        xx, yy = np.meshgrid(self.centers(), self.centers())
        inside = curve.contains(np.stack([xx, yy], axis=-1))
        if not self.mask_outside and not inside.all():
            raise GridOutsideDomain(
                f"{int((~inside).sum())} pixel centers lie outside {curve.name}")
        return inside


def trapezoid_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def _accumulate(px, py, zx, zy, nx, ny, coef, rows, dr, r_max):
    """Sum of per-sample contributions at the given pixels.

    Uses only correctly rounded arithmetic so that every pixel value is
    independent of how the pixels are chunked across workers.
    """
    n_r = rows.shape[1]
    acc = np.zeros(px.shape)
    for i in range(len(zx)):
        if coef[i] == 0.0:
            continue
        dx = zx[i] - px
        dy = zy[i] - py
        dist = np.sqrt(dx * dx + dy * dy)
        pos = dist / dr
        j = np.floor(pos)
        frac = pos - j
        j = j.astype(np.intp)
        valid = dist <= r_max
        j0 = np.where(valid, np.minimum(j, n_r - 2), 0)
        row = rows[i]
        g = row[j0] * (1.0 - frac) + row[j0 + 1] * frac
        g = np.where(valid, g, 0.0)
        acc += (dx * nx[i] + dy * ny[i]) * g * coef[i]
    return acc


def backproject(filtered: Sinogram, weights, grid: ReconGrid, curve: AcquisitionCurve,
                threads: int = 1) -> RasterImage:
    """Evaluate ``1/(2 pi^2) sum_i q_i chi_i <z_i - x, nu_i> g_i(|x - z_i|) |z'(s_i)|``.

    ``q_i`` are trapezoid weights on the uniform arc grid and ``g_i`` is
    linearly interpolated along each row (zero beyond ``r_max``).
    """
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (filtered.n_a,):
        raise ValidationError(f"expected {filtered.n_a} window weights, got {weights.shape}")
    ds = check_uniform(filtered.s_grid, 1e-9, "s_grid")
    dr = check_uniform(filtered.r_grid, 1e-9, "r_grid")
    inside = grid.inside_mask(curve)

    z = curve.point(filtered.s_grid)
    normals, speed = outward_normals(curve, filtered.s_grid)
    coef = weights * trapezoid_weights(filtered.n_a) * speed * ds / (2.0 * np.pi ** 2)

    xx, yy = np.meshgrid(grid.centers(), grid.centers())
    px, py = xx[inside], yy[inside]
    args = (z[:, 0].copy(), z[:, 1].copy(), normals[:, 0].copy(), normals[:, 1].copy(),
            coef, np.ascontiguousarray(filtered.values), dr, filtered.r_max)

    threads = max(1, int(threads))
    if threads == 1:
        vals = _accumulate(px, py, *args)
    else:
        bounds = np.linspace(0, len(px), threads + 1).astype(int)
        with ThreadPoolExecutor(threads) as pool:
            parts = pool.map(lambda k: _accumulate(px[bounds[k]:bounds[k + 1]],
                                                   py[bounds[k]:bounds[k + 1]], *args),
                             range(threads))
            vals = np.concatenate(list(parts))
    img = np.zeros((grid.n, grid.n))
    img[inside] = vals
    return RasterImage(img, grid.extent)


def reconstruct(data: Union[Phantom, Sinogram], arc: Arc, window: Optional[WindowSpec],
                plan: FilterPlan, grid: ReconGrid, n_a: int = 1024, n_r: int = 1024,
                r_max: Optional[float] = None, threads: int = 1) -> RasterImage:
    """``T f = B chi P R f`` on ``grid``.

    ``data`` is either a phantom (its sinogram is computed analytically on
    ``arc`` with ``n_a`` x ``n_r`` samples) or a precomputed sinogram.
    ``window=None`` means the sharp cutoff.
    """
    if isinstance(data, Phantom):
        data.validate_inside(arc.curve)
        if r_max is None:
            r_max = arc.curve.diameter()
        sino = sample_sinogram(data, arc, n_a, n_r, r_max)
    else:
        sino = data
    if window is None:
        window = WindowSpec("sharp", arc.length)
    filtered = filter_sinogram(sino, plan)
    weights = sample_window(window, sino.s_grid, arc.s_start)
    return backproject(filtered, weights, grid, arc.curve, threads=threads)
