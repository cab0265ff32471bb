"""The radial filter with symbol ``|lambda|^(n-1)`` in the squared radius.

For a row ``h(r)`` the filter computes

    P h(r) = int_R int_0^inf exp(i (s^2 - r^2) lam) |lam|^(n-1) h(s) ds dlam.

With ``t = s^2`` and ``u = r^2`` this is ``2 pi`` times the Fourier multiplier
``|lam|^(n-1)`` applied to ``H(t) = h(sqrt t) / (2 sqrt t)`` and read off at
``u``.  ``filter_row`` evaluates the multiplier with an FFT on a zero-padded
uniform ``t`` grid; ``filter_row_oracle`` evaluates the same discrete
double sum directly and is meant for validation only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import ValidationError
from .sinogram import Sinogram, check_uniform


@dataclass(frozen=True)
class FilterPlan:
    n_dim: int = 2
    n_t: Optional[int] = None  # None: twice the number of radial samples
    pad_factor: int = 2
    taper_fraction: float = 0.1

    def __post_init__(self):
        if self.n_dim not in (2, 3):
            raise ValidationError("n_dim must be 2 or 3")
        if self.pad_factor < 2:
            raise ValidationError("pad_factor must be >= 2")
        if not 0.0 <= self.taper_fraction <= 0.5:
            raise ValidationError("taper_fraction must lie in [0, 0.5]")
        if self.n_t is not None and self.n_t < 2:
            raise ValidationError("n_t must be >= 2")

    def t_size(self, n_r: int) -> int:
        n_t = 2 * n_r if self.n_t is None else self.n_t
        if n_t < n_r:
            raise ValidationError(f"n_t = {n_t} is smaller than n_r = {n_r}")
        return n_t


def angular_frequencies(m: int, dt: float) -> np.ndarray:
    """Non-negative angular frequencies of a length-``m`` real FFT."""
    return 2.0 * np.pi * np.fft.rfftfreq(m, dt)


def taper(lam: np.ndarray, lam_max: float, fraction: float) -> np.ndarray:
    """Raised-cosine roll-off over the top ``fraction`` of ``[0, lam_max]``."""
    w = np.ones_like(lam)
    if fraction <= 0:
        return w
    cut = (1.0 - fraction) * lam_max
    hi = np.abs(lam) > cut
    w[hi] = 0.5 * (1.0 + np.cos(np.pi * (np.abs(lam[hi]) - cut) / (lam_max - cut)))
    return w


def multiplier(m: int, dt: float, plan: FilterPlan) -> np.ndarray:
    lam = angular_frequencies(m, dt)
    lam_max = np.pi / dt
    return 2.0 * np.pi * lam ** (plan.n_dim - 1) * taper(lam, lam_max, plan.taper_fraction)


def apply_multiplier(values: np.ndarray, dt: float, plan: FilterPlan) -> np.ndarray:
    """Apply ``2 pi |lam|^(n-1)`` along the last axis of ``t`` samples.

    Inputs shorter than ``pad_factor * n`` are zero padded to that length
    and the output is truncated back to the input length.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    m = plan.pad_factor * n
    spec = np.fft.rfft(values, m, axis=-1)
    spec *= multiplier(m, dt, plan)
    return np.fft.irfft(spec, m, axis=-1)[..., :n]


def _cubic(x: np.ndarray, y: np.ndarray) -> CubicHermiteSpline:
    """Local cubic Hermite interpolant with second-order finite-difference slopes.

    Unlike a monotone (slope-limited) cubic it is linear in ``y``, which keeps
    the whole filter a linear operator.
    """
    return CubicHermiteSpline(x, y, np.gradient(y, x, axis=-1, edge_order=2), axis=-1)


def _to_t_grid(rows: np.ndarray, r_grid: np.ndarray, n_t: int) -> tuple[np.ndarray, np.ndarray]:
    """Resample rows to a uniform grid in ``t = r^2`` and fold in the Jacobian.

    Returns ``(t, H)`` with trapezoid weights already applied to ``H``.
    """
    r_max = r_grid[-1]
    t = np.linspace(0.0, r_max * r_max, n_t)
    root_t = np.sqrt(t)
    h = _cubic(r_grid, rows)(np.minimum(root_t, r_max))
    H = np.zeros_like(h)
    H[..., 1:] = h[..., 1:] / (2.0 * root_t[1:])
    H[..., 0] *= 0.5
    H[..., -1] *= 0.5
    return t, H


def _from_t_grid(t: np.ndarray, values: np.ndarray, r_grid: np.ndarray) -> np.ndarray:
    u = np.minimum(r_grid * r_grid, t[-1])
    return _cubic(t, values)(u)


def _check_rows(rows, r_grid):
    rows = np.asarray(rows, dtype=float)
    r_grid = np.asarray(r_grid, dtype=float)
    check_uniform(r_grid, 1e-9, "r_grid")
    if abs(r_grid[0]) > 1e-12:
        raise ValidationError("r_grid must start at 0")
    if rows.shape[-1] != len(r_grid):
        raise ValidationError("row length does not match r_grid")
    if not np.all(np.isfinite(rows)):
        raise ValidationError("rows must be finite")
    return rows, r_grid


def filter_row(row, r_grid, plan: FilterPlan) -> np.ndarray:
    """Fast spectral filter of radial samples (or a stack of rows)."""
    rows, r_grid = _check_rows(row, r_grid)
    n_t = plan.t_size(len(r_grid))
    t, H = _to_t_grid(rows, r_grid, n_t)
    out = apply_multiplier(H, t[1] - t[0], plan)
    return _from_t_grid(t, out, r_grid)


def oracle_kernel(n_t: int, dt: float, plan: FilterPlan) -> np.ndarray:
    """Kernel ``K(d)``, ``d = -(n_t-1) .. n_t-1``, by direct lambda quadrature.

    The lambda nodes are ``m * dlam`` for ``|m| <= M/2`` with ``M`` the padded
    length and half weights on the two Nyquist nodes.
    """
    m_len = plan.pad_factor * n_t
    dlam = 2.0 * np.pi / (m_len * dt)
    m = np.arange(-(m_len // 2), m_len // 2 + 1)
    lam = m * dlam
    w = np.ones(len(m)) * dlam
    if m_len % 2 == 0:
        w[0] *= 0.5
        w[-1] *= 0.5
    w *= np.abs(lam) ** (plan.n_dim - 1) * taper(lam, np.pi / dt, plan.taper_fraction)
    d = np.arange(-(n_t - 1), n_t)
    return dt * np.cos(np.outer(d * dt, lam)) @ w


def filter_row_oracle(row, r_grid, plan: FilterPlan) -> np.ndarray:
    """Direct O(N^2) evaluation of the filter; for ``n_r <= 512``."""
    rows, r_grid = _check_rows(row, r_grid)
    n_t = plan.t_size(len(r_grid))
    t, H = _to_t_grid(rows, r_grid, n_t)
    kernel = oracle_kernel(n_t, t[1] - t[0], plan)
    idx = np.arange(n_t)
    toeplitz = kernel[(idx[:, None] - idx[None, :]) + n_t - 1]
    out = H @ toeplitz.T
    return _from_t_grid(t, out, r_grid)


def filter_sinogram(sino: Sinogram, plan: FilterPlan) -> Sinogram:
    """Filter every angular row independently; grids are unchanged."""
    return sino.with_values(filter_row(sino.values, sino.r_grid, plan))
