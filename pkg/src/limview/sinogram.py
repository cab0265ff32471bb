from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonUniformGrid, ValidationError


def check_uniform(grid: np.ndarray, tol: float = 1e-9, name: str = "grid") -> float:
    """Return the spacing of a strictly increasing uniform grid."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2:
        raise NonUniformGrid(f"{name} needs at least two samples")
    step = np.diff(grid)
    h = (grid[-1] - grid[0]) / (len(grid) - 1)
    if h <= 0 or np.max(np.abs(step - h)) > tol * max(1.0, abs(h)):
        raise NonUniformGrid(f"{name} is not uniform within {tol:g}")
    return h


@dataclass
class Sinogram:
    """Data ``g(s_i, r_j)`` on an arc times ``[0, r_max]``."""

    values: np.ndarray
    s_grid: np.ndarray
    r_grid: np.ndarray
    curve: str = "circle"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.s_grid = np.asarray(self.s_grid, dtype=np.float64)
        self.r_grid = np.asarray(self.r_grid, dtype=np.float64)
        if self.values.shape != (len(self.s_grid), len(self.r_grid)):
            raise ValidationError(
                f"sinogram values {self.values.shape} do not match grids "
                f"({len(self.s_grid)}, {len(self.r_grid)})")

    @property
    def n_a(self) -> int:
        return len(self.s_grid)

    @property
    def n_r(self) -> int:
        return len(self.r_grid)

    @property
    def r_max(self) -> float:
        return float(self.r_grid[-1])

    def header(self) -> dict:
        return {
            "n_a": self.n_a,
            "n_r": self.n_r,
            "s_start": float(self.s_grid[0]),
            "s_end": float(self.s_grid[-1]),
            "r_max": self.r_max,
            "curve": self.curve,
        }

    def with_values(self, values) -> "Sinogram":
        return Sinogram(values, self.s_grid, self.r_grid, self.curve)
